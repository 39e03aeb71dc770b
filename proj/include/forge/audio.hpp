// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE_AUDIO_HPP_
#define FORGE_AUDIO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace forge {

inline constexpr int kCorpusSampleRate = 16000;

/// Mono sample stream. Samples live in [-1, 1]; duration is exactly
/// size / sample_rate.
template <typename Scalar>
struct BasicAudioBuffer {
  using Samples = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Samples samples;
  int sample_rate = kCorpusSampleRate;

  BasicAudioBuffer() = default;
  BasicAudioBuffer(Samples s, int rate) : samples(std::move(s)), sample_rate(rate) {}

  Eigen::Index size() const { return samples.size(); }
  bool empty() const { return samples.size() == 0; }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

using AudioBuffer = BasicAudioBuffer<float>;

/// Mean of squared samples; zero for an empty vector.
template <typename Derived>
double mean_power(const Eigen::MatrixBase<Derived>& x) {
  if (x.size() == 0) return 0.0;
  return x.template cast<double>().squaredNorm() / static_cast<double>(x.size());
}

/// Header facts of a RIFF/WAVE file, without decoding samples.
struct WavInfo {
  std::uint16_t format_tag = 0;  // resolved through WAVE_FORMAT_EXTENSIBLE
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  std::int64_t frames = 0;
};

using Bytes = std::vector<std::uint8_t>;

/// Parses a RIFF/WAVE container holding PCM16, PCM24, PCM32 or float32
/// samples. Channels are averaged per frame; out-of-range or non-finite
/// float samples are clamped (NaN becomes 0).
/// Throws FormatError for a broken layout, UnsupportedCodec for other
/// encodings.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

/// Mono PCM16 WAV. Samples are rounded to the nearest code and saturated.
Bytes encode_wav(const AudioBuffer& buf);

WavInfo probe_wav(std::span<const std::uint8_t> bytes);

/// Reads only the chunk headers of a file on disk.
WavInfo probe_wav_file(const std::filesystem::path& path);

AudioBuffer read_wav_file(const std::filesystem::path& path);
void write_wav_file(const std::filesystem::path& path, const AudioBuffer& buf);

Bytes read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

struct ResampleOptions {
  /// Kernel half-width, in zero crossings of the (narrower) cutoff sinc.
  int zero_crossings = 32;
  /// Passband edge as a fraction of the lower Nyquist frequency.
  double rolloff = 0.945;
  double kaiser_beta = 9.0;
  /// Above this many phases coefficients are evaluated per output sample
  /// instead of being tabulated.
  int max_table_phases = 4096;
};

/// Band-limited rational resampling with a Kaiser-windowed sinc kernel
/// organised as a polyphase bank. Output length is
/// round(size * target / source); identical rates return the input.
AudioBuffer resample(const AudioBuffer& buf, int target_rate,
                     const ResampleOptions& options = {});

/// Two-point linear interpolation. No anti-aliasing; meant as a cheap
/// reference in tests.
AudioBuffer resample_linear(const AudioBuffer& buf, int target_rate);

/// Number of output samples `resample` produces.
std::int64_t resampled_length(std::int64_t n, int source_rate, int target_rate);

}  // namespace forge

#endif  // FORGE_AUDIO_HPP_
