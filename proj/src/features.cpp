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

#include "forge/features.hpp"

#include <complex>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/FFT>

#include "forge/error.hpp"

namespace forge {

void FeatureSpec::validate() const {
  if (n_mels < 1) throw InvalidArgument("features: n_mels must be at least 1");
  if (hop_samples() < 1) throw InvalidArgument("features: hop must be at least one sample");
  if (window_samples() < 1) throw InvalidArgument("features: window must be at least one sample");
  if (fft_size < window_samples()) throw InvalidArgument("features: fft_size shorter than the window");
  if (!(log_floor > 0.0)) throw InvalidArgument("features: log floor must be positive");
}

Eigen::VectorXd mel_center_frequencies(int n_mels, int sample_rate) {
  const double top = hz_to_mel(sample_rate / 2.0);
  Eigen::VectorXd c(n_mels);
  for (int m = 0; m < n_mels; ++m) c[m] = mel_to_hz(top * (m + 1) / (n_mels + 1));
  return c;
}

MelMatrix log_mel(const AudioBuffer& buf, const FeatureSpec& spec) {
  spec.validate();
  if (buf.sample_rate != spec.sample_rate) {
    throw InvalidArgument("log_mel: expected " + std::to_string(spec.sample_rate) +
                          " Hz input, got " + std::to_string(buf.sample_rate) +
                          " Hz (resample first)");
  }
  const int window = spec.window_samples();
  const int hop = spec.hop_samples();
  const bool padded = spec.pad_to_s > 0.0;
  const std::int64_t length = padded ? std::llround(spec.pad_to_s * spec.sample_rate) : buf.size();
  const std::int64_t available = std::min<std::int64_t>(length, buf.size());
  const std::int64_t frames = padded ? std::llround(spec.pad_to_s * 1000.0 / spec.hop_ms)
                                     : (length + hop - 1) / hop;

  const Eigen::VectorXd hann = hann_window<double>(window);
  const Eigen::MatrixXd fb = mel_filterbank<double>(spec.n_mels, spec.fft_size, spec.sample_rate);
  const int bins = spec.fft_size / 2 + 1;

  Eigen::MatrixXd power(bins, frames);
  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<std::size_t>(spec.fft_size));
  std::vector<std::complex<double>> spectrum;
  for (std::int64_t t = 0; t < frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    const std::int64_t start = t * hop;
    for (int i = 0; i < window; ++i) {
      const std::int64_t s = start + i;
      if (s >= available) break;
      frame[static_cast<std::size_t>(i)] = buf.samples[s] * hann[i];
    }
    fft.fwd(spectrum, frame);
    for (int b = 0; b < bins; ++b) power(b, t) = std::norm(spectrum[static_cast<std::size_t>(b)]);
  }

  MelMatrix mel;
  mel.frame_hop_s = spec.hop_ms / 1000.0;
  mel.values = (fb * power).cwiseMax(spec.log_floor).array().log10().matrix();
  return mel;
}

void write_features(const std::filesystem::path& stem, const MelMatrix& mel, double hop_ms) {
  std::filesystem::path bin = stem;
  bin += ".f32";
  std::ofstream out(bin, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + bin.string());
  for (Eigen::Index r = 0; r < mel.n_mels(); ++r) {
    for (Eigen::Index c = 0; c < mel.n_frames(); ++c) {
      const auto v = static_cast<float>(mel.values(r, c));
      std::uint32_t raw;
      std::memcpy(&raw, &v, sizeof raw);
      const char le[4] = {static_cast<char>(raw), static_cast<char>(raw >> 8),
                          static_cast<char>(raw >> 16), static_cast<char>(raw >> 24)};
      out.write(le, 4);
    }
  }
  if (!out) throw IoError("short write to " + bin.string());

  std::filesystem::path side = stem;
  side += ".json";
  std::ofstream js(side, std::ios::trunc);
  if (!js) throw IoError("cannot write " + side.string());
  js << nlohmann::json{{"n_mels", mel.n_mels()}, {"n_frames", mel.n_frames()}, {"hop_ms", hop_ms}}.dump()
     << '\n';
}

MelMatrix read_features(const std::filesystem::path& stem) {
  std::filesystem::path side = stem;
  side += ".json";
  std::ifstream js(side);
  if (!js) throw IoError("cannot open " + side.string());
  const auto header = nlohmann::json::parse(js);
  const auto rows = header.at("n_mels").get<Eigen::Index>();
  const auto cols = header.at("n_frames").get<Eigen::Index>();

  std::filesystem::path bin = stem;
  bin += ".f32";
  const Bytes bytes = read_file_bytes(bin);
  if (static_cast<Eigen::Index>(bytes.size()) != rows * cols * 4) {
    throw FormatError(bin.string() + ": size does not match sidecar shape");
  }
  MelMatrix mel;
  mel.frame_hop_s = header.at("hop_ms").get<double>() / 1000.0;
  mel.values.resize(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, k += 4) {
      const std::uint32_t raw = static_cast<std::uint32_t>(bytes[k]) |
                                (static_cast<std::uint32_t>(bytes[k + 1]) << 8) |
                                (static_cast<std::uint32_t>(bytes[k + 2]) << 16) |
                                (static_cast<std::uint32_t>(bytes[k + 3]) << 24);
      float v;
      std::memcpy(&v, &raw, sizeof v);
      mel.values(r, c) = v;
    }
  }
  return mel;
}

}  // namespace forge
