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

#ifndef FORGE_FEATURES_HPP_
#define FORGE_FEATURES_HPP_

#include <cmath>
#include <filesystem>

#include <Eigen/Dense>

#include "forge/audio.hpp"

namespace forge {

struct FeatureSpec {
  int n_mels = 80;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int fft_size = 400;
  /// Input is zero-padded or truncated to this length; <= 0 disables it.
  double pad_to_s = 30.0;
  /// Power floor applied before log10.
  double log_floor = 1e-10;
  int sample_rate = kCorpusSampleRate;

  int window_samples() const { return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0)); }
  int hop_samples() const { return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0)); }
  void validate() const;
};

/// Log10 mel energies, one row per mel band and one column per frame.
struct MelMatrix {
  Eigen::MatrixXd values;
  double frame_hop_s = 0.0;

  Eigen::Index n_mels() const { return values.rows(); }
  Eigen::Index n_frames() const { return values.cols(); }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Periodic Hann window of length n.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hann_window(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = static_cast<Scalar>(0.5 - 0.5 * std::cos(2.0 * M_PI * i / n));
  }
  return w;
}

/// Centre frequencies (Hz) of the n_mels triangular filters: interior
/// points of n_mels + 2 points equally spaced in HTK mel between 0 and
/// Nyquist.
Eigen::VectorXd mel_center_frequencies(int n_mels, int sample_rate);

/// Triangular HTK filterbank, [n_mels x (fft_size / 2 + 1)], unit peak.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> mel_filterbank(int n_mels, int fft_size,
                                                                     int sample_rate) {
  const int bins = fft_size / 2 + 1;
  const double top = hz_to_mel(sample_rate / 2.0);
  Eigen::VectorXd edges(n_mels + 2);
  for (int k = 0; k < n_mels + 2; ++k) edges[k] = mel_to_hz(top * k / (n_mels + 1));

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> fb =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int b = 0; b < bins; ++b) {
      const double f = static_cast<double>(b) * sample_rate / fft_size;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      fb(m, b) = static_cast<Scalar>(w);
    }
  }
  return fb;
}

/// Frame t covers samples [t * hop, t * hop + window) of the padded input.
/// With padding on, n_frames = round(pad_to_s * 1000 / hop_ms). Throws
/// InvalidArgument when the buffer rate differs from spec.sample_rate.
MelMatrix log_mel(const AudioBuffer& buf, const FeatureSpec& spec = {});

/// Writes `<stem>.f32` (little-endian float32, row-major) and `<stem>.json`
/// ({"n_mels", "n_frames", "hop_ms"}).
void write_features(const std::filesystem::path& stem, const MelMatrix& mel, double hop_ms);

/// Reads back what write_features produced.
MelMatrix read_features(const std::filesystem::path& stem);

}  // namespace forge

#endif  // FORGE_FEATURES_HPP_
