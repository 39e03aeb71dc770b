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

#ifndef FORGE_AUGMENT_HPP_
#define FORGE_AUGMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "forge/audio.hpp"
#include "forge/corpus.hpp"

namespace forge {

struct NoiseSpec {
  /// Rate the white noise is synthesised at before resampling to the
  /// segment's rate.
  int noise_sample_rate = 8000;
  double target_snr_db = 20.0;
  std::uint64_t seed = 0;
};

/// I.i.d. uniform samples in [-1, 1) at `spec.noise_sample_rate`, drawn from
/// SplitMix64 seeded with `spec.seed`.
AudioBuffer generate_white_noise(std::int64_t n_samples, const NoiseSpec& spec);

enum class SkipReason { kEmpty, kZeroSignal, kZeroNoise, kNoiseTooLong };

std::string to_string(SkipReason reason);

/// Either the augmented segment or the reason it was left alone.
struct AugmentOutcome {
  std::optional<AudioBuffer> audio;
  std::optional<SkipReason> skipped;
  /// Gain applied to the unit noise, and the scaled noise actually added
  /// (before clipping); kept so callers can measure the realised SNR.
  double noise_gain = 0.0;
  AudioBuffer added_noise;

  bool ok() const { return audio.has_value(); }
};

/// Synthesises noise matching the segment's duration at the noise rate,
/// resamples it to the segment rate and mixes it in at the target SNR.
AugmentOutcome augment_with_noise(const AudioBuffer& signal, const NoiseSpec& spec);

/// Same, with caller-supplied noise. The noise is resampled to the signal's
/// rate; if it is then longer than the signal the segment is skipped,
/// otherwise it is tiled to the signal length, scaled to the target SNR,
/// added and hard-clipped to [-1, 1].
AugmentOutcome augment_with_noise(const AudioBuffer& signal, const AudioBuffer& noise,
                                  const NoiseSpec& spec);

struct AugmentSummary {
  std::size_t augmented = 0;
  std::size_t skipped = 0;
};

/// Returns the originals followed, for each non-skipped item, by a copy
/// with id suffix "#aug-wn", background white_noise and augmented=true.
/// Each item is seeded with derive_seed(spec.seed, id).
CorpusManifest augment_manifest(const CorpusManifest& m, const NoiseSpec& spec,
                                AugmentSummary* summary = nullptr, int workers = 1);

}  // namespace forge

#endif  // FORGE_AUGMENT_HPP_
