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

#include "forge/augment.hpp"

#include <cmath>

#include "forge/parallel.hpp"
#include "forge/random.hpp"

namespace forge {

AudioBuffer generate_white_noise(std::int64_t n_samples, const NoiseSpec& spec) {
  SplitMix64 rng(spec.seed);
  AudioBuffer out(AudioBuffer::Samples(std::max<std::int64_t>(0, n_samples)), spec.noise_sample_rate);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out.samples[i] = static_cast<float>(rng.uniform_symmetric());
  }
  return out;
}

std::string to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::kEmpty: return "empty";
    case SkipReason::kZeroSignal: return "zero-signal";
    case SkipReason::kZeroNoise: return "zero-noise";
    case SkipReason::kNoiseTooLong: return "noise-too-long";
  }
  return "unknown";
}

namespace {

AugmentOutcome skip(SkipReason reason) {
  AugmentOutcome o;
  o.skipped = reason;
  return o;
}

}  // namespace

AugmentOutcome augment_with_noise(const AudioBuffer& signal, const NoiseSpec& spec) {
  if (signal.empty()) return skip(SkipReason::kEmpty);
  if (mean_power(signal.samples) == 0.0) return skip(SkipReason::kZeroSignal);
  const std::int64_t n_noise =
      resampled_length(signal.size(), signal.sample_rate, spec.noise_sample_rate);
  return augment_with_noise(signal, generate_white_noise(n_noise, spec), spec);
}

AugmentOutcome augment_with_noise(const AudioBuffer& signal, const AudioBuffer& noise,
                                  const NoiseSpec& spec) {
  if (signal.empty()) return skip(SkipReason::kEmpty);
  const double signal_power = mean_power(signal.samples);
  if (signal_power == 0.0) return skip(SkipReason::kZeroSignal);

  const AudioBuffer at_rate = resample(noise, signal.sample_rate);
  if (at_rate.size() > signal.size()) return skip(SkipReason::kNoiseTooLong);
  if (at_rate.empty()) return skip(SkipReason::kZeroNoise);

  Eigen::VectorXd tiled(signal.size());
  for (Eigen::Index i = 0; i < tiled.size(); ++i) tiled[i] = at_rate.samples[i % at_rate.size()];
  const double noise_power = mean_power(tiled);
  if (noise_power == 0.0) return skip(SkipReason::kZeroNoise);

  AugmentOutcome o;
  o.noise_gain = std::sqrt(signal_power / (noise_power * std::pow(10.0, spec.target_snr_db / 10.0)));
  tiled *= o.noise_gain;
  const Eigen::VectorXd mixed = (signal.samples.cast<double>() + tiled).cwiseMax(-1.0).cwiseMin(1.0);
  o.audio = AudioBuffer(mixed.cast<float>(), signal.sample_rate);
  o.added_noise = AudioBuffer(tiled.cast<float>(), signal.sample_rate);
  return o;
}

CorpusManifest augment_manifest(const CorpusManifest& m, const NoiseSpec& spec,
                                AugmentSummary* summary, int workers) {
  std::vector<std::optional<Utterance>> copies(m.utterances.size());
  parallel_for(m.utterances.size(), workers, [&](std::size_t i) {
    const Utterance& u = m.utterances[i];
    if (u.augmented) return;
    NoiseSpec item = spec;
    item.seed = derive_seed(spec.seed, u.id);
    AugmentOutcome outcome = augment_with_noise(m.load_audio(u), item);
    if (!outcome.ok()) return;
    Utterance copy = u;
    copy.id = u.id + std::string(kAugmentSuffix);
    copy.audio_path.clear();
    copy.background = Background::kWhiteNoise;
    copy.augmented = true;
    copy.num_samples = outcome.audio->size();
    copy.sample_rate = outcome.audio->sample_rate;
    copy.audio = std::make_shared<const AudioBuffer>(std::move(*outcome.audio));
    copies[i] = std::move(copy);
  });

  CorpusManifest out{m.name, m.utterances, m.root};
  AugmentSummary counts;
  for (std::size_t i = 0; i < copies.size(); ++i) {
    if (copies[i]) {
      out.utterances.push_back(std::move(*copies[i]));
      ++counts.augmented;
    } else if (!m.utterances[i].augmented) {
      ++counts.skipped;
    }
  }
  if (summary) *summary = counts;
  return out;
}

}  // namespace forge
