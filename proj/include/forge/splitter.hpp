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

#ifndef FORGE_SPLITTER_HPP_
#define FORGE_SPLITTER_HPP_

#include <cstdint>
#include <string>

#include "forge/corpus.hpp"

namespace forge {

struct SplitSpec {
  double train_fraction = 0.8;
  /// Evaluation sets hold at most ceil(|train| * this) utterances.
  double eval_cap_fraction_of_train = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitReport {
  std::uint64_t seed = 0;
  std::size_t input = 0;
  std::size_t train = 0;
  std::size_t eval = 0;
  std::size_t eval_pool = 0;  // before the cap
  std::size_t eval_cap = 0;
  bool cap_applied = false;

  std::string to_json() const;
};

struct SplitResult {
  CorpusManifest train;
  CorpusManifest eval;
  SplitReport report;
};

/// Seeded train/eval partition.
///
/// Utterances are grouped by base id so that an "#aug-wn" copy always lands
/// on the same side as its original. Groups are permuted with
/// Fisher-Yates (SplitMix64 stream `seed`); walking that order, a group
/// joins train while it fits under floor(n * train_fraction), otherwise it
/// goes to eval. Eval is then reshuffled on an independent stream and
/// capped at ceil(|train| * eval_cap_fraction_of_train), dropping whole
/// groups. Throws InvalidArgument for an empty manifest.
SplitResult split(const CorpusManifest& m, const SplitSpec& spec);

/// Caps an externally assembled evaluation pool against a training set:
/// the pool is shuffled and truncated to ceil(|train| * cap) utterances.
SplitResult cap_eval_pool(const CorpusManifest& train, const CorpusManifest& pool,
                          const SplitSpec& spec);

}  // namespace forge

#endif  // FORGE_SPLITTER_HPP_
