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

#include "forge/splitter.hpp"

#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/random.hpp"

namespace forge {
namespace {

// Stream offsets so the three shuffles never share a sequence.
constexpr std::uint64_t kEvalStream = 0x6576616C5F737472ull;

using Group = std::vector<std::size_t>;

std::vector<Group> group_by_base(const std::vector<Utterance>& utts) {
  std::vector<Group> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    auto [it, inserted] = index.try_emplace(base_id(utts[i].id), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

/// Shuffles groups and keeps whole groups while they fit under `cap`.
std::vector<Group> capped(std::vector<Group> groups, std::size_t cap, std::uint64_t seed,
                          bool* applied) {
  SplitMix64 rng(mix64(seed ^ kEvalStream));
  seeded_shuffle(groups, rng);
  std::size_t total = 0;
  for (const auto& g : groups) total += g.size();
  *applied = total > cap;
  if (!*applied) return groups;
  std::vector<Group> kept;
  std::size_t count = 0;
  for (auto& g : groups) {
    if (count + g.size() > cap) continue;
    count += g.size();
    kept.push_back(std::move(g));
  }
  return kept;
}

CorpusManifest gather(const CorpusManifest& m, const std::vector<Group>& groups,
                      const std::string& suffix) {
  CorpusManifest out{m.name + suffix, {}, m.root};
  for (const auto& g : groups) {
    for (std::size_t i : g) out.utterances.push_back(m.utterances[i]);
  }
  return out;
}

// n * fraction lands a few ulps off an integer often enough (10 * 0.3 is
// 3.0000000000000004) that the raw floor/ceil would be off by one.
constexpr double kRoundingSlack = 1e-9;

std::size_t floor_count(double x) { return static_cast<std::size_t>(std::floor(x + kRoundingSlack)); }
std::size_t ceil_count(double x) { return static_cast<std::size_t>(std::ceil(x - kRoundingSlack)); }

std::size_t count(const std::vector<Group>& groups) {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

}  // namespace

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("split: train fraction must lie in (0, 1)");
  }
  if (!(eval_cap_fraction_of_train > 0.0 && eval_cap_fraction_of_train <= 1.0)) {
    throw InvalidArgument("split: eval cap must lie in (0, 1]");
  }
}

std::string SplitReport::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["counts"] = {{"input", input}, {"train", train}, {"eval", eval},
                 {"eval_pool", eval_pool}, {"eval_cap", eval_cap}};
  j["cap_applied"] = cap_applied;
  return j.dump(2);
}

SplitResult split(const CorpusManifest& m, const SplitSpec& spec) {
  spec.validate();
  if (m.empty()) throw InvalidArgument("split: manifest '" + m.name + "' is empty");

  std::vector<Group> groups = group_by_base(m.utterances);
  SplitMix64 rng(spec.seed);
  seeded_shuffle(groups, rng);

  const auto target = floor_count(static_cast<double>(m.size()) * spec.train_fraction);
  std::vector<Group> train, pool;
  std::size_t train_count = 0;
  for (auto& g : groups) {
    if (train_count + g.size() <= target) {
      train_count += g.size();
      train.push_back(std::move(g));
    } else {
      pool.push_back(std::move(g));
    }
  }

  SplitResult r;
  r.report.seed = spec.seed;
  r.report.input = m.size();
  r.report.eval_pool = count(pool);
  r.report.eval_cap = ceil_count(static_cast<double>(train_count) * spec.eval_cap_fraction_of_train);
  const auto eval = capped(std::move(pool), r.report.eval_cap, spec.seed, &r.report.cap_applied);
  r.train = gather(m, train, "-train");
  r.eval = gather(m, eval, "-eval");
  r.report.train = r.train.size();
  r.report.eval = r.eval.size();
  return r;
}

SplitResult cap_eval_pool(const CorpusManifest& train, const CorpusManifest& pool,
                          const SplitSpec& spec) {
  spec.validate();
  std::vector<Group> train_groups = group_by_base(train.utterances);
  SplitMix64 rng(spec.seed);
  seeded_shuffle(train_groups, rng);

  SplitResult r;
  r.report.seed = spec.seed;
  r.report.input = train.size() + pool.size();
  r.report.eval_pool = pool.size();
  r.report.eval_cap = ceil_count(static_cast<double>(train.size()) * spec.eval_cap_fraction_of_train);
  const auto eval = capped(group_by_base(pool.utterances), r.report.eval_cap, spec.seed,
                           &r.report.cap_applied);
  r.train = gather(train, train_groups, "");
  r.eval = gather(pool, eval, "");
  r.report.train = r.train.size();
  r.report.eval = r.eval.size();
  return r;
}

}  // namespace forge
