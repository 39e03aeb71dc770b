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

#ifndef FORGE_METRICS_HPP_
#define FORGE_METRICS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

enum class DigitPolicy { kKeep, kToDevanagari, kToAscii };

std::string to_string(DigitPolicy p);
DigitPolicy parse_digit_policy(std::string_view text);

/// Text is always brought to NFC; the remaining steps are switchable.
struct NormalizationSpec {
  bool strip_punctuation = true;
  DigitPolicy digit_policy = DigitPolicy::kToDevanagari;
  bool collapse_whitespace = true;
};

/// NFC, punctuation (general category P* plus the danda marks) replaced by
/// a space, ASCII/Devanagari digits unified per policy, whitespace runs
/// collapsed and the ends trimmed. Idempotent. Invalid UTF-8 sequences are
/// replaced with U+FFFD.
std::string normalize(std::string_view text, const NormalizationSpec& spec = {});

/// Splits on whitespace; never yields empty tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Decodes UTF-8 into codepoints (invalid bytes become U+FFFD).
std::u32string to_codepoints(std::string_view text);
std::string to_utf8(std::u32string_view text);

/// Unicode White_Space property.
bool is_whitespace(char32_t c);

enum class EditOp : std::uint8_t { kMatch, kSubstitute, kDelete, kInsert };

char to_char(EditOp op);

/// One aligned position. Deletions have no hypothesis index, insertions no
/// reference index.
struct AlignedPair {
  EditOp op;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;

  bool operator==(const AlignedPair&) const = default;
};

struct AlignmentResult {
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_len = 0;
  std::vector<AlignedPair> alignment;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  /// (S + D + I) / N; undefined (NaN) when the reference is empty.
  double error_rate() const;
};

/// Unit-cost Levenshtein alignment. Backtrace ties prefer the diagonal
/// (match or substitution), then a deletion, then an insertion, so the
/// alignment itself is reproducible and not only its cost.
template <typename T>
AlignmentResult align_sequences(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::uint32_t> cost((n + 1) * w);
  for (std::size_t j = 0; j <= m; ++j) cost[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cost[i * w] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = cost[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0u : 1u);
      const std::uint32_t del = cost[(i - 1) * w + j] + 1u;
      const std::uint32_t ins = cost[i * w + j - 1] + 1u;
      cost[i * w + j] = std::min(diag, std::min(del, ins));
    }
  }

  AlignmentResult r;
  r.ref_len = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = cost[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (cost[(i - 1) * w + j - 1] + (same ? 0u : 1u) == here) {
        r.alignment.push_back({same ? EditOp::kMatch : EditOp::kSubstitute, i - 1, j - 1});
        ++(same ? r.matches : r.substitutions);
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && cost[(i - 1) * w + j] + 1u == here) {
      r.alignment.push_back({EditOp::kDelete, i - 1, std::nullopt});
      ++r.deletions;
      --i;
      continue;
    }
    r.alignment.push_back({EditOp::kInsert, std::nullopt, j - 1});
    ++r.insertions;
    --j;
  }
  std::reverse(r.alignment.begin(), r.alignment.end());
  return r;
}

AlignmentResult align(std::span<const std::string> ref, std::span<const std::string> hyp);

/// Normalized, tokenized word alignment of two transcripts.
AlignmentResult align_text(std::string_view ref, std::string_view hyp,
                           const NormalizationSpec& spec = {});

struct PairScore {
  std::size_t index = 0;
  AlignmentResult result;
  /// False when the normalized reference is empty; such pairs are left out
  /// of the pooled totals.
  bool scored = true;
};

struct CorpusWer {
  std::size_t errors = 0;
  std::size_t ref_words = 0;
  std::vector<PairScore> pairs;
  std::vector<std::string> warnings;

  /// Pooled rate: sum of errors over sum of reference words (NaN if none).
  double wer() const;
};

struct TranscriptPair {
  std::string ref;
  std::string hyp;
};

CorpusWer corpus_wer(std::span<const TranscriptPair> pairs, const NormalizationSpec& spec = {});

/// Codepoint-level edit distance over normalized strings divided by the
/// reference length. Throws UndefinedMetric for an empty reference.
double cer(std::string_view ref, std::string_view hyp, const NormalizationSpec& spec = {});

}  // namespace forge

#endif  // FORGE_METRICS_HPP_
