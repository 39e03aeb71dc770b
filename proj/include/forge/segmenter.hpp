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

#ifndef FORGE_SEGMENTER_HPP_
#define FORGE_SEGMENTER_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "forge/audio.hpp"
#include "forge/corpus.hpp"

namespace forge {

/// Half-open sample range [start, end) of sub-threshold audio.
struct SilenceSpan {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - start; }
  bool operator==(const SilenceSpan&) const = default;
};

struct SegmentSpec {
  double max_duration_s = 30.0;
  double min_duration_s = 5.0;
  double silence_threshold_dbfs = -40.0;
  double silence_min_gap_s = 1.0;
  double frame_ms = 20.0;
  /// Window at the end of each chunk in which a cut at a quiet region is
  /// preferred over a hard cut.
  double cut_search_s = 5.0;
  /// Minimum share of non-space transcript codepoints in U+0900..U+097F.
  double min_devanagari_ratio = 0.5;

  /// Throws InvalidArgument when the bounds are inconsistent.
  void validate() const;
  std::int64_t frame_samples(int sample_rate) const;
};

/// Frame level in dBFS (20 log10 RMS, full scale = 1.0); -inf for silence.
template <typename Derived>
double rms_dbfs(const Eigen::MatrixBase<Derived>& frame) {
  const double p = mean_power(frame);
  return p > 0.0 ? 10.0 * std::log10(p) : -std::numeric_limits<double>::infinity();
}

/// Per-frame quiet flags over consecutive non-overlapping frames; the last
/// frame may be partial.
std::vector<bool> quiet_frames(const AudioBuffer& buf, std::int64_t begin, std::int64_t end,
                               const SegmentSpec& spec);

/// Maximal runs of quiet frames longer than `silence_min_gap_s`. Edges are
/// refined to sample accuracy inside the neighbouring loud frames.
std::vector<SilenceSpan> detect_silences(const AudioBuffer& buf, const SegmentSpec& spec);

/// Keeps the complement of `spans`. Throws InvalidArgument for unsorted,
/// overlapping, empty or out-of-range spans.
AudioBuffer strip_silences(const AudioBuffer& buf, const std::vector<SilenceSpan>& spans);

/// Splits into chunks of at most `max_duration_s`. Each cut goes to the
/// middle of the longest quiet region inside the last `cut_search_s` of the
/// window when there is one; otherwise the cut is hard at the maximum.
std::vector<AudioBuffer> chunk(const AudioBuffer& buf, const SegmentSpec& spec);

/// Chunk boundaries as sample offsets (first is 0, last is the size).
std::vector<std::int64_t> chunk_boundaries(const AudioBuffer& buf, const SegmentSpec& spec);

enum class RejectReason { kTooShort, kTooLong, kEmptyTranscript, kLabelScript };

std::string to_string(RejectReason reason);

struct Rejection {
  Utterance utterance;
  RejectReason reason;
};

struct FilterResult {
  std::vector<Utterance> kept;
  std::vector<Rejection> rejected;
};

/// Share of non-whitespace codepoints in the Devanagari block.
double devanagari_ratio(const std::string& text);

/// Keeps utterances inside the duration bounds whose trimmed transcript is
/// non-empty and mostly Devanagari. Input order is preserved on both sides.
FilterResult filter_segments(const std::vector<Utterance>& utterances, const SegmentSpec& spec);

/// Splits a transcript into `weights.size()` parts at word boundaries, each
/// part receiving a share of words proportional to its weight.
std::vector<std::string> split_transcript(const std::string& transcript,
                                          const std::vector<double>& weights);

}  // namespace forge

#endif  // FORGE_SEGMENTER_HPP_
