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

#include "forge/segmenter.hpp"

#include <algorithm>
#include <cmath>

#include "forge/error.hpp"
#include "forge/metrics.hpp"

namespace forge {

void SegmentSpec::validate() const {
  if (!(min_duration_s > 0.0 && min_duration_s < max_duration_s)) {
    throw InvalidArgument("segment spec: require 0 < min_duration_s < max_duration_s");
  }
  if (!(frame_ms > 0.0)) throw InvalidArgument("segment spec: frame_ms must be positive");
  if (!(silence_min_gap_s >= 0.0)) throw InvalidArgument("segment spec: negative silence gap");
  if (!(cut_search_s >= 0.0)) throw InvalidArgument("segment spec: negative cut search window");
  if (!(min_devanagari_ratio >= 0.0 && min_devanagari_ratio <= 1.0)) {
    throw InvalidArgument("segment spec: devanagari ratio must lie in [0, 1]");
  }
}

std::int64_t SegmentSpec::frame_samples(int sample_rate) const {
  return std::max<std::int64_t>(1, std::llround(frame_ms * sample_rate / 1000.0));
}

std::vector<bool> quiet_frames(const AudioBuffer& buf, std::int64_t begin, std::int64_t end,
                               const SegmentSpec& spec) {
  const std::int64_t frame = spec.frame_samples(buf.sample_rate);
  std::vector<bool> quiet;
  if (end <= begin) return quiet;
  quiet.reserve(static_cast<std::size_t>((end - begin + frame - 1) / frame));
  for (std::int64_t s = begin; s < end; s += frame) {
    const std::int64_t len = std::min(frame, end - s);
    quiet.push_back(rms_dbfs(buf.samples.segment(s, len)) < spec.silence_threshold_dbfs);
  }
  return quiet;
}

std::vector<SilenceSpan> detect_silences(const AudioBuffer& buf, const SegmentSpec& spec) {
  std::vector<SilenceSpan> spans;
  const std::int64_t n = buf.size();
  if (n == 0) return spans;
  const std::int64_t frame = spec.frame_samples(buf.sample_rate);
  const std::vector<bool> quiet = quiet_frames(buf, 0, n, spec);
  const double amplitude = std::pow(10.0, spec.silence_threshold_dbfs / 20.0);
  const auto soft = [&](std::int64_t i) { return std::abs(buf.samples[i]) < amplitude; };

  const auto frames = static_cast<std::int64_t>(quiet.size());
  std::int64_t f = 0;
  while (f < frames) {
    if (!quiet[f]) {
      ++f;
      continue;
    }
    std::int64_t g = f;
    while (g < frames && quiet[g]) ++g;
    SilenceSpan span{f * frame, std::min(g * frame, n)};
    // Pull the edges into the adjacent loud frames, at most one frame each.
    const std::int64_t floor_start = std::max<std::int64_t>(0, span.start - frame);
    while (span.start > floor_start && soft(span.start - 1)) --span.start;
    const std::int64_t ceil_end = std::min(n, span.end + frame);
    while (span.end < ceil_end && soft(span.end)) ++span.end;
    if (static_cast<double>(span.length()) / buf.sample_rate > spec.silence_min_gap_s) {
      spans.push_back(span);
    }
    f = g;
  }
  return spans;
}

AudioBuffer strip_silences(const AudioBuffer& buf, const std::vector<SilenceSpan>& spans) {
  std::int64_t removed = 0;
  std::int64_t prev_end = 0;
  for (const auto& s : spans) {
    if (s.start >= s.end) throw InvalidArgument("strip_silences: empty or inverted span");
    if (s.start < prev_end) throw InvalidArgument("strip_silences: spans overlap or are unsorted");
    if (s.end > buf.size()) throw InvalidArgument("strip_silences: span beyond end of buffer");
    removed += s.length();
    prev_end = s.end;
  }
  AudioBuffer out(AudioBuffer::Samples(buf.size() - removed), buf.sample_rate);
  std::int64_t cursor = 0, written = 0;
  const auto keep = [&](std::int64_t from, std::int64_t to) {
    if (to <= from) return;
    out.samples.segment(written, to - from) = buf.samples.segment(from, to - from);
    written += to - from;
  };
  for (const auto& s : spans) {
    keep(cursor, s.start);
    cursor = s.end;
  }
  keep(cursor, buf.size());
  return out;
}

std::vector<std::int64_t> chunk_boundaries(const AudioBuffer& buf, const SegmentSpec& spec) {
  const std::int64_t n = buf.size();
  const std::int64_t max_len =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(spec.max_duration_s * buf.sample_rate)));
  const std::int64_t search = std::llround(spec.cut_search_s * buf.sample_rate);
  const std::int64_t frame = spec.frame_samples(buf.sample_rate);

  std::vector<std::int64_t> bounds{0};
  std::int64_t pos = 0;
  while (n - pos > max_len) {
    const std::int64_t window_end = pos + max_len;
    const std::int64_t search_begin = std::max(pos, window_end - search);
    const std::vector<bool> quiet = quiet_frames(buf, search_begin, window_end, spec);

    // Longest quiet run, latest on ties.
    std::int64_t best_start = -1, best_len = 0;
    const auto frames = static_cast<std::int64_t>(quiet.size());
    for (std::int64_t f = 0; f < frames;) {
      if (!quiet[f]) {
        ++f;
        continue;
      }
      std::int64_t g = f;
      while (g < frames && quiet[g]) ++g;
      const std::int64_t start = search_begin + f * frame;
      const std::int64_t len = std::min(search_begin + g * frame, window_end) - start;
      if (len >= best_len) {
        best_start = start;
        best_len = len;
      }
      f = g;
    }
    std::int64_t cut = window_end;
    if (best_start >= 0) {
      const std::int64_t mid = best_start + best_len / 2;
      if (mid > pos && mid <= window_end) cut = mid;
    }
    bounds.push_back(cut);
    pos = cut;
  }
  if (n > 0) bounds.push_back(n);
  return bounds;
}

std::vector<AudioBuffer> chunk(const AudioBuffer& buf, const SegmentSpec& spec) {
  const auto bounds = chunk_boundaries(buf, spec);
  std::vector<AudioBuffer> chunks;
  for (std::size_t k = 1; k < bounds.size(); ++k) {
    const std::int64_t len = bounds[k] - bounds[k - 1];
    chunks.emplace_back(buf.samples.segment(bounds[k - 1], len), buf.sample_rate);
  }
  return chunks;
}

std::string to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kTooShort: return "too-short";
    case RejectReason::kTooLong: return "too-long";
    case RejectReason::kEmptyTranscript: return "empty-transcript";
    case RejectReason::kLabelScript: return "label-script";
  }
  return "unknown";
}

double devanagari_ratio(const std::string& text) {
  std::size_t total = 0, devanagari = 0;
  for (char32_t c : to_codepoints(text)) {
    if (is_whitespace(c)) continue;
    ++total;
    if (c >= 0x0900 && c <= 0x097F) ++devanagari;
  }
  return total == 0 ? 0.0 : static_cast<double>(devanagari) / static_cast<double>(total);
}

FilterResult filter_segments(const std::vector<Utterance>& utterances, const SegmentSpec& spec) {
  FilterResult result;
  for (const auto& u : utterances) {
    const double d = u.duration_seconds();
    std::optional<RejectReason> reason;
    if (d < spec.min_duration_s) {
      reason = RejectReason::kTooShort;
    } else if (d > spec.max_duration_s) {
      reason = RejectReason::kTooLong;
    } else if (tokenize(u.transcript).empty()) {
      reason = RejectReason::kEmptyTranscript;
    } else if (devanagari_ratio(u.transcript) < spec.min_devanagari_ratio) {
      reason = RejectReason::kLabelScript;
    }
    if (reason) {
      result.rejected.push_back({u, *reason});
    } else {
      result.kept.push_back(u);
    }
  }
  return result;
}

std::vector<std::string> split_transcript(const std::string& transcript,
                                          const std::vector<double>& weights) {
  std::vector<std::string> parts(weights.size());
  if (weights.empty()) return parts;
  const auto words = tokenize(transcript);
  double total = 0.0;
  for (double w : weights) total += std::max(0.0, w);
  const auto nw = static_cast<double>(words.size());
  double acc = 0.0;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += std::max(0.0, weights[k]);
    const std::size_t end = k + 1 == weights.size() || total <= 0.0
                                ? words.size()
                                : std::min(words.size(), static_cast<std::size_t>(std::llround(acc / total * nw)));
    for (std::size_t i = begin; i < end; ++i) {
      if (i > begin) parts[k] += ' ';
      parts[k] += words[i];
    }
    begin = std::max(begin, end);
  }
  return parts;
}

}  // namespace forge
