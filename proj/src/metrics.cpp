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

#include "forge/metrics.hpp"

#include <cmath>
#include <limits>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "forge/error.hpp"

namespace forge {
namespace {

constexpr char32_t kReplacement = 0xFFFD;
constexpr char32_t kDanda = 0x0964;
constexpr char32_t kDoubleDanda = 0x0965;
constexpr char32_t kDevanagariZero = 0x0966;

std::string nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("icu", u_errorName(status), ExitCode::kFailure);
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
  const icu::UnicodeString out = norm->normalize(src, status);
  if (U_FAILURE(status)) throw Error("icu", u_errorName(status), ExitCode::kFailure);
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

bool is_punct(char32_t c) {
  return c == kDanda || c == kDoubleDanda || u_ispunct(static_cast<UChar32>(c));
}

char32_t map_digit(char32_t c, DigitPolicy policy) {
  switch (policy) {
    case DigitPolicy::kToDevanagari:
      if (c >= U'0' && c <= U'9') return kDevanagariZero + (c - U'0');
      break;
    case DigitPolicy::kToAscii:
      if (c >= kDevanagariZero && c <= kDevanagariZero + 9) return U'0' + (c - kDevanagariZero);
      break;
    case DigitPolicy::kKeep:
      break;
  }
  return c;
}

}  // namespace

bool is_whitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::string to_string(DigitPolicy p) {
  switch (p) {
    case DigitPolicy::kKeep: return "keep";
    case DigitPolicy::kToDevanagari: return "to_devanagari";
    case DigitPolicy::kToAscii: return "to_ascii";
  }
  return "keep";
}

DigitPolicy parse_digit_policy(std::string_view text) {
  if (text == "keep") return DigitPolicy::kKeep;
  if (text == "to_devanagari") return DigitPolicy::kToDevanagari;
  if (text == "to_ascii") return DigitPolicy::kToAscii;
  throw InvalidArgument("unknown digit policy '" + std::string(text) + "'");
}

std::u32string to_codepoints(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  while (i < text.size()) {
    const unsigned char b0 = byte(i);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (int k = 1; ok && k < len; ++k) {
      const unsigned char b = byte(i + k);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinForLen[] = {0, 0, 0x80, 0x800, 0x10000};
    if (ok && (cp < kMinForLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

std::string to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (char32_t c : text) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::string normalize(std::string_view text, const NormalizationSpec& spec) {
  // Round-trip through our decoder first so that invalid bytes become
  // U+FFFD the same way on every pass.
  const std::u32string composed = to_codepoints(nfc(to_utf8(to_codepoints(text))));

  std::u32string out;
  out.reserve(composed.size());
  bool pending_space = false;
  for (char32_t c : composed) {
    if (spec.strip_punctuation && is_punct(c)) c = U' ';
    c = map_digit(c, spec.digit_policy);
    if (spec.collapse_whitespace && is_whitespace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return nfc(to_utf8(out));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : to_codepoints(text)) {
    if (is_whitespace(c)) {
      if (!current.empty()) tokens.push_back(to_utf8(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(to_utf8(current));
  return tokens;
}

char to_char(EditOp op) {
  switch (op) {
    case EditOp::kMatch: return 'M';
    case EditOp::kSubstitute: return 'S';
    case EditOp::kDelete: return 'D';
    case EditOp::kInsert: return 'I';
  }
  return '?';
}

double AlignmentResult::error_rate() const {
  if (ref_len == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(errors()) / static_cast<double>(ref_len);
}

AlignmentResult align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  return align_sequences<std::string>(ref, hyp);
}

AlignmentResult align_text(std::string_view ref, std::string_view hyp,
                           const NormalizationSpec& spec) {
  const auto r = tokenize(normalize(ref, spec));
  const auto h = tokenize(normalize(hyp, spec));
  return align(r, h);
}

double CorpusWer::wer() const {
  if (ref_words == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(errors) / static_cast<double>(ref_words);
}

CorpusWer corpus_wer(std::span<const TranscriptPair> pairs, const NormalizationSpec& spec) {
  CorpusWer total;
  total.pairs.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    PairScore score;
    score.index = i;
    score.result = align_text(pairs[i].ref, pairs[i].hyp, spec);
    if (score.result.ref_len == 0) {
      score.scored = false;
      total.warnings.push_back("pair " + std::to_string(i) +
                               ": empty reference after normalization, excluded");
    } else {
      total.errors += score.result.errors();
      total.ref_words += score.result.ref_len;
    }
    total.pairs.push_back(std::move(score));
  }
  return total;
}

double cer(std::string_view ref, std::string_view hyp, const NormalizationSpec& spec) {
  const std::u32string r = to_codepoints(normalize(ref, spec));
  const std::u32string h = to_codepoints(normalize(hyp, spec));
  if (r.empty()) throw UndefinedMetric("CER undefined for an empty reference");
  const auto result = align_sequences<char32_t>(std::span<const char32_t>(r.data(), r.size()),
                                                std::span<const char32_t>(h.data(), h.size()));
  return result.error_rate();
}

}  // namespace forge
