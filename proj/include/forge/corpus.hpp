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

#ifndef FORGE_CORPUS_HPP_
#define FORGE_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forge/audio.hpp"
#include "forge/metrics.hpp"

namespace forge {

enum class Gender { kMale, kFemale, kUnknown };
enum class Background { kClean, kWhiteNoise, kCrowded, kUnknown };
enum class Sentiment { kHappy, kSad, kNormal, kAngry, kUnknown };

std::string to_string(Gender g);
std::string to_string(Background b);
std::string to_string(Sentiment s);
/// Unrecognised or empty text maps to kUnknown.
Gender parse_gender(std::string_view text);
Background parse_background(std::string_view text);
Sentiment parse_sentiment(std::string_view text);

/// Suffix appended to the id of a noise-augmented copy.
inline constexpr std::string_view kAugmentSuffix = "#aug-wn";

/// Id of the original an augmented copy was made from (identity otherwise).
std::string base_id(std::string_view id);

/// One corpus row: a segment of audio plus its transcript and metadata.
struct Utterance {
  std::string id;
  /// Relative to the manifest root, or absolute.
  std::filesystem::path audio_path;
  std::string transcript;
  std::int64_t num_samples = 0;
  int sample_rate = kCorpusSampleRate;
  Gender gender = Gender::kUnknown;
  std::optional<int> age;
  Background background = Background::kUnknown;
  Sentiment sentiment = Sentiment::kUnknown;
  std::string source;
  bool augmented = false;
  /// Unrecognised metadata.csv columns, carried through untouched.
  std::map<std::string, std::string> extra;
  /// Audio not yet written to disk; takes precedence over audio_path.
  std::shared_ptr<const AudioBuffer> audio;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(num_samples) / sample_rate : 0.0;
  }

  /// Field-wise equality; the in-memory payload is ignored.
  bool operator==(const Utterance& other) const;
};

struct CorpusManifest {
  std::string name;
  std::vector<Utterance> utterances;
  std::filesystem::path root;

  std::filesystem::path resolve(const Utterance& u) const { return root / u.audio_path; }
  AudioBuffer load_audio(const Utterance& u) const;
  double total_seconds() const;
  std::size_t size() const { return utterances.size(); }
  bool empty() const { return utterances.empty(); }
};

/// Ids become file names (`wavs/<id>.wav`), so they must be non-empty and
/// free of path separators and control characters.
bool is_valid_id(std::string_view id);

inline constexpr std::string_view kMetadataFile = "metadata.csv";
inline constexpr std::string_view kAudioDir = "wavs";

/// Column order of metadata.csv; extra columns follow in sorted order.
const std::vector<std::string>& metadata_columns();

/// Writes `<dir>/wavs/<id>.wav` for every utterance plus `<dir>/metadata.csv`
/// and returns the manifest as it now exists on disk. In-memory audio is
/// encoded as PCM16; file-backed audio is copied byte for byte.
/// Throws IntegrityError for duplicate or unusable ids, IoError when the
/// directory cannot be written.
CorpusManifest write_audiofolder(const CorpusManifest& m, const std::filesystem::path& dir);

/// Inverse of write_audiofolder. Only `file_name` and `transcription` are
/// required; other known columns default to unknown. Durations come from
/// the WAV headers. Throws IntegrityError listing every row whose audio is
/// missing or unreadable.
CorpusManifest read_audiofolder(const std::filesystem::path& dir);

/// Concatenates manifests; ids become `<manifest name>:<id>` and audio
/// paths are made absolute so that the result needs no common root.
CorpusManifest merge(std::span<const CorpusManifest> manifests, std::string name);

struct SourceDuration {
  std::string source;
  std::int64_t utterances = 0;
  double seconds = 0.0;
  double hours() const { return seconds / 3600.0; }
};

/// Per-source totals in first-appearance order. Sample counts are summed
/// per rate before conversion, so totals are exact up to one rounding.
std::vector<SourceDuration> duration_report(const CorpusManifest& m);

/// Two-decimal rendering used by the duration table.
std::string format_hours(double hours);

/// Excluded function words for vocabulary counts.
struct StopList {
  std::set<std::string> words;

  /// One token per line, UTF-8; blank lines and '#' comments are skipped.
  static StopList load(const std::filesystem::path& path, const NormalizationSpec& spec = {});
  static StopList from_words(const std::vector<std::string>& words,
                             const NormalizationSpec& spec = {});
  bool contains(const std::string& token) const { return words.contains(token); }
};

struct WordStats {
  std::size_t unique_count = 0;
  std::size_t token_count = 0;
  /// Sorted by descending count, then by token.
  std::vector<std::pair<std::string, std::size_t>> frequencies;
};

WordStats unique_word_stats(const CorpusManifest& m, const StopList& stop,
                            const NormalizationSpec& spec = {});

}  // namespace forge

#endif  // FORGE_CORPUS_HPP_
