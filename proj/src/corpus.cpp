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

#include "forge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "forge/csv.hpp"
#include "forge/error.hpp"

namespace fs = std::filesystem;

namespace forge {

std::string to_string(Gender g) {
  switch (g) {
    case Gender::kMale: return "male";
    case Gender::kFemale: return "female";
    case Gender::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(Background b) {
  switch (b) {
    case Background::kClean: return "clean";
    case Background::kWhiteNoise: return "white_noise";
    case Background::kCrowded: return "crowded";
    case Background::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string to_string(Sentiment s) {
  switch (s) {
    case Sentiment::kHappy: return "happy";
    case Sentiment::kSad: return "sad";
    case Sentiment::kNormal: return "normal";
    case Sentiment::kAngry: return "angry";
    case Sentiment::kUnknown: return "unknown";
  }
  return "unknown";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

Gender parse_gender(std::string_view text) {
  const std::string t = lower(text);
  if (t == "male" || t == "m") return Gender::kMale;
  if (t == "female" || t == "f") return Gender::kFemale;
  return Gender::kUnknown;
}

Background parse_background(std::string_view text) {
  const std::string t = lower(text);
  if (t == "clean") return Background::kClean;
  if (t == "white_noise" || t == "white noise") return Background::kWhiteNoise;
  if (t == "crowded") return Background::kCrowded;
  return Background::kUnknown;
}

Sentiment parse_sentiment(std::string_view text) {
  const std::string t = lower(text);
  if (t == "happy") return Sentiment::kHappy;
  if (t == "sad") return Sentiment::kSad;
  if (t == "normal") return Sentiment::kNormal;
  if (t == "angry") return Sentiment::kAngry;
  return Sentiment::kUnknown;
}

std::string base_id(std::string_view id) {
  if (id.ends_with(kAugmentSuffix)) id.remove_suffix(kAugmentSuffix.size());
  return std::string(id);
}

bool Utterance::operator==(const Utterance& o) const {
  return id == o.id && audio_path == o.audio_path && transcript == o.transcript &&
         num_samples == o.num_samples && sample_rate == o.sample_rate && gender == o.gender &&
         age == o.age && background == o.background && sentiment == o.sentiment &&
         source == o.source && augmented == o.augmented && extra == o.extra;
}

AudioBuffer CorpusManifest::load_audio(const Utterance& u) const {
  if (u.audio) return *u.audio;
  return read_wav_file(resolve(u));
}

double CorpusManifest::total_seconds() const {
  double total = 0.0;
  for (const auto& d : duration_report(*this)) total += d.seconds;
  return total;
}

bool is_valid_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::none_of(id.begin(), id.end(), [](char c) {
    return c == '/' || c == '\\' || static_cast<unsigned char>(c) < 0x20;
  });
}

const std::vector<std::string>& metadata_columns() {
  static const std::vector<std::string> columns{
      "file_name", "transcription", "gender", "age", "background", "sentiment", "source", "augmented"};
  return columns;
}

namespace {

std::string audio_file_name(const std::string& id) {
  return std::string(kAudioDir) + "/" + id + ".wav";
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<int> parse_age(std::string_view text, std::size_t row) {
  if (text.empty()) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) {
    throw FormatError("metadata.csv row " + std::to_string(row) + ": invalid age '" +
                      std::string(text) + "'");
  }
  return value;
}

}  // namespace

CorpusManifest write_audiofolder(const CorpusManifest& m, const fs::path& dir) {
  std::unordered_set<std::string> seen;
  for (const auto& u : m.utterances) {
    if (!is_valid_id(u.id)) throw IntegrityError("utterance id '" + u.id + "' cannot be a file name");
    if (!seen.insert(u.id).second) {
      throw IntegrityError("duplicate file_name " + audio_file_name(u.id));
    }
  }

  std::error_code ec;
  fs::create_directories(dir / kAudioDir, ec);
  if (ec) throw IoError("cannot create " + (dir / kAudioDir).string() + ": " + ec.message());

  std::set<std::string> extra_keys;
  for (const auto& u : m.utterances) {
    for (const auto& [k, v] : u.extra) extra_keys.insert(k);
  }
  csv::Row header = metadata_columns();
  header.insert(header.end(), extra_keys.begin(), extra_keys.end());
  std::string text = csv::format_row(header);

  CorpusManifest out{m.name, {}, dir};
  out.utterances.reserve(m.utterances.size());
  for (const auto& u : m.utterances) {
    const std::string file_name = audio_file_name(u.id);
    const fs::path target = dir / file_name;
    Utterance written = u;
    written.audio_path = file_name;
    written.audio.reset();
    if (u.audio) {
      write_wav_file(target, *u.audio);
      written.num_samples = u.audio->size();
      written.sample_rate = u.audio->sample_rate;
    } else {
      const fs::path source = m.resolve(u);
      if (!fs::exists(source)) {
        throw IntegrityError("utterance '" + u.id + "': audio " + source.string() + " not found");
      }
      if (!fs::exists(target) || !fs::equivalent(source, target)) {
        fs::copy_file(source, target, fs::copy_options::overwrite_existing, ec);
        if (ec) throw IoError("cannot copy " + source.string() + ": " + ec.message());
      }
    }

    csv::Row row{file_name,
                 u.transcript,
                 to_string(u.gender),
                 u.age ? std::to_string(*u.age) : std::string(),
                 to_string(u.background),
                 to_string(u.sentiment),
                 u.source,
                 u.augmented ? "true" : "false"};
    for (const auto& key : extra_keys) {
      const auto it = u.extra.find(key);
      row.push_back(it == u.extra.end() ? std::string() : it->second);
    }
    text += csv::format_row(row);
    out.utterances.push_back(std::move(written));
  }
  write_text_atomic(dir / kMetadataFile, text);
  return out;
}

CorpusManifest read_audiofolder(const fs::path& dir) {
  const fs::path meta = dir / kMetadataFile;
  if (!fs::exists(meta)) throw IntegrityError("missing " + meta.string());
  std::ifstream in(meta, std::ios::binary);
  if (!in) throw IoError("cannot open " + meta.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto rows = csv::parse(buffer.str());
  if (rows.empty()) throw FormatError(meta.string() + ": no header row");

  const csv::Row& header = rows.front();
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!col.emplace(header[i], i).second) {
      throw FormatError(meta.string() + ": duplicate column '" + header[i] + "'");
    }
  }
  for (const char* required : {"file_name", "transcription"}) {
    if (!col.contains(required)) {
      throw FormatError(meta.string() + ": missing required column '" + required + "'");
    }
  }
  const std::set<std::string> known(metadata_columns().begin(), metadata_columns().end());

  std::string name = dir.filename().string();
  if (name.empty() || name == ".") name = dir.parent_path().filename().string();
  CorpusManifest m{name, {}, dir};
  std::vector<std::string> problems;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != header.size()) {
      throw FormatError(meta.string() + " row " + std::to_string(line) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(row.size()));
    }
    const auto field = [&](const char* key) -> std::string {
      const auto it = col.find(key);
      return it == col.end() ? std::string() : row[it->second];
    };

    Utterance u;
    const std::string file_name = field("file_name");
    u.audio_path = file_name;
    u.id = fs::path(file_name).stem().string();
    u.transcript = field("transcription");
    u.gender = parse_gender(field("gender"));
    u.age = parse_age(field("age"), line);
    u.background = parse_background(field("background"));
    u.sentiment = parse_sentiment(field("sentiment"));
    u.source = field("source");
    u.augmented = lower(field("augmented")) == "true";
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (!known.contains(header[i]) && !row[i].empty()) u.extra[header[i]] = row[i];
    }
    if (!seen.insert(file_name).second) {
      throw IntegrityError(meta.string() + " row " + std::to_string(line) +
                           ": duplicate file_name " + file_name);
    }

    const fs::path audio = dir / u.audio_path;
    if (!fs::exists(audio)) {
      problems.push_back("row " + std::to_string(line) + " (" + file_name + "): audio file missing");
      continue;
    }
    try {
      const WavInfo info = probe_wav_file(audio);
      u.num_samples = info.frames;
      u.sample_rate = static_cast<int>(info.sample_rate);
    } catch (const Error& e) {
      problems.push_back("row " + std::to_string(line) + " (" + file_name + "): " + e.what());
      continue;
    }
    m.utterances.push_back(std::move(u));
  }
  if (!problems.empty()) {
    std::string msg = meta.string() + ": " + std::to_string(problems.size()) + " bad row(s): ";
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw IntegrityError(msg);
  }
  return m;
}

CorpusManifest merge(std::span<const CorpusManifest> manifests, std::string name) {
  CorpusManifest out{std::move(name), {}, {}};
  std::unordered_map<std::string, int> prefix_uses;
  for (const auto& m : manifests) {
    std::string prefix = m.name;
    if (const int uses = prefix_uses[m.name]++; uses > 0) prefix += "." + std::to_string(uses + 1);
    for (const auto& u : m.utterances) {
      Utterance v = u;
      v.id = prefix + ":" + u.id;
      if (!u.audio_path.empty()) v.audio_path = fs::absolute(m.resolve(u)).lexically_normal();
      if (v.source.empty()) v.source = m.name;
      out.utterances.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<SourceDuration> duration_report(const CorpusManifest& m) {
  struct Acc {
    std::int64_t count = 0;
    std::map<int, std::int64_t> samples_by_rate;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Acc> acc;
  for (const auto& u : m.utterances) {
    auto [it, inserted] = acc.try_emplace(u.source);
    if (inserted) order.push_back(u.source);
    ++it->second.count;
    it->second.samples_by_rate[u.sample_rate] += u.num_samples;
  }
  std::vector<SourceDuration> report;
  report.reserve(order.size());
  for (const auto& source : order) {
    const Acc& a = acc.at(source);
    SourceDuration d{source, a.count, 0.0};
    for (const auto& [rate, samples] : a.samples_by_rate) {
      if (rate > 0) d.seconds += static_cast<double>(samples) / rate;
    }
    report.push_back(d);
  }
  return report;
}

std::string format_hours(double hours) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", hours);
  return buf;
}

StopList StopList::from_words(const std::vector<std::string>& words, const NormalizationSpec& spec) {
  StopList stop;
  for (const auto& w : words) {
    for (auto& token : tokenize(normalize(w, spec))) stop.words.insert(std::move(token));
  }
  return stop;
}

StopList StopList::load(const fs::path& path, const NormalizationSpec& spec) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stoplist " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) continue;
    words.push_back(line);
  }
  return from_words(words, spec);
}

WordStats unique_word_stats(const CorpusManifest& m, const StopList& stop,
                            const NormalizationSpec& spec) {
  std::map<std::string, std::size_t> counts;
  WordStats stats;
  for (const auto& u : m.utterances) {
    for (auto& token : tokenize(normalize(u.transcript, spec))) {
      if (stop.contains(token)) continue;
      ++stats.token_count;
      ++counts[std::move(token)];
    }
  }
  stats.unique_count = counts.size();
  stats.frequencies.assign(counts.begin(), counts.end());
  std::stable_sort(stats.frequencies.begin(), stats.frequencies.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return stats;
}

}  // namespace forge
