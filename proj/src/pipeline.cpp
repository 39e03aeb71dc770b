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

#include "forge/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "forge/error.hpp"
#include "forge/parallel.hpp"

namespace fs = std::filesystem;

namespace forge {
namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string dir_name(const fs::path& dir) {
  std::string name = dir.filename().string();
  if (name.empty() || name == ".") name = dir.parent_path().filename().string();
  return name;
}

CorpusManifest scan_loose_wavs(const fs::path& dir) {
  CorpusManifest m{dir_name(dir), {}, dir};
  std::vector<fs::path> wavs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") wavs.push_back(entry.path());
  }
  std::sort(wavs.begin(), wavs.end());
  for (const auto& wav : wavs) {
    Utterance u;
    u.id = wav.stem().string();
    u.audio_path = wav.filename();
    fs::path txt = wav;
    txt.replace_extension(".txt");
    if (fs::exists(txt)) u.transcript = read_text(txt);
    m.utterances.push_back(std::move(u));
  }
  return m;
}

}  // namespace

CorpusManifest ingest(const fs::path& in_dir, const fs::path& out_dir, const IngestOptions& options) {
  if (!fs::is_directory(in_dir)) throw InvalidArgument("ingest: " + in_dir.string() + " is not a directory");
  CorpusManifest in = fs::exists(in_dir / kMetadataFile) ? read_audiofolder(in_dir) : scan_loose_wavs(in_dir);
  const std::string source = options.source.empty() ? dir_name(in_dir) : options.source;

  CorpusManifest staged{in.name, std::vector<Utterance>(in.utterances.size()), in.root};
  parallel_for(in.utterances.size(), options.workers, [&](std::size_t i) {
    Utterance u = in.utterances[i];
    const AudioBuffer audio = resample(in.load_audio(u), options.sample_rate);
    u.num_samples = audio.size();
    u.sample_rate = audio.sample_rate;
    u.audio = std::make_shared<const AudioBuffer>(audio);
    if (u.source.empty()) u.source = source;
    staged.utterances[i] = std::move(u);
  });
  return write_audiofolder(staged, out_dir);
}

CorpusManifest segment_corpus(const CorpusManifest& in, const SegmentSpec& spec,
                              SegmentSummary* summary, int workers) {
  spec.validate();
  struct Item {
    std::vector<Utterance> chunks;
    double removed_s = 0.0;
  };
  std::vector<Item> items(in.utterances.size());
  parallel_for(in.utterances.size(), workers, [&](std::size_t i) {
    const Utterance& u = in.utterances[i];
    const AudioBuffer audio = in.load_audio(u);
    if (audio.empty()) return;
    const auto spans = detect_silences(audio, spec);
    const AudioBuffer voiced = strip_silences(audio, spans);
    items[i].removed_s = audio.duration_seconds() - voiced.duration_seconds();
    if (voiced.empty()) return;
    const auto pieces = chunk(voiced, spec);
    std::vector<double> weights;
    for (const auto& p : pieces) weights.push_back(static_cast<double>(p.size()));
    const auto texts = split_transcript(u.transcript, weights);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      Utterance c = u;
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "-%03zu", k);
      c.id = u.id + suffix;
      c.audio_path.clear();
      c.transcript = pieces.size() == 1 ? u.transcript : texts[k];
      c.num_samples = pieces[k].size();
      c.sample_rate = pieces[k].sample_rate;
      c.audio = std::make_shared<const AudioBuffer>(pieces[k]);
      items[i].chunks.push_back(std::move(c));
    }
  });

  std::vector<Utterance> all;
  SegmentSummary s;
  s.inputs = in.utterances.size();
  for (auto& item : items) {
    s.removed_silence_s += item.removed_s;
    for (auto& c : item.chunks) all.push_back(std::move(c));
  }
  s.chunks = all.size();
  FilterResult filtered = filter_segments(all, spec);
  s.rejected = std::move(filtered.rejected);
  if (summary) *summary = std::move(s);
  return CorpusManifest{in.name, std::move(filtered.kept), in.root};
}

std::size_t export_features(const CorpusManifest& m, const fs::path& out_dir, const FeatureSpec& spec,
                            int workers) {
  spec.validate();
  fs::create_directories(out_dir);
  parallel_for(m.utterances.size(), workers, [&](std::size_t i) {
    const Utterance& u = m.utterances[i];
    if (!is_valid_id(u.id)) throw IntegrityError("utterance id '" + u.id + "' cannot be a file name");
    write_features(out_dir / u.id, log_mel(m.load_audio(u), spec), spec.hop_ms);
  });
  return m.utterances.size();
}

}  // namespace forge
