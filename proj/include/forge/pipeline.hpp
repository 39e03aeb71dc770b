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

#ifndef FORGE_PIPELINE_HPP_
#define FORGE_PIPELINE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "forge/corpus.hpp"
#include "forge/features.hpp"
#include "forge/segmenter.hpp"

namespace forge {

struct IngestOptions {
  int sample_rate = kCorpusSampleRate;
  /// Source tag for rows that have none; defaults to the input dir name.
  std::string source;
  int workers = 1;
};

/// Loads `in_dir` (an audiofolder, or loose `*.wav` files with optional
/// same-stem `.txt` transcripts), decodes and resamples every clip to
/// `sample_rate`, and writes an audiofolder to `out_dir`.
CorpusManifest ingest(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir,
                      const IngestOptions& options = {});

struct SegmentSummary {
  std::size_t inputs = 0;
  std::size_t chunks = 0;
  double removed_silence_s = 0.0;
  std::vector<Rejection> rejected;
};

/// De-silences and chunks every utterance, then filters the chunks. Chunk
/// ids are `<id>-NNN`. A recording that yields several chunks has its
/// transcript divided between them at word boundaries, proportionally to
/// chunk duration; these are draft labels for the curation pass.
CorpusManifest segment_corpus(const CorpusManifest& in, const SegmentSpec& spec,
                              SegmentSummary* summary = nullptr, int workers = 1);

/// Writes `<out_dir>/<id>.f32` and `<out_dir>/<id>.json` per utterance.
std::size_t export_features(const CorpusManifest& m, const std::filesystem::path& out_dir,
                            const FeatureSpec& spec = {}, int workers = 1);

}  // namespace forge

#endif  // FORGE_PIPELINE_HPP_
