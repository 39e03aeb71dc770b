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

#ifndef FORGE_EVAL_HPP_
#define FORGE_EVAL_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/corpus.hpp"
#include "forge/metrics.hpp"

namespace forge {

enum class TranscriberMode { kExternalCommand, kHypothesisFile };

/// Where hypotheses come from: a shell command run once per utterance
/// ({audio} is replaced by the quoted absolute WAV path, {id} by the quoted
/// utterance id), or a TSV file of `id<TAB>text` lines.
struct TranscriberSpec {
  TranscriberMode mode = TranscriberMode::kHypothesisFile;
  std::string command_template;
  std::filesystem::path hypothesis_path;
  double timeout_s = 120.0;
  int workers = 1;

  static TranscriberSpec command(std::string tpl, double timeout_s = 120.0);
  static TranscriberSpec file(std::filesystem::path path);
  /// Exactly one mode's fields must be populated.
  void validate() const;
};

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs `/bin/sh -c command` and collects its output. The whole process
/// group is killed once `timeout_s` elapses.
CommandResult run_command(const std::string& command, double timeout_s);

/// Single-quotes a string for /bin/sh.
std::string shell_quote(std::string_view text);

std::string expand_command(const std::string& tpl, const std::filesystem::path& audio,
                           const std::string& id);

/// `id<TAB>text` per line; later lines override earlier ones.
std::map<std::string, std::string> read_hypothesis_tsv(const std::filesystem::path& path);
void write_hypothesis_tsv(const std::filesystem::path& path,
                          const std::map<std::string, std::string>& hyps);

enum class UtteranceStatus { kScored, kMissing, kFailed, kEmptyReference };

std::string to_string(UtteranceStatus s);
UtteranceStatus parse_utterance_status(std::string_view s);

struct UtteranceResult {
  std::string id;
  std::string reference;
  std::string hypothesis;
  UtteranceStatus status = UtteranceStatus::kScored;
  /// Whether the pair contributes to the pooled totals.
  bool counted = false;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_len = 0;
  std::string note;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

/// One (dataset, model) WER cell.
struct EvalRow {
  std::string dataset;
  std::string model;
  double wer_percent = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::string timestamp;
};

struct EvalOptions {
  std::string model = "model";
  /// Count missing or failed hypotheses as full deletions.
  bool strict = false;
  NormalizationSpec normalization;
  /// ISO-8601 UTC; filled with the current time when empty.
  std::string timestamp;
};

/// A scored run; serialised as the JSON run record.
struct EvalRun {
  std::string dataset;
  std::string model;
  bool strict = false;
  NormalizationSpec normalization;
  TranscriberSpec transcriber;
  std::string timestamp;
  std::vector<UtteranceResult> utterances;
  std::vector<std::string> warnings;
  std::size_t errors = 0;
  std::size_t ref_words = 0;

  double wer() const;
  EvalReport report() const;
  std::string to_json() const;
  static EvalRun from_json(std::string_view text);
  static EvalRun load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

/// Transcribes (or looks up) every utterance, scores against the manifest
/// transcripts and pools the counts. Timeouts and failing commands are
/// recorded per utterance and the run continues. Throws
/// ExternalCommandError (command mode) or IntegrityError (file mode) when
/// no utterance received a hypothesis.
EvalRun run_eval(const CorpusManifest& m, const TranscriberSpec& t, const EvalOptions& options = {});

enum class ReportFormat { kMarkdown, kCsv, kJson };

ReportFormat parse_report_format(std::string_view text);

struct RenderOptions {
  int decimals = 1;
  /// Models as rows and datasets as columns.
  bool transpose = false;
};

/// Datasets as rows and models as columns (first-appearance order), WER
/// cells at `decimals` places and "–" where a combination is absent. A
/// repeated (dataset, model) pair keeps the last value.
std::string render_report(std::span<const EvalReport> reports, ReportFormat format,
                          const RenderOptions& options = {});

std::string utc_timestamp_now();

}  // namespace forge

#endif  // FORGE_EVAL_HPP_
