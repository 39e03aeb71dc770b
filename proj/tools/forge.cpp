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

// forge: speech corpus preparation and ASR evaluation pipeline.
//
//   ingest -> segment -> augment -> stats -> split -> features -> eval -> report
//   serve (human curation)

#include <signal.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "forge/augment.hpp"
#include "forge/config.hpp"
#include "forge/corpus.hpp"
#include "forge/curation.hpp"
#include "forge/error.hpp"
#include "forge/eval.hpp"
#include "forge/features.hpp"
#include "forge/pipeline.hpp"
#include "forge/segmenter.hpp"
#include "forge/splitter.hpp"

namespace fs = std::filesystem;

namespace {

using forge::Config;

/// Flag value if given, else config value, else default.
template <typename T>
T pick(const std::optional<T>& flag, const Config& cfg, const std::string& key, T fallback) {
  if (flag) return *flag;
  if constexpr (std::is_same_v<T, double>) return cfg.get_double(key, fallback);
  else if constexpr (std::is_same_v<T, std::uint64_t>) return cfg.get_uint(key, fallback);
  else if constexpr (std::is_same_v<T, int>) return static_cast<int>(cfg.get_int(key, fallback));
  else if constexpr (std::is_same_v<T, bool>) return cfg.get_bool(key, fallback);
  else return cfg.get_string(key, fallback);
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct Globals {
  std::string config_path;
  std::optional<int> workers;
  Config config;

  int worker_count() const { return std::max(1, pick(workers, config, "workers", 1)); }
};

forge::NormalizationSpec normalization_from(const Config& cfg) {
  forge::NormalizationSpec n;
  n.strip_punctuation = cfg.get_bool("normalize.strip_punctuation", n.strip_punctuation);
  n.digit_policy = forge::parse_digit_policy(cfg.get_string("normalize.digit_policy", "to_devanagari"));
  n.collapse_whitespace = cfg.get_bool("normalize.collapse_whitespace", n.collapse_whitespace);
  return n;
}

void print_durations(const forge::CorpusManifest& m) {
  double total = 0.0;
  std::printf("source\tutterances\thours\n");
  for (const auto& d : forge::duration_report(m)) {
    std::printf("%s\t%lld\t%s\n", d.source.empty() ? "(none)" : d.source.c_str(),
                static_cast<long long>(d.utterances), forge::format_hours(d.hours()).c_str());
    total += d.seconds;
  }
  std::printf("total\t%zu\t%s\n", m.size(), forge::format_hours(total / 3600.0).c_str());
}

void serve_until_signal(forge::CurationServer& server) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::jthread waiter([&server, set] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  server.serve();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: speech corpus preparation and ASR evaluation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value settings file");
  app.add_option("--workers", g.workers, "parallel workers for per-file stages");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "decode, resample to the corpus rate, emit an audiofolder");
  std::string ingest_in, ingest_out, ingest_source;
  std::optional<int> ingest_rate;
  ingest->add_option("in_dir", ingest_in)->required();
  ingest->add_option("out_dir", ingest_out)->required();
  ingest->add_option("--sample-rate", ingest_rate, "target rate (default 16000)");
  ingest->add_option("--source", ingest_source, "source tag for rows without one");

  // segment
  auto* segment = app.add_subcommand("segment", "remove long silences, chunk, filter");
  std::string seg_in, seg_out;
  std::optional<double> seg_max, seg_min, seg_db, seg_gap, seg_ratio, seg_frame;
  segment->add_option("in", seg_in)->required();
  segment->add_option("out", seg_out)->required();
  segment->add_option("--max-s", seg_max, "maximum chunk length (30)");
  segment->add_option("--min-s", seg_min, "minimum kept length (5)");
  segment->add_option("--silence-db", seg_db, "silence threshold in dBFS (-40)");
  segment->add_option("--gap-s", seg_gap, "silences longer than this are removed (1.0)");
  segment->add_option("--frame-ms", seg_frame, "analysis frame (20)");
  segment->add_option("--devanagari-ratio", seg_ratio, "minimum Devanagari share of transcripts (0.5)");

  // augment
  auto* augment = app.add_subcommand("augment", "add white-noise copies of every segment");
  std::string aug_in, aug_out;
  std::optional<double> aug_snr;
  std::optional<int> aug_rate;
  std::optional<std::uint64_t> aug_seed;
  augment->add_option("in", aug_in)->required();
  augment->add_option("out", aug_out)->required();
  augment->add_option("--snr-db", aug_snr, "target SNR (20)");
  augment->add_option("--noise-rate", aug_rate, "noise synthesis rate in Hz (8000)");
  augment->add_option("--seed", aug_seed, "base seed (0)");

  // stats
  auto* stats = app.add_subcommand("stats", "duration table and vocabulary size");
  std::string stats_in, stats_stop;
  stats->add_option("in", stats_in)->required();
  stats->add_option("--stoplist", stats_stop, "excluded words, one per line");

  // split
  auto* split = app.add_subcommand("split", "seeded train/eval partition");
  std::string split_in, split_out;
  std::optional<double> split_train, split_cap;
  std::optional<std::uint64_t> split_seed;
  split->add_option("in", split_in)->required();
  split->add_option("out", split_out)->required();
  split->add_option("--train", split_train, "train fraction (0.8)");
  split->add_option("--eval-cap", split_cap, "eval cap as a fraction of train (0.3)");
  split->add_option("--seed", split_seed, "seed (0)");

  // features
  auto* features = app.add_subcommand("features", "export log-mel features");
  std::string feat_in, feat_out;
  features->add_option("in", feat_in)->required();
  features->add_option("out", feat_out)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "transcribe and score a manifest");
  std::string eval_manifest, eval_cmd, eval_hyp, eval_out = "run.json", eval_model = "model", eval_format = "md";
  std::optional<double> eval_timeout;
  bool eval_strict = false;
  eval->add_option("manifest,--manifest", eval_manifest, "audiofolder to score")->required();
  auto* cmd_opt = eval->add_option("--command", eval_cmd, "shell command template with {audio}");
  auto* hyp_opt = eval->add_option("--hyp", eval_hyp, "TSV of id<TAB>hypothesis");
  cmd_opt->excludes(hyp_opt);
  eval->add_option("--out", eval_out, "run record path (run.json)");
  eval->add_option("--model", eval_model, "model label for reports");
  eval->add_option("--timeout-s", eval_timeout, "per-utterance command timeout (120)");
  eval->add_option("--format", eval_format, "md|csv|json");
  eval->add_flag("--strict", eval_strict, "count missing hypotheses as deletions");

  // report
  auto* report = app.add_subcommand("report", "render run records as a comparison table");
  std::vector<std::string> report_runs;
  std::string report_format = "md";
  int report_decimals = 1;
  bool report_transpose = false;
  report->add_option("runs", report_runs)->required();
  report->add_option("--format", report_format, "md|csv|json");
  report->add_option("--decimals", report_decimals, "decimal places (1)");
  report->add_flag("--transpose", report_transpose, "models as rows");

  // serve
  auto* serve = app.add_subcommand("serve", "curation HTTP service");
  std::string serve_manifest, serve_journal, serve_host = "127.0.0.1", serve_ui, serve_export = "curated";
  int serve_port = 8765;
  serve->add_option("manifest", serve_manifest)->required();
  serve->add_option("--journal", serve_journal, "decision journal (JSON lines)")->required();
  serve->add_option("--port", serve_port, "port (8765)");
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--ui-dir", serve_ui, "static UI bundle to serve at /");
  serve->add_option("--export-dir", serve_export, "default export directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "forge: error[usage]: %s\n", one_line(e.what()).c_str());
    return static_cast<int>(forge::ExitCode::kUsage);
  }

  try {
    if (!g.config_path.empty()) g.config = Config::load(g.config_path);
    const Config& cfg = g.config;
    const int workers = g.worker_count();

    if (*ingest) {
      forge::IngestOptions opt;
      opt.sample_rate = pick(ingest_rate, cfg, "audio.sample_rate", forge::kCorpusSampleRate);
      opt.source = ingest_source;
      opt.workers = workers;
      const auto m = forge::ingest(ingest_in, ingest_out, opt);
      std::printf("ingested %zu utterances at %d Hz into %s\n", m.size(), opt.sample_rate, ingest_out.c_str());
    } else if (*segment) {
      forge::SegmentSpec spec;
      spec.max_duration_s = pick(seg_max, cfg, "chunk.max_s", spec.max_duration_s);
      spec.min_duration_s = pick(seg_min, cfg, "chunk.min_s", spec.min_duration_s);
      spec.silence_threshold_dbfs = pick(seg_db, cfg, "silence.threshold_dbfs", spec.silence_threshold_dbfs);
      spec.silence_min_gap_s = pick(seg_gap, cfg, "silence.min_gap_s", spec.silence_min_gap_s);
      spec.frame_ms = pick(seg_frame, cfg, "silence.frame_ms", spec.frame_ms);
      spec.min_devanagari_ratio = pick(seg_ratio, cfg, "filter.devanagari_ratio", spec.min_devanagari_ratio);
      const auto in = forge::read_audiofolder(seg_in);
      forge::SegmentSummary summary;
      const auto kept = forge::segment_corpus(in, spec, &summary, workers);
      forge::write_audiofolder(kept, seg_out);
      std::ofstream rej(fs::path(seg_out) / "rejected.tsv", std::ios::trunc);
      for (const auto& r : summary.rejected) rej << r.utterance.id << '\t' << forge::to_string(r.reason) << '\n';
      std::printf("segments %zu kept %zu rejected %zu silence_removed_s %.2f\n", summary.chunks, kept.size(),
                  summary.rejected.size(), summary.removed_silence_s);
    } else if (*augment) {
      forge::NoiseSpec spec;
      spec.target_snr_db = pick(aug_snr, cfg, "augment.snr_db", spec.target_snr_db);
      spec.noise_sample_rate = pick(aug_rate, cfg, "augment.noise_rate_hz", spec.noise_sample_rate);
      spec.seed = pick(aug_seed, cfg, "augment.seed", std::uint64_t{0});
      const auto in = forge::read_audiofolder(aug_in);
      forge::AugmentSummary summary;
      const auto out = forge::augment_manifest(in, spec, &summary, workers);
      forge::write_audiofolder(out, aug_out);
      std::printf("originals %zu augmented %zu skipped %zu\n", in.size(), summary.augmented, summary.skipped);
    } else if (*stats) {
      const auto m = forge::read_audiofolder(stats_in);
      const auto norm = normalization_from(cfg);
      print_durations(m);
      const auto stop = stats_stop.empty() ? forge::StopList{} : forge::StopList::load(stats_stop, norm);
      const auto words = forge::unique_word_stats(m, stop, norm);
      std::printf("unique_words\t%zu\n", words.unique_count);
    } else if (*split) {
      forge::SplitSpec spec;
      spec.train_fraction = pick(split_train, cfg, "split.train_fraction", spec.train_fraction);
      spec.eval_cap_fraction_of_train = pick(split_cap, cfg, "split.eval_cap", spec.eval_cap_fraction_of_train);
      spec.seed = pick(split_seed, cfg, "split.seed", std::uint64_t{0});
      spec.validate();
      const auto m = forge::read_audiofolder(split_in);
      const auto r = forge::split(m, spec);
      const fs::path out(split_out);
      forge::write_audiofolder(r.train, out / "train");
      forge::write_audiofolder(r.eval, out / "eval");
      std::ofstream(out / "split_report.json", std::ios::trunc) << r.report.to_json() << '\n';
      std::printf("train %zu eval %zu cap_applied %s\n", r.report.train, r.report.eval,
                  r.report.cap_applied ? "true" : "false");
    } else if (*features) {
      forge::FeatureSpec spec;
      spec.n_mels = static_cast<int>(cfg.get_int("features.n_mels", spec.n_mels));
      spec.window_ms = cfg.get_double("features.window_ms", spec.window_ms);
      spec.hop_ms = cfg.get_double("features.hop_ms", spec.hop_ms);
      spec.fft_size = static_cast<int>(cfg.get_int("features.fft_size", spec.fft_size));
      spec.pad_to_s = cfg.get_double("features.pad_to_s", spec.pad_to_s);
      const auto m = forge::read_audiofolder(feat_in);
      const std::size_t n = forge::export_features(m, feat_out, spec, workers);
      std::printf("features %zu\n", n);
    } else if (*eval) {
      const auto m = forge::read_audiofolder(eval_manifest);
      forge::TranscriberSpec t;
      if (!eval_cmd.empty()) {
        t = forge::TranscriberSpec::command(eval_cmd, pick(eval_timeout, cfg, "eval.timeout_s", 120.0));
      } else if (!eval_hyp.empty()) {
        t = forge::TranscriberSpec::file(eval_hyp);
      } else {
        throw forge::InvalidArgument("eval needs --command or --hyp");
      }
      t.workers = workers;
      forge::EvalOptions opt;
      opt.model = eval_model;
      opt.strict = eval_strict;
      opt.normalization = normalization_from(cfg);
      const auto run = forge::run_eval(m, t, opt);
      run.save(eval_out);
      for (const auto& w : run.warnings) std::fprintf(stderr, "forge: warning: %s\n", one_line(w).c_str());
      const auto rep = run.report();
      std::printf("WER %.2f\n", 100.0 * run.wer());
      std::printf("%s", forge::render_report(std::span(&rep, 1), forge::parse_report_format(eval_format), {2, false}).c_str());
    } else if (*report) {
      std::vector<forge::EvalReport> reports;
      for (const auto& p : report_runs) reports.push_back(forge::EvalRun::load(p).report());
      forge::RenderOptions opt{report_decimals, report_transpose};
      std::printf("%s", forge::render_report(reports, forge::parse_report_format(report_format), opt).c_str());
    } else if (*serve) {
      auto m = forge::read_audiofolder(serve_manifest);
      forge::CurationStore store(std::move(m), serve_journal);
      std::optional<fs::path> ui;
      if (!serve_ui.empty()) ui = serve_ui;
      forge::CurationServer server(store, ui, serve_export);
      const int port = server.bind(serve_host, serve_port);
      std::printf("listening on http://%s:%d\n", serve_host.c_str(), port);
      std::fflush(stdout);
      serve_until_signal(server);
    }
  } catch (const forge::Error& e) {
    std::fprintf(stderr, "forge: error[%s]: %s\n", e.kind().c_str(), one_line(e.what()).c_str());
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "forge: error[internal]: %s\n", one_line(e.what()).c_str());
    return static_cast<int>(forge::ExitCode::kFailure);
  }
  return 0;
}
