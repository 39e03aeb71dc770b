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

#include "forge/eval.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forge/csv.hpp"
#include "forge/error.hpp"
#include "forge/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace forge {

TranscriberSpec TranscriberSpec::command(std::string tpl, double timeout_s) {
  TranscriberSpec t;
  t.mode = TranscriberMode::kExternalCommand;
  t.command_template = std::move(tpl);
  t.timeout_s = timeout_s;
  return t;
}

TranscriberSpec TranscriberSpec::file(fs::path path) {
  TranscriberSpec t;
  t.mode = TranscriberMode::kHypothesisFile;
  t.hypothesis_path = std::move(path);
  return t;
}

void TranscriberSpec::validate() const {
  if (mode == TranscriberMode::kExternalCommand) {
    if (command_template.empty()) throw InvalidArgument("transcriber: empty command template");
    if (!hypothesis_path.empty()) throw InvalidArgument("transcriber: both command and hypothesis file set");
    if (!(timeout_s > 0.0)) throw InvalidArgument("transcriber: timeout must be positive");
  } else {
    if (hypothesis_path.empty()) throw InvalidArgument("transcriber: no hypothesis file");
    if (!command_template.empty()) throw InvalidArgument("transcriber: both command and hypothesis file set");
  }
}

std::string shell_quote(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  out += '\'';
  return out;
}

std::string expand_command(const std::string& tpl, const fs::path& audio, const std::string& id) {
  std::string out;
  for (std::size_t i = 0; i < tpl.size();) {
    if (tpl.compare(i, 7, "{audio}") == 0) {
      out += shell_quote(audio.string());
      i += 7;
    } else if (tpl.compare(i, 4, "{id}") == 0) {
      out += shell_quote(id);
      i += 4;
    } else {
      out += tpl[i++];
    }
  }
  return out;
}

CommandResult run_command(const std::string& command, double timeout_s) {
  int out_pipe[2], err_pipe[2];
  if (pipe2(out_pipe, O_CLOEXEC) != 0) throw ExternalCommandError("pipe failed");
  if (pipe2(err_pipe, O_CLOEXEC) != 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    throw ExternalCommandError("pipe failed");
  }
  const pid_t pid = fork();
  if (pid < 0) throw ExternalCommandError("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    const int devnull = open("/dev/null", O_RDONLY);
    if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(out_pipe[1]);
  close(err_pipe[1]);

  CommandResult result;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(timeout_s));
  pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    const int ready = poll(fds, 2, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready < 0 && errno != EINTR) break;
    for (int k = 0; k < 2; ++k) {
      if (fds[k].fd < 0 || !(fds[k].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t got = read(fds[k].fd, buf, sizeof buf);
      if (got > 0) {
        sinks[k]->append(buf, static_cast<std::size_t>(got));
      } else if (got == 0 || errno != EINTR) {
        close(fds[k].fd);
        fds[k].fd = -1;
        --open_fds;
      }
    }
  }
  if (result.timed_out) kill(-pid, SIGKILL);
  for (auto& f : fds) {
    if (f.fd >= 0) close(f.fd);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
  return result;
}

std::map<std::string, std::string> read_hypothesis_tsv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open hypothesis file " + path.string());
  std::map<std::string, std::string> hyps;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(path.string() + " line " + std::to_string(number) + ": expected id<TAB>text");
    }
    hyps[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return hyps;
}

void write_hypothesis_tsv(const fs::path& path, const std::map<std::string, std::string>& hyps) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [id, text] : hyps) out << id << '\t' << text << '\n';
}

std::string to_string(UtteranceStatus s) {
  switch (s) {
    case UtteranceStatus::kScored: return "scored";
    case UtteranceStatus::kMissing: return "missing";
    case UtteranceStatus::kFailed: return "failed";
    case UtteranceStatus::kEmptyReference: return "empty-reference";
  }
  return "scored";
}

UtteranceStatus parse_utterance_status(std::string_view s) {
  if (s == "scored") return UtteranceStatus::kScored;
  if (s == "missing") return UtteranceStatus::kMissing;
  if (s == "failed") return UtteranceStatus::kFailed;
  if (s == "empty-reference") return UtteranceStatus::kEmptyReference;
  throw FormatError("unknown utterance status '" + std::string(s) + "'");
}

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string trim_line_end(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

/// A hypothesis as fetched, before scoring.
struct Fetched {
  std::optional<std::string> text;
  UtteranceStatus status = UtteranceStatus::kScored;
  std::string note;
};

}  // namespace

double EvalRun::wer() const {
  if (ref_words == 0) return std::nan("");
  return static_cast<double>(errors) / static_cast<double>(ref_words);
}

EvalReport EvalRun::report() const {
  return EvalReport{{EvalRow{dataset, model, 100.0 * wer()}}, timestamp};
}

EvalRun run_eval(const CorpusManifest& m, const TranscriberSpec& t, const EvalOptions& options) {
  t.validate();
  EvalRun run;
  run.dataset = m.name;
  run.model = options.model;
  run.strict = options.strict;
  run.normalization = options.normalization;
  run.transcriber = t;
  run.timestamp = options.timestamp.empty() ? utc_timestamp_now() : options.timestamp;

  std::vector<Fetched> fetched(m.utterances.size());
  if (t.mode == TranscriberMode::kHypothesisFile) {
    const auto hyps = read_hypothesis_tsv(t.hypothesis_path);
    for (std::size_t i = 0; i < m.utterances.size(); ++i) {
      const auto it = hyps.find(m.utterances[i].id);
      if (it != hyps.end()) fetched[i].text = it->second;
      else fetched[i].status = UtteranceStatus::kMissing;
    }
  } else {
    parallel_for(m.utterances.size(), t.workers, [&](std::size_t i) {
      const Utterance& u = m.utterances[i];
      Fetched& f = fetched[i];
      if (u.audio_path.empty()) {
        f.status = UtteranceStatus::kFailed;
        f.note = "utterance has no audio file";
        return;
      }
      const fs::path audio = fs::absolute(m.resolve(u));
      const CommandResult r = run_command(expand_command(t.command_template, audio, u.id), t.timeout_s);
      if (r.timed_out) {
        f.status = UtteranceStatus::kFailed;
        f.note = "timed out after " + std::to_string(t.timeout_s) + " s";
      } else if (r.exit_code != 0) {
        f.status = UtteranceStatus::kFailed;
        f.note = "exit code " + std::to_string(r.exit_code);
      } else {
        f.text = trim_line_end(r.out);
      }
    });
  }

  std::size_t covered = 0;
  for (std::size_t i = 0; i < m.utterances.size(); ++i) {
    const Utterance& u = m.utterances[i];
    Fetched& f = fetched[i];
    UtteranceResult res;
    res.id = u.id;
    res.reference = u.transcript;
    res.status = f.status;
    res.note = f.note;
    if (f.text) {
      ++covered;
      res.hypothesis = *f.text;
    }
    const AlignmentResult a = align_text(res.reference, res.hypothesis, options.normalization);
    res.ref_len = a.ref_len;
    if (a.ref_len == 0) {
      res.status = UtteranceStatus::kEmptyReference;
      run.warnings.push_back(u.id + ": empty reference after normalization, excluded");
    } else if (f.text || options.strict) {
      res.counted = true;
      res.substitutions = a.substitutions;
      res.deletions = a.deletions;
      res.insertions = a.insertions;
      run.errors += res.errors();
      run.ref_words += res.ref_len;
    }
    if (!f.text) {
      run.warnings.push_back(u.id + ": no hypothesis (" + to_string(f.status) +
                             (f.note.empty() ? "" : ", " + f.note) + ")" +
                             (options.strict ? ", counted as deletions" : ", excluded"));
    }
    run.utterances.push_back(std::move(res));
  }

  if (covered == 0) {
    const std::string msg = "no utterance of '" + m.name + "' received a hypothesis";
    if (t.mode == TranscriberMode::kExternalCommand) throw ExternalCommandError(msg);
    throw IntegrityError(msg);
  }
  return run;
}

std::string EvalRun::to_json() const {
  json j;
  j["schema"] = "forge.run/1";
  j["dataset"] = dataset;
  j["model"] = model;
  j["timestamp"] = timestamp;
  j["strict"] = strict;
  j["normalization"] = {{"unicode_form", "NFC"},
                        {"strip_punctuation", normalization.strip_punctuation},
                        {"digit_policy", to_string(normalization.digit_policy)},
                        {"collapse_whitespace", normalization.collapse_whitespace}};
  json tr;
  if (transcriber.mode == TranscriberMode::kExternalCommand) {
    tr = {{"mode", "external_command"},
          {"command_template", transcriber.command_template},
          {"timeout_s", transcriber.timeout_s}};
  } else {
    tr = {{"mode", "hypothesis_file"}, {"hypothesis_path", transcriber.hypothesis_path.string()}};
  }
  j["transcriber"] = tr;
  j["pooled"] = {{"errors", errors}, {"ref_words", ref_words},
                 {"wer_percent", ref_words ? json(100.0 * wer()) : json(nullptr)}};
  json utts = json::array();
  for (const auto& u : utterances) {
    utts.push_back({{"id", u.id},
                    {"status", to_string(u.status)},
                    {"counted", u.counted},
                    {"reference", u.reference},
                    {"hypothesis", u.hypothesis},
                    {"S", u.substitutions},
                    {"D", u.deletions},
                    {"I", u.insertions},
                    {"N", u.ref_len},
                    {"note", u.note}});
  }
  j["utterances"] = std::move(utts);
  j["warnings"] = warnings;
  return j.dump(2);
}

EvalRun EvalRun::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("run record: ") + e.what());
  }
  try {
    EvalRun run;
    run.dataset = j.at("dataset").get<std::string>();
    run.model = j.at("model").get<std::string>();
    run.timestamp = j.value("timestamp", "");
    run.strict = j.value("strict", false);
    if (j.contains("normalization")) {
      const auto& n = j["normalization"];
      run.normalization.strip_punctuation = n.value("strip_punctuation", true);
      run.normalization.digit_policy = parse_digit_policy(n.value("digit_policy", "to_devanagari"));
      run.normalization.collapse_whitespace = n.value("collapse_whitespace", true);
    }
    if (j.contains("transcriber")) {
      const auto& tr = j["transcriber"];
      if (tr.value("mode", "") == "external_command") {
        run.transcriber = TranscriberSpec::command(tr.value("command_template", ""), tr.value("timeout_s", 120.0));
      } else {
        run.transcriber = TranscriberSpec::file(tr.value("hypothesis_path", ""));
      }
    }
    for (const auto& u : j.at("utterances")) {
      UtteranceResult r;
      r.id = u.at("id").get<std::string>();
      r.status = parse_utterance_status(u.at("status").get<std::string>());
      r.counted = u.at("counted").get<bool>();
      r.reference = u.value("reference", "");
      r.hypothesis = u.value("hypothesis", "");
      r.substitutions = u.at("S").get<std::size_t>();
      r.deletions = u.at("D").get<std::size_t>();
      r.insertions = u.at("I").get<std::size_t>();
      r.ref_len = u.at("N").get<std::size_t>();
      r.note = u.value("note", "");
      if (r.counted) {
        run.errors += r.errors();
        run.ref_words += r.ref_len;
      }
      run.utterances.push_back(std::move(r));
    }
    if (j.contains("warnings")) run.warnings = j["warnings"].get<std::vector<std::string>>();
    return run;
  } catch (const json::exception& e) {
    throw FormatError(std::string("run record: ") + e.what());
  }
}

EvalRun EvalRun::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void EvalRun::save(const fs::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json() << '\n';
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "md" || text == "markdown" || text == "markdown_table") return ReportFormat::kMarkdown;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  throw InvalidArgument("unknown report format '" + std::string(text) + "'");
}

namespace {

constexpr const char* kAbsent = "–";

std::string format_cell(double v, int decimals) {
  if (!std::isfinite(v)) return kAbsent;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

struct Grid {
  std::string corner;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
};

std::size_t index_of(std::vector<std::string>& names, const std::string& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  names.push_back(name);
  return names.size() - 1;
}

Grid build_grid(std::span<const EvalReport> reports, bool transpose) {
  Grid g;
  g.corner = transpose ? "Models" : "Datasets";
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      const std::string& r = transpose ? row.model : row.dataset;
      const std::string& c = transpose ? row.dataset : row.model;
      const std::size_t ri = index_of(g.rows, r);
      const std::size_t ci = index_of(g.cols, c);
      g.cells[{ri, ci}] = row.wer_percent;
    }
  }
  return g;
}

}  // namespace

std::string render_report(std::span<const EvalReport> reports, ReportFormat format,
                          const RenderOptions& options) {
  const Grid g = build_grid(reports, options.transpose);
  const auto cell = [&](std::size_t r, std::size_t c) -> std::optional<double> {
    const auto it = g.cells.find({r, c});
    if (it == g.cells.end() || !std::isfinite(it->second)) return std::nullopt;
    return it->second;
  };

  std::ostringstream out;
  switch (format) {
    case ReportFormat::kMarkdown: {
      out << "| " << g.corner << " |";
      for (const auto& c : g.cols) out << ' ' << c << " |";
      out << "\n|---|";
      for (std::size_t k = 0; k < g.cols.size(); ++k) out << "---|";
      out << '\n';
      for (std::size_t r = 0; r < g.rows.size(); ++r) {
        out << "| " << g.rows[r] << " |";
        for (std::size_t c = 0; c < g.cols.size(); ++c) {
          const auto v = cell(r, c);
          out << ' ' << (v ? format_cell(*v, options.decimals) : kAbsent) << " |";
        }
        out << '\n';
      }
      break;
    }
    case ReportFormat::kCsv: {
      out << csv::escape(g.corner);
      for (const auto& c : g.cols) out << ',' << csv::escape(c);
      out << '\n';
      for (std::size_t r = 0; r < g.rows.size(); ++r) {
        out << csv::escape(g.rows[r]);
        for (std::size_t c = 0; c < g.cols.size(); ++c) {
          const auto v = cell(r, c);
          out << ',' << (v ? format_cell(*v, options.decimals) : kAbsent);
        }
        out << '\n';
      }
      break;
    }
    case ReportFormat::kJson: {
      json j;
      j["row_header"] = g.corner;
      j["columns"] = g.cols;
      json rows = json::array();
      for (std::size_t r = 0; r < g.rows.size(); ++r) {
        json values = json::object();
        for (std::size_t c = 0; c < g.cols.size(); ++c) {
          const auto v = cell(r, c);
          values[g.cols[c]] = v ? json(std::stod(format_cell(*v, options.decimals))) : json(nullptr);
        }
        rows.push_back({{"name", g.rows[r]}, {"values", std::move(values)}});
      }
      j["rows"] = std::move(rows);
      out << j.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

}  // namespace forge
