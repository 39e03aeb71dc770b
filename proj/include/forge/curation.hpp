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

#ifndef FORGE_CURATION_HPP_
#define FORGE_CURATION_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/corpus.hpp"

namespace forge {

enum class Verdict { kAccept, kReject };

std::string to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

/// One reviewer action. `sequence` is assigned by the journal.
struct CurationDecision {
  std::string utterance_id;
  Verdict verdict = Verdict::kAccept;
  std::optional<std::string> edited_transcript;
  std::optional<std::string> reason;
  std::string reviewer;
  std::string timestamp;
  std::uint64_t sequence = 0;

  /// Single-line JSON, as stored in the journal.
  std::string to_json_line() const;
  /// Throws InvalidArgument on missing or mistyped fields.
  static CurationDecision from_json(std::string_view text);

  bool operator==(const CurationDecision&) const = default;
};

/// Append-only JSON-lines journal. Holds an exclusive advisory lock on the
/// file for its lifetime; every append is fsync'ed before it returns.
class DecisionJournal {
 public:
  /// Creates the file if needed and replays it. Throws IntegrityError if
  /// another process holds the lock or the sequence numbers are not
  /// 1, 2, 3, ...
  explicit DecisionJournal(std::filesystem::path path);
  ~DecisionJournal();

  DecisionJournal(const DecisionJournal&) = delete;
  DecisionJournal& operator=(const DecisionJournal&) = delete;

  /// Assigns the next sequence number, persists, and returns it.
  std::uint64_t append(CurationDecision d);

  const std::vector<CurationDecision>& entries() const { return entries_; }
  const std::filesystem::path& path() const { return path_; }

  /// Reads a journal without locking it.
  static std::vector<CurationDecision> replay(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::vector<CurationDecision> entries_;
};

/// Accepted utterances in corpus order with edits applied; the last
/// decision per id wins.
CorpusManifest curated_manifest(const CorpusManifest& corpus,
                                std::span<const CurationDecision> decisions);

struct CurationStats {
  std::size_t total = 0;
  std::size_t pending = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t decisions = 0;
};

struct PendingPage {
  std::vector<Utterance> items;
  std::optional<std::string> next_cursor;
};

/// Corpus plus journal. Reads take a shared lock; appends are serialised.
class CurationStore {
 public:
  CurationStore(CorpusManifest corpus, const std::filesystem::path& journal);

  /// Undecided utterances in corpus order. `cursor` is the value returned
  /// by the previous page; InvalidArgument when it is not one.
  PendingPage list_pending(std::size_t limit, const std::optional<std::string>& cursor = {}) const;

  /// NotFound for unknown ids. Fills an empty timestamp with the current
  /// time and returns the acknowledged sequence number.
  std::uint64_t post_decision(CurationDecision d);

  /// Writes the curated audiofolder to `out_dir` and returns it.
  CorpusManifest export_curated(const std::filesystem::path& out_dir) const;

  CurationStats stats() const;
  std::optional<CurationDecision> latest(const std::string& id) const;
  const CorpusManifest& corpus() const { return corpus_; }
  /// Absolute path of an utterance's WAV; NotFound for unknown ids.
  std::filesystem::path audio_path(const std::string& id) const;

 private:
  std::size_t index_of(const std::string& id) const;

  CorpusManifest corpus_;
  std::unordered_map<std::string, std::size_t> index_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<DecisionJournal> journal_;
  std::vector<std::optional<CurationDecision>> latest_;
};

/// HTTP/JSON front end:
///   GET  /api/pending?limit=&cursor=
///   GET  /api/audio/{id}        (Range supported)
///   POST /api/decisions
///   POST /api/export            {"out_dir": "..."}
///   GET  /api/stats
///   GET  /                      static UI bundle
class CurationServer {
 public:
  CurationServer(CurationStore& store, std::optional<std::filesystem::path> ui_dir = {},
                 std::filesystem::path default_export_dir = "curated");
  ~CurationServer();

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  void serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace forge

#endif  // FORGE_CURATION_HPP_
