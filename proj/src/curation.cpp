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

#include "forge/curation.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "forge/error.hpp"
#include "forge/eval.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace forge {

std::string to_string(Verdict v) { return v == Verdict::kAccept ? "accept" : "reject"; }

Verdict parse_verdict(std::string_view text) {
  if (text == "accept") return Verdict::kAccept;
  if (text == "reject") return Verdict::kReject;
  throw InvalidArgument("verdict must be 'accept' or 'reject', got '" + std::string(text) + "'");
}

std::string CurationDecision::to_json_line() const {
  json j;
  j["sequence"] = sequence;
  j["utterance_id"] = utterance_id;
  j["verdict"] = to_string(verdict);
  j["edited_transcript"] = edited_transcript ? json(*edited_transcript) : json(nullptr);
  j["reason"] = reason ? json(*reason) : json(nullptr);
  j["reviewer"] = reviewer;
  j["timestamp"] = timestamp;
  return j.dump();
}

CurationDecision CurationDecision::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("decision is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("decision must be a JSON object");
  const auto optional_string = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw InvalidArgument(std::string("decision field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  CurationDecision d;
  const auto id = optional_string("utterance_id");
  if (!id || id->empty()) throw InvalidArgument("decision needs a non-empty 'utterance_id'");
  d.utterance_id = *id;
  const auto verdict = optional_string("verdict");
  if (!verdict) throw InvalidArgument("decision needs a 'verdict'");
  d.verdict = parse_verdict(*verdict);
  d.edited_transcript = optional_string("edited_transcript");
  d.reason = optional_string("reason");
  d.reviewer = optional_string("reviewer").value_or("");
  d.timestamp = optional_string("timestamp").value_or("");
  if (j.contains("sequence")) {
    if (!j["sequence"].is_number_unsigned()) throw InvalidArgument("decision 'sequence' must be unsigned");
    d.sequence = j["sequence"].get<std::uint64_t>();
  }
  return d;
}

// ---------------------------------------------------------------------------

namespace {

/// `valid_bytes` receives the length of the prefix made of complete lines.
std::vector<CurationDecision> parse_journal(const fs::path& path, std::string_view text,
                                            std::size_t* valid_bytes = nullptr) {
  std::vector<CurationDecision> entries;
  if (valid_bytes) *valid_bytes = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    const bool complete = end != std::string_view::npos;
    if (!complete) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (complete && valid_bytes) *valid_bytes = pos;
      continue;
    }
    if (!complete) {
      // A torn final write was never acknowledged.
      break;
    }
    CurationDecision d;
    try {
      d = CurationDecision::from_json(line);
    } catch (const InvalidArgument& e) {
      throw IntegrityError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (d.sequence != entries.size() + 1) {
      throw IntegrityError(path.string() + " line " + std::to_string(line_no) + ": expected sequence " +
                           std::to_string(entries.size() + 1) + ", found " + std::to_string(d.sequence));
    }
    entries.push_back(std::move(d));
    if (valid_bytes) *valid_bytes = pos;
  }
  return entries;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

DecisionJournal::DecisionJournal(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open journal " + path_.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    throw IntegrityError("journal " + path_.string() + " is locked by another process");
  }
  const std::string text = read_all(path_);
  std::size_t valid = 0;
  try {
    entries_ = parse_journal(path_, text, &valid);
  } catch (...) {
    ::close(fd_);
    throw;
  }
  // Drop a torn tail so the next append starts on a clean line.
  if (valid < text.size() && ::ftruncate(fd_, static_cast<off_t>(valid)) != 0) {
    ::close(fd_);
    throw IoError("cannot truncate torn journal tail in " + path_.string());
  }
}

DecisionJournal::~DecisionJournal() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint64_t DecisionJournal::append(CurationDecision d) {
  d.sequence = entries_.size() + 1;
  const std::string line = d.to_json_line() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("journal write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw IoError("journal fsync failed: " + std::string(std::strerror(errno)));
  entries_.push_back(std::move(d));
  return entries_.back().sequence;
}

std::vector<CurationDecision> DecisionJournal::replay(const fs::path& path) {
  return parse_journal(path, read_all(path));
}

CorpusManifest curated_manifest(const CorpusManifest& corpus,
                                std::span<const CurationDecision> decisions) {
  std::unordered_map<std::string, const CurationDecision*> last;
  for (const auto& d : decisions) last[d.utterance_id] = &d;
  CorpusManifest out{corpus.name + "-curated", {}, corpus.root};
  for (const auto& u : corpus.utterances) {
    const auto it = last.find(u.id);
    if (it == last.end() || it->second->verdict != Verdict::kAccept) continue;
    Utterance v = u;
    if (it->second->edited_transcript) v.transcript = *it->second->edited_transcript;
    out.utterances.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------

CurationStore::CurationStore(CorpusManifest corpus, const fs::path& journal)
    : corpus_(std::move(corpus)) {
  for (std::size_t i = 0; i < corpus_.utterances.size(); ++i) {
    if (!index_.emplace(corpus_.utterances[i].id, i).second) {
      throw IntegrityError("duplicate utterance id '" + corpus_.utterances[i].id + "'");
    }
  }
  journal_ = std::make_unique<DecisionJournal>(journal);
  latest_.resize(corpus_.utterances.size());
  for (const auto& d : journal_->entries()) {
    const auto it = index_.find(d.utterance_id);
    if (it == index_.end()) {
      throw IntegrityError("journal " + journal.string() + " references unknown utterance '" +
                           d.utterance_id + "'");
    }
    latest_[it->second] = d;
  }
}

std::size_t CurationStore::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw NotFound("unknown utterance '" + id + "'");
  return it->second;
}

PendingPage CurationStore::list_pending(std::size_t limit, const std::optional<std::string>& cursor) const {
  if (limit == 0) throw InvalidArgument("limit must be positive");
  std::size_t start = 0;
  if (cursor && !cursor->empty()) {
    const std::string& c = *cursor;
    if (c.size() < 2 || c[0] != 'p' ||
        c.find_first_not_of("0123456789", 1) != std::string::npos || c.size() > 20) {
      throw InvalidArgument("bad cursor '" + c + "'");
    }
    start = std::stoull(c.substr(1));
    if (start > corpus_.utterances.size()) throw InvalidArgument("bad cursor '" + c + "'");
  }
  std::shared_lock lock(mutex_);
  PendingPage page;
  std::size_t i = start;
  for (; i < corpus_.utterances.size() && page.items.size() < limit; ++i) {
    if (!latest_[i]) page.items.push_back(corpus_.utterances[i]);
  }
  // Only hand out a cursor when something undecided remains after it.
  for (std::size_t k = i; k < corpus_.utterances.size(); ++k) {
    if (!latest_[k]) {
      page.next_cursor = "p" + std::to_string(i);
      break;
    }
  }
  return page;
}

std::uint64_t CurationStore::post_decision(CurationDecision d) {
  const std::size_t i = index_of(d.utterance_id);
  if (d.timestamp.empty()) d.timestamp = utc_timestamp_now();
  std::unique_lock lock(mutex_);
  const std::uint64_t seq = journal_->append(d);
  d.sequence = seq;
  latest_[i] = std::move(d);
  return seq;
}

CorpusManifest CurationStore::export_curated(const fs::path& out_dir) const {
  std::vector<CurationDecision> decisions;
  {
    std::shared_lock lock(mutex_);
    decisions = journal_->entries();
  }
  return write_audiofolder(curated_manifest(corpus_, decisions), out_dir);
}

CurationStats CurationStore::stats() const {
  std::shared_lock lock(mutex_);
  CurationStats s;
  s.total = corpus_.utterances.size();
  s.decisions = journal_->entries().size();
  for (const auto& d : latest_) {
    if (!d) ++s.pending;
    else if (d->verdict == Verdict::kAccept) ++s.accepted;
    else ++s.rejected;
  }
  return s;
}

std::optional<CurationDecision> CurationStore::latest(const std::string& id) const {
  const std::size_t i = index_of(id);
  std::shared_lock lock(mutex_);
  return latest_[i];
}

fs::path CurationStore::audio_path(const std::string& id) const {
  return fs::absolute(corpus_.resolve(corpus_.utterances[index_of(id)]));
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>forge curation</title></head>
<body><h1>forge curation service</h1>
<p>No UI bundle is mounted (start with <code>--ui-dir</code>). API:</p>
<ul><li>GET /api/pending?limit=&amp;cursor=</li><li>GET /api/audio/{id}</li>
<li>POST /api/decisions</li><li>POST /api/export</li><li>GET /api/stats</li></ul>
</body></html>
)";

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& msg) {
  send_json(res, {{"error", kind}, {"message", msg}}, status);
}

json summary(const Utterance& u) {
  return {{"id", u.id},
          {"duration_s", u.duration_seconds()},
          {"transcript", u.transcript},
          {"source", u.source},
          {"audio_url", "/api/audio/" + httplib::detail::encode_url(u.id)}};
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFound& e) {
    send_error(res, 404, e.kind(), e.what());
  } catch (const InvalidArgument& e) {
    send_error(res, 400, e.kind(), e.what());
  } catch (const Error& e) {
    send_error(res, 500, e.kind(), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

struct CurationServer::Impl {
  CurationStore& store;
  fs::path export_dir;
  httplib::Server server;

  Impl(CurationStore& s, fs::path dir) : store(s), export_dir(std::move(dir)) {}
};

CurationServer::CurationServer(CurationStore& store, std::optional<fs::path> ui_dir,
                               fs::path default_export_dir)
    : impl_(std::make_unique<Impl>(store, std::move(default_export_dir))) {
  auto& srv = impl_->server;
  Impl* self = impl_.get();

  srv.Get("/api/pending", [self](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::size_t limit = 50;
      if (req.has_param("limit")) {
        const std::string v = req.get_param_value("limit");
        if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos || v.size() > 9) {
          throw InvalidArgument("limit must be a positive integer");
        }
        limit = std::stoul(v);
      }
      std::optional<std::string> cursor;
      if (req.has_param("cursor")) cursor = req.get_param_value("cursor");
      const PendingPage page = self->store.list_pending(limit, cursor);
      json items = json::array();
      for (const auto& u : page.items) items.push_back(summary(u));
      send_json(res, {{"items", std::move(items)},
                      {"next_cursor", page.next_cursor ? json(*page.next_cursor) : json(nullptr)}});
    });
  });

  srv.Get(R"(/api/audio/(.+))", [self](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const fs::path path = self->store.audio_path(req.matches[1].str());
      if (!fs::exists(path)) throw NotFound("audio file missing for '" + req.matches[1].str() + "'");
      const Bytes bytes = read_file_bytes(path);
      res.set_header("Accept-Ranges", "bytes");
      res.set_content(std::string(bytes.begin(), bytes.end()), "audio/wav");
    });
  });

  srv.Post("/api/decisions", [self](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      CurationDecision d = CurationDecision::from_json(req.body);
      d.sequence = 0;
      const std::uint64_t seq = self->store.post_decision(std::move(d));
      send_json(res, {{"sequence", seq}});
    });
  });

  srv.Post("/api/export", [self](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      fs::path out = self->export_dir;
      if (!req.body.empty()) {
        json body;
        try {
          body = json::parse(req.body);
        } catch (const json::parse_error& e) {
          throw InvalidArgument(std::string("export body is not valid JSON: ") + e.what());
        }
        if (body.contains("out_dir")) {
          if (!body["out_dir"].is_string()) throw InvalidArgument("'out_dir' must be a string");
          out = body["out_dir"].get<std::string>();
        }
      }
      const CorpusManifest m = self->store.export_curated(out);
      send_json(res, {{"count", m.size()}, {"out_dir", fs::absolute(out).string()}});
    });
  });

  srv.Get("/api/stats", [self](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      const CurationStats s = self->store.stats();
      send_json(res, {{"total", s.total},
                      {"pending", s.pending},
                      {"accepted", s.accepted},
                      {"rejected", s.rejected},
                      {"decisions", s.decisions}});
    });
  });

  if (ui_dir && srv.set_mount_point("/", ui_dir->string())) {
    // served from disk
  } else {
    srv.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
    });
  }
}

CurationServer::~CurationServer() { stop(); }

int CurationServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void CurationServer::serve() { impl_->server.listen_after_bind(); }

void CurationServer::stop() {
  if (impl_) impl_->server.stop();
}

bool CurationServer::running() const { return impl_->server.is_running(); }

}  // namespace forge
