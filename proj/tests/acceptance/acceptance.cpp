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


// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, capped at 125.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "forge/audio.hpp"
#include "forge/augment.hpp"
#include "forge/corpus.hpp"
#include "forge/eval.hpp"
#include "forge/features.hpp"
#include "forge/metrics.hpp"
#include "forge/segmenter.hpp"
#include "forge/splitter.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using forge::AudioBuffer;
using forge::CorpusManifest;
using forge::Utterance;
using Clock = std::chrono::steady_clock;

struct Failure {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ------------------------------------------------------------ 1. corpus hours

Utterance one_hertz(const std::string& id, const std::string& source, std::int64_t samples) {
  Utterance u;
  u.id = id;
  u.transcript = "नमूना";
  u.source = source;
  u.num_samples = samples;
  u.sample_rate = 1;
  u.audio = std::make_shared<AudioBuffer>(AudioBuffer::Samples::Constant(samples, 0.1f), 1);
  return u;
}

std::string corpus_hours() {
  const auto t0 = Clock::now();
  oracle::TempDir dir("forge-acc-hours");
  // Table 1, in whole seconds; hours * 3600 is integral for every row.
  const std::vector<std::pair<std::string, double>> table = {
      {"fleurs", 10.38}, {"commonvoice", 1.28}, {"slr43", 2.82}, {"slr143", 1.25}, {"custom", 18.24}};
  std::vector<CorpusManifest> parts;
  for (const auto& [name, hours] : table) {
    CorpusManifest m{name, {one_hertz("a", name, std::llround(hours * 3600))}, {}};
    forge::write_audiofolder(m, dir / name);
    parts.push_back(forge::read_audiofolder(dir / name));
    parts.back().name = name;
  }
  const auto all = forge::merge(parts, "all");
  double report_total = 0.0;
  for (const auto& row : forge::duration_report(all)) report_total += row.seconds;
  require(forge::format_hours(report_total / 3600.0) == "33.97",
          "raw total " + forge::format_hours(report_total / 3600.0));

  // The custom partition after cleanup (13.585 h) plus one noisy copy per
  // utterance, replacing the raw custom partition.
  CorpusManifest custom{"custom", {}, {}};
  const std::int64_t cleaned = std::llround(13.585 * 3600);
  auto orig = one_hertz("c", "custom", cleaned);
  auto copy = orig;
  copy.id = "c#aug-wn";
  copy.augmented = true;
  custom.utterances = {orig, copy};
  forge::write_audiofolder(custom, dir / "custom-aug");
  parts.back() = forge::read_audiofolder(dir / "custom-aug");
  parts.back().name = "custom";
  require(parts.back().utterances[1].augmented, "augmented flag lost on disk");
  const auto grown = forge::merge(parts, "all");
  require(forge::format_hours(parts.back().total_seconds() / 3600.0) == "27.17",
          "doubled custom " + forge::format_hours(parts.back().total_seconds() / 3600.0));
  require(forge::format_hours(grown.total_seconds() / 3600.0) == "42.90",
          "augmented total " + forge::format_hours(grown.total_seconds() / 3600.0));
  require(seconds_since(t0) < 1.0, "took " + std::to_string(seconds_since(t0)) + " s");
  return "33.97 h raw, 42.90 h with doubled custom";
}

// ----------------------------------------------------------- 2. WER oracle

std::string wer_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(20260101);
  std::uniform_int_distribution<int> len(0, 12), sym(0, 4);
  const std::vector<std::string> alphabet = {"क", "ख", "ग", "घ", "ङ"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> ref(len(g)), hyp(len(g));
    for (auto& t : ref) t = alphabet[sym(g)];
    for (auto& t : hyp) t = alphabet[sym(g)];
    const auto r = forge::align(ref, hyp);
    const auto o = oracle::sdi(ref, hyp);
    const auto total = r.substitutions + r.deletions + r.insertions;
    require(total == oracle::edit_distance(ref, hyp), "total differs from DP at trial " + std::to_string(trial));
    require(r.substitutions == o.s && r.deletions == o.d && r.insertions == o.i,
            "S/D/I differ at trial " + std::to_string(trial));
    if (ref.size() + hyp.size() <= 12) {
      require(total == oracle::exhaustive_distance(ref, hyp),
              "total differs from exhaustive search at trial " + std::to_string(trial));
    }
  }
  require(seconds_since(t0) < 10.0, "took " + std::to_string(seconds_since(t0)) + " s");
  return "1000/1000 pairs agree";
}

// ------------------------------------------------------ 3. WER over 100

std::string wer_over_hundred() {
  const std::vector<forge::TranscriptPair> pairs = {
      {"र साफ महिला च्याम्पियनसिपको सातौं संस्करण भोलीदेखि काठमाडौंमा उद्घाटन खेलमा भारत र पाकिस्तानबीच प्रतिस्पर्धा बलियो टोली नेपाललाई इतिहास रच्ने मौका ।", "Rassa, you’ve got to understand, you’ve got to understand. Rassa, you’ve got to understand. Rassa, you’ve got to understand. Rassa, you’ve got to understand."},
      {"र साफ महिला च्याम्पियनसिपको सातौं संस्करण भोलीदेखि काठमाडौंमा उद्घाटन खेलमा भारत र पाकिस्तानबीच प्रतिस्पर्धा बलियो टोली नेपाललाई इतिहास रच्ने मौका ।", "Raasad Mahila Champin Sip ko Saatom Samskarant Boli Dhe Ki Kart Mandoma. Uddhgatant Kheelma Bhaar Atra Pakistan Bis Pratis Pratis Pradha. Balyotoli Neparla Itihas Rox Ne Mau Ka."},
      {"प्रतिकूल मौसमले उडान ठप्प हुँदा मन्थलीमा ३ दिनदेखि अलपत्र पर्यटकलाई सेनाको जहाजबाट लुक्का पुर्याइने बिपी राजमार्गमा साँझ ६ देखि बिहान ४ बजेसम्म सवारी चलाउन रोक ।", "pratikul mousam le udan thapa huda muntali matindin deki alapatra podyata klasena kudzahazbatun lu klapuryaini dpi razmargama saa jatshaudi ki bihanat saar bodis sama savali saalaun arho"},
      {"प्रतिकूल मौसमले उडान ठप्प हुँदा मन्थलीमा ३ दिनदेखि अलपत्र पर्यटकलाई सेनाको जहाजबाट लुक्का पुर्याइने बिपी राजमार्गमा साँझ ६ देखि बिहान ४ बजेसम्म सवारी चलाउन रोक ।", "Pratikul Mausam le Udan Thappahuda Manthali Matin Dindi ki alapatra Pariyataklaisena Kuzhaha Zbata Nukhla Puriayini Deepi Rajmargama Saadach Saadakhi Bihana Chhar Bhajis Samasavari Salau Na Roo"},
  };
  const auto w = forge::corpus_wer(pairs);
  std::size_t errors = 0, words = 0;
  for (const auto& p : pairs) {
    const auto ref = forge::tokenize(forge::normalize(p.ref));
    errors += oracle::edit_distance(ref, forge::tokenize(forge::normalize(p.hyp)));
    words += ref.size();
  }
  const double expect = static_cast<double>(errors) / static_cast<double>(words);
  require(w.wer() > 1.0, "pooled WER " + std::to_string(100 * w.wer()) + "% is not above 100%");
  require(w.errors == errors && w.ref_words == words && w.wer() == expect,
          "pooled WER " + std::to_string(w.wer()) + " vs oracle " + std::to_string(expect));
  char buf[64];
  std::snprintf(buf, sizeof buf, "pooled WER %.2f%% (%zu/%zu)", 100 * expect, errors, words);
  return buf;
}

// --------------------------------------------------------- 4. silences

std::string silence_pipeline() {
  const int rate = 16000;
  const forge::SegmentSpec spec;
  const std::int64_t frame = spec.frame_samples(rate);
  const std::vector<double> gaps = {0.8, 1.5, 3.0};
  std::vector<AudioBuffer> parts = {oracle::speechlike(3.0, rate, 1)};
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    parts.push_back(oracle::zeros(gaps[k], rate));
    parts.push_back(oracle::speechlike(3.0, rate, 2 + k));
  }
  const auto in = oracle::concat(parts);
  const auto spans = forge::detect_silences(in, spec);
  require(spans.size() == 2, "detected " + std::to_string(spans.size()) + " spans, expected 2");
  for (std::size_t k = 0; k < 2; ++k) {
    const auto want = std::llround(gaps[k + 1] * rate);
    require(std::llabs(spans[k].length() - want) <= frame,
            "span " + std::to_string(k) + " is " + std::to_string(spans[k].length()) + " samples");
  }
  const auto out = forge::strip_silences(in, spans);
  const std::int64_t expect = in.size() - std::llround((1.5 + 3.0) * rate);
  const std::int64_t err = std::llabs(out.size() - expect);
  require(err <= 2 * frame, "duration off by " + std::to_string(err) + " samples");
  return "removed 1.5 s and 3 s, kept 0.8 s; error " + std::to_string(err) + " samples";
}

// ----------------------------------------------------------- 5. chunking

std::string chunking() {
  const int rate = 16000;
  forge::SegmentSpec spec;
  const auto max_len = std::llround(spec.max_duration_s * rate);
  std::mt19937_64 g(75);
  std::uniform_real_distribution<double> dur(1.0, 120.0), amp(-0.4, 0.4), unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    AudioBuffer b;
    b.sample_rate = rate;
    b.samples.resize(std::llround(dur(g) * rate));
    for (Eigen::Index i = 0; i < b.samples.size(); ++i) b.samples[i] = static_cast<float>(amp(g));
    // A few short pauses give the cut search something to find.
    for (int p = 0; p < 3; ++p) {
      const double at = unit(g) * b.duration_seconds();
      oracle::zero_range(b, at, std::min(0.4 * unit(g), b.duration_seconds() - at));
    }
    const auto chunks = forge::chunk(b, spec);
    std::int64_t sum = 0;
    for (const auto& c : chunks) {
      require(c.size() <= max_len, "chunk of " + std::to_string(c.size()) + " samples in trial " + std::to_string(trial));
      require(c.size() > 0, "empty chunk in trial " + std::to_string(trial));
      sum += c.size();
    }
    require(sum == b.size(), "chunks sum to " + std::to_string(sum) + " of " + std::to_string(b.size()));
  }
  const auto hard = forge::chunk(oracle::speechlike(75.0, rate, 9), spec);
  std::vector<double> secs;
  for (const auto& c : hard) secs.push_back(c.duration_seconds());
  require(secs == std::vector<double>{30.0, 30.0, 15.0}, "75 s split into " + std::to_string(secs.size()) + " chunks");
  return "200 random inputs ok; 75 s -> [30, 30, 15]";
}

// --------------------------------------------------------- 6. resampling

std::string resampling() {
  const auto tone = oracle::sine(440.0, 1.0, 44100);
  const auto out = forge::resample(tone, 16000);
  const std::int64_t want = 44100LL * 16000 / 44100;
  require(std::llabs(out.size() - want) <= 1, "length " + std::to_string(out.size()));
  const auto x = oracle::to_vector(out);
  const std::size_t n_fft = 16000;  // 1 Hz bins
  const std::size_t peak = oracle::dft_peak_bin(x, n_fft, 1, n_fft / 2);
  require(peak >= 439 && peak <= 441, "peak at bin " + std::to_string(peak));

  const auto back = forge::decode_wav(forge::encode_wav(out));
  require(back.size() == out.size() && back.sample_rate == 16000, "WAV round trip changed the shape");
  const double lsb = 1.0 / 32768.0;
  const double worst = (back.samples - out.samples).cwiseAbs().maxCoeff();
  require(worst <= lsb, "round-trip error " + std::to_string(worst / lsb) + " LSB");
  return "peak bin " + std::to_string(peak) + ", length " + std::to_string(out.size()) + ", round trip " +
         std::to_string(worst / lsb) + " LSB";
}

// ------------------------------------------------------- 7. augmentation

std::string augmentation() {
  std::mt19937_64 g(7);
  std::uniform_int_distribution<int> half_len(8000, 80000);
  std::uniform_real_distribution<double> snr(10.0, 30.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::int64_t n = 2LL * half_len(g);
    const auto sig = oracle::speechlike(static_cast<double>(n) / 16000, 16000, g());
    forge::NoiseSpec spec;
    spec.target_snr_db = snr(g);
    spec.seed = g();
    const auto a = forge::augment_with_noise(sig, spec);
    require(a.ok(), "segment " + std::to_string(k) + " skipped: " + forge::to_string(*a.skipped));
    const Eigen::VectorXf noise = a.audio->samples - sig.samples;
    const double measured = 10.0 * std::log10(forge::mean_power(sig.samples) / forge::mean_power(noise));
    worst = std::max(worst, std::abs(measured - spec.target_snr_db));
    require(std::abs(measured - spec.target_snr_db) <= 0.5,
            "segment " + std::to_string(k) + " measured " + std::to_string(measured) + " dB");
    const auto again = forge::augment_with_noise(sig, spec);
    require(forge::encode_wav(*a.audio) == forge::encode_wav(*again.audio), "not byte-identical under a fixed seed");
  }
  const auto sig = oracle::speechlike(2.0, 16000, 3);
  forge::NoiseSpec spec;
  spec.seed = 1;
  const auto too_long = forge::generate_white_noise(sig.size() + 1, spec);
  const auto skipped = forge::augment_with_noise(sig, too_long, spec);
  require(!skipped.ok() && skipped.skipped == forge::SkipReason::kNoiseTooLong, "over-length noise was not skipped");
  char buf[96];
  std::snprintf(buf, sizeof buf, "20 segments within %.3f dB; deterministic; over-length noise skipped", worst);
  return buf;
}

// ------------------------------------------------------------- 8. split

CorpusManifest plain(std::size_t n) {
  CorpusManifest m{"m", {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    Utterance u;
    u.id = "u" + std::to_string(i);
    u.num_samples = 16000;
    m.utterances.push_back(u);
  }
  return m;
}

std::vector<std::string> ids(const CorpusManifest& m) {
  std::vector<std::string> out;
  for (const auto& u : m.utterances) out.push_back(u.id);
  return out;
}

std::string splitting() {
  forge::SplitSpec spec;
  spec.seed = 1234567;
  const auto m = plain(100);
  const auto a = forge::split(m, spec);
  require(a.train.size() == 80 && a.eval.size() == 20,
          std::to_string(a.train.size()) + "/" + std::to_string(a.eval.size()));
  const auto b = forge::split(m, spec);
  require(ids(a.train) == ids(b.train) && ids(a.eval) == ids(b.eval), "same seed, different split");
  require(a.report.to_json() == b.report.to_json(), "same seed, different report");

  std::mt19937_64 g(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    auto r = plain(2 + g() % 80);
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (g() % 2) {
        auto c = r.utterances[i];
        c.id += "#aug-wn";
        c.augmented = true;
        r.utterances.push_back(c);
      }
    }
    std::shuffle(r.utterances.begin(), r.utterances.end(), g);
    forge::SplitSpec s;
    s.seed = g();
    const auto out = forge::split(r, s);
    std::set<std::string> train_bases;
    for (const auto& u : out.train.utterances) train_bases.insert(forge::base_id(u.id));
    for (const auto& u : out.eval.utterances) {
      require(!train_bases.contains(forge::base_id(u.id)), "group " + forge::base_id(u.id) + " on both sides");
    }
    std::set<std::string> everywhere;
    for (const auto* side : {&out.train, &out.eval}) {
      std::set<std::string> here;
      for (const auto& u : side->utterances) here.insert(u.id);
      for (const auto& id : here) {
        require(!id.ends_with("#aug-wn") || here.contains(forge::base_id(id)), id + " separated from its original");
      }
      everywhere.insert(here.begin(), here.end());
    }
  }
  return "100 -> 80/20; deterministic; 1000 manifests leak-free";
}

// ---------------------------------------------------------- 9. features

std::string features() {
  const forge::FeatureSpec spec;
  std::size_t checked = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    auto x = oracle::speechlike(30.0, 16000, seed);
    if (seed == 3) oracle::zero_range(x, 10.0, 5.0);
    const auto a = forge::log_mel(x, spec);
    require(a.values.rows() == 80 && a.values.cols() == 3000,
            std::to_string(a.values.rows()) + "x" + std::to_string(a.values.cols()));
    AudioBuffer doubled = x;
    doubled.samples *= 2.0f;
    const auto b = forge::log_mel(doubled, spec);
    const double floor = std::log10(spec.log_floor);
    for (Eigen::Index r = 0; r < a.values.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.values.cols(); ++c) {
        if (a.values(r, c) <= floor) continue;
        ++checked;
        const double d = b.values(r, c) - a.values(r, c);
        require(std::abs(d - std::log10(4.0)) <= 1e-6, "cell (" + std::to_string(r) + "," + std::to_string(c) +
                                                           ") moved by " + std::to_string(d));
      }
    }
  }
  require(checked > 0, "no cells above the floor");
  return "80x3000; " + std::to_string(checked) + " above-floor cells shift by log10(4)";
}

// -------------------------------------------------------- 10. audiofolder

std::string audiofolder() {
  std::mt19937_64 g(50);
  const std::vector<std::string> pieces = {"नेपाल", ",", "\"", "।", "॥", " ", "क,ख", "\"उद्धरण\"", "abc", "१२३", "'", ";"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    oracle::TempDir dir("forge-acc-af");
    CorpusManifest m{"m", {}, {}};
    const std::size_t n = 1 + g() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      Utterance u;
      u.id = "t" + std::to_string(trial) + "_" + std::to_string(i) + (g() % 3 == 0 ? "#aug-wn" : "");
      for (std::size_t k = 0, len = 1 + g() % 8; k < len; ++k) u.transcript += pieces[pick(g)];
      const auto samples = static_cast<std::int64_t>(1 + g() % 400);
      u.audio = std::make_shared<AudioBuffer>(oracle::sine(300.0 + i, static_cast<double>(samples) / 16000, 16000));
      u.num_samples = u.audio->size();
      u.gender = static_cast<forge::Gender>(g() % 3);
      if (g() % 2) u.age = static_cast<int>(18 + g() % 60);
      u.background = static_cast<forge::Background>(g() % 4);
      u.sentiment = static_cast<forge::Sentiment>(g() % 5);
      u.source = g() % 2 ? "custom" : "fleurs, \"clean\"";
      u.augmented = u.id.ends_with("#aug-wn");
      if (g() % 2) u.extra["speaker"] = "s" + std::to_string(g() % 9) + ",\"x\"";
      m.utterances.push_back(u);
    }
    const auto written = forge::write_audiofolder(m, dir.path());
    const auto read = forge::read_audiofolder(dir.path());
    require(read.utterances == written.utterances, "trial " + std::to_string(trial) + " differs after reading back");
    for (std::size_t i = 0; i < n; ++i) {
      require(read.utterances[i].transcript == m.utterances[i].transcript, "transcript changed");
      const auto audio = read.load_audio(read.utterances[i]);
      require(audio.size() == m.utterances[i].audio->size(), "audio length changed");
    }
  }
  return "50 manifests round-trip";
}

// ------------------------------------------------------------ 11. report

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  std::getline(ss, cell, '|');  // before the leading pipe
  while (std::getline(ss, cell, '|')) {
    const auto b = cell.find_first_not_of(' ');
    const auto e = cell.find_last_not_of(' ');
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

std::string report_rendering() {
  // Tab-separated as printed, markup stripped.
  const std::string published =
      "Models\tWhisper\tFleurs\n"
      "tiny\t101.8\t68.5\n"
      "base\t102.4\t70.2\n"
      "small\t69.5\t36.2\n"
      "medium\t54.4\t23.8\n";
  std::vector<std::vector<std::string>> want;
  {
    std::stringstream ss(published);
    std::string line;
    while (std::getline(ss, line)) {
      std::vector<std::string> row;
      std::stringstream ls(line);
      std::string c;
      while (std::getline(ls, c, '\t')) row.push_back(c);
      want.push_back(row);
    }
  }
  std::vector<forge::EvalReport> reports;
  for (std::size_t col = 1; col < want[0].size(); ++col) {
    forge::EvalReport r;
    for (std::size_t row = 1; row < want.size(); ++row) {
      r.rows.push_back({want[0][col], want[row][0], std::stod(want[row][col])});
    }
    reports.push_back(r);
  }
  const std::string md = forge::render_report(reports, forge::ReportFormat::kMarkdown, {1, true});
  std::vector<std::vector<std::string>> got;
  std::stringstream ss(md);
  std::string line;
  for (int i = 0; std::getline(ss, line); ++i) {
    if (i == 1) {
      require(line == "|---|---|---|", "separator row '" + line + "'");
      continue;
    }
    got.push_back(cells(line));
  }
  require(got == want, "rendered table differs:\n" + md);
  return "5x3 cells match";
}

// -------------------------------------------------------- 12. end to end

struct Captured {
  int status = -1;
  std::string out;
};

Captured run(const std::string& cmd) {
  Captured c;
  FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return c;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) c.out.append(buf, n);
  const int st = ::pclose(p);
  c.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return c;
}

std::string end_to_end() {
  const auto t0 = Clock::now();
  oracle::TempDir dir("forge-acc-e2e");
  const std::string cli = FORGE_CLI;
  const std::vector<std::string> texts = {
      "नेपालको राजधानी काठमाडौं हो र यहाँ धेरै मानिसहरू बस्छन् उपत्यकामा तीनवटा सहर छन्",
      "हिमालको काखमा रहेको यो देश सुन्दर छ पर्यटकहरू हरेक वर्ष यहाँ घुम्न आउँछन्",
      "विद्यालयमा विद्यार्थीहरू पढ्दै छन् शिक्षकले नयाँ पाठ सिकाउँदै हुनुहुन्छ आज बिदा छैन"};
  CorpusManifest raw{"raw", {}, {}};
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Utterance u;
    u.id = "rec" + std::to_string(i + 1);
    u.transcript = texts[i];
    u.source = "custom";
    u.audio = std::make_shared<AudioBuffer>(oracle::speechlike(90.0, 22050, 100 + i));
    raw.utterances.push_back(u);
  }
  forge::write_audiofolder(raw, dir / "raw");
  const auto q = [](const fs::path& p) { return forge::shell_quote(p.string()); };
  const std::vector<std::string> steps = {
      cli + " ingest " + q(dir / "raw") + " " + q(dir / "ingested"),
      cli + " segment " + q(dir / "ingested") + " " + q(dir / "segments"),
      cli + " augment " + q(dir / "segments") + " " + q(dir / "augmented") + " --seed 7",
      cli + " split " + q(dir / "augmented") + " " + q(dir / "split") + " --seed 1234567",
  };
  for (const auto& s : steps) {
    const auto r = run(s);
    require(r.status == 0, "'" + s + "' exited " + std::to_string(r.status) + ": " + r.out);
  }
  const auto eval_set = forge::read_audiofolder(dir / "split/eval");
  require(!eval_set.empty(), "empty eval split");
  std::map<std::string, std::string> refs;
  for (const auto& u : eval_set.utterances) refs[u.id] = u.transcript;
  forge::write_hypothesis_tsv(dir / "refs.tsv", refs);
  // Identity stub: prints the reference for the utterance it is asked about.
  const std::string stub = "awk -F '\\t' -v id={id} '$1 == id { print $2 }' " + q(dir / "refs.tsv");
  const auto r = run(cli + " eval " + q(dir / "split/eval") + " --command " + forge::shell_quote(stub) + " --out " +
                     q(dir / "run.json") + " --model stub");
  require(r.status == 0, "eval exited " + std::to_string(r.status) + ": " + r.out);
  require(r.out.find("WER 0.00") != std::string::npos, "eval printed: " + r.out);
  const auto run_record = forge::EvalRun::load(dir / "run.json");
  require(run_record.wer() == 0.0 && run_record.ref_words > 0, "run record WER " + std::to_string(run_record.wer()));
  const double took = seconds_since(t0);
  require(took < 60.0, "took " + std::to_string(took) + " s");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu eval utterances, WER 0.00, %.1f s", eval_set.size(), took);
  return buf;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"corpus-accounting", corpus_hours},
      {"wer-oracle-equivalence", wer_oracle},
      {"wer-over-100", wer_over_hundred},
      {"silence-pipeline", silence_pipeline},
      {"chunking", chunking},
      {"resampling", resampling},
      {"augmentation", augmentation},
      {"split", splitting},
      {"features", features},
      {"audiofolder-round-trip", audiofolder},
      {"report-rendering", report_rendering},
      {"end-to-end", end_to_end},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    std::string detail;
    bool ok = false;
    try {
      detail = check();
      ok = true;
    } catch (const Failure& f) {
      detail = f.why;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    failures += ok ? 0 : 1;
  }
  return std::min(failures, 125);
}
