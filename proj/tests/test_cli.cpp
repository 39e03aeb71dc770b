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


// Drives the forge binary the way a user would.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>

#include "forge/corpus.hpp"
#include "forge/eval.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using forge::CorpusManifest;
using forge::Utterance;

struct Run {
  int status = -1;
  std::string out;
};

Run forge_cli(const std::string& args) {
  Run r;
  FILE* p = ::popen((std::string(FORGE_CLI) + " " + args + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string q(const fs::path& p) { return forge::shell_quote(p.string()); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Utterance spoken(const std::string& id, double seconds, std::uint64_t seed, const std::string& text) {
  Utterance u;
  u.id = id;
  u.transcript = text;
  u.source = "custom";
  u.audio = std::make_shared<forge::AudioBuffer>(oracle::speechlike(seconds, 16000, seed));
  return u;
}

class Cli : public ::testing::Test {
 protected:
  oracle::TempDir dir{"forge-cli"};
};

TEST_F(Cli, SegmentSeventyFiveSecondsGivesThree) {
  forge::write_audiofolder(CorpusManifest{"c", {spoken("long", 75.0, 1, "एक दुई तीन चार पाँच छ")}, {}}, dir / "in");
  const auto r = forge_cli("segment " + q(dir / "in") + " " + q(dir / "out"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("segments 3 kept 3 rejected 0"), std::string::npos) << r.out;
  const auto m = forge::read_audiofolder(dir / "out");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m.utterances[0].duration_seconds(), 30.0);
  EXPECT_DOUBLE_EQ(m.utterances[2].duration_seconds(), 15.0);
}

TEST_F(Cli, ConfigThenFlagPrecedence) {
  forge::write_audiofolder(CorpusManifest{"c", {spoken("long", 75.0, 1, "एक दुई तीन चार")}, {}}, dir / "in");
  std::ofstream(dir / "forge.toml") << "[chunk]\nmax_s = 20\n";
  auto r = forge_cli("--config " + q(dir / "forge.toml") + " segment " + q(dir / "in") + " " + q(dir / "a"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(forge::read_audiofolder(dir / "a").size(), 4u);  // 20 + 20 + 20 + 15
  r = forge_cli("--config " + q(dir / "forge.toml") + " segment --max-s 30 " + q(dir / "in") + " " + q(dir / "b"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(forge::read_audiofolder(dir / "b").size(), 3u);
}

TEST_F(Cli, StatsOnTableOneFixture) {
  CorpusManifest m{"all", {}, {}};
  const std::vector<std::pair<std::string, double>> rows = {
      {"fleurs", 10.38}, {"commonvoice", 1.28}, {"slr43", 2.82}, {"slr143", 1.25}, {"custom", 18.24}};
  for (const auto& [source, hours] : rows) {
    Utterance u;
    u.id = source;
    u.transcript = "क";
    u.source = source;
    const auto n = std::llround(hours * 3600);
    u.audio = std::make_shared<forge::AudioBuffer>(forge::AudioBuffer::Samples::Constant(n, 0.1f), 1);
    m.utterances.push_back(u);
  }
  forge::write_audiofolder(m, dir / "table1");
  const auto r = forge_cli("stats " + q(dir / "table1"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("total\t5\t33.97"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("fleurs\t1\t10.38"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("unique_words\t1"), std::string::npos) << r.out;
}

TEST_F(Cli, EvalIdentityStubAndReport) {
  CorpusManifest m{"fixture", {spoken("a", 1.0, 1, "नमस्ते संसार"), spoken("b", 1.0, 2, "शुभ प्रभात")}, {}};
  forge::write_audiofolder(m, dir / "m");
  forge::write_hypothesis_tsv(dir / "refs.tsv", {{"a", "नमस्ते संसार"}, {"b", "शुभ प्रभात"}});
  const std::string stub = "awk -F '\\t' -v id={id} '$1 == id { print $2 }' " + q(dir / "refs.tsv");
  auto r = forge_cli("eval --manifest " + q(dir / "m") + " --command " + forge::shell_quote(stub) + " --out " +
                     q(dir / "run.json") + " --model stub");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("WER 0.00\n", 0), 0u) << r.out;
  EXPECT_EQ(forge::EvalRun::load(dir / "run.json").ref_words, 4u);

  r = forge_cli("report --format csv " + q(dir / "run.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out, "Datasets,stub\nm,0.0\n");  // dataset label is the directory name
}

TEST_F(Cli, HypothesisFileEval) {
  CorpusManifest m{"fixture", {spoken("a", 1.0, 1, "क ख ग घ")}, {}};
  forge::write_audiofolder(m, dir / "m");
  forge::write_hypothesis_tsv(dir / "hyp.tsv", {{"a", "क ख ग"}});
  const auto r = forge_cli("eval " + q(dir / "m") + " --hyp " + q(dir / "hyp.tsv") + " --out " + q(dir / "run.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("WER 25.00\n", 0), 0u) << r.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(forge_cli("").status, 2);
  EXPECT_EQ(forge_cli("segment --no-such-flag a b").status, 2);
  EXPECT_EQ(forge_cli("stats " + q(dir / "absent")).status, 3);
  auto r = forge_cli("split --train 1.5 " + q(dir / "absent") + " " + q(dir / "out"));
  EXPECT_EQ(r.status, 2) << r.out;

  forge::write_audiofolder(CorpusManifest{"c", {spoken("a", 1.0, 1, "क")}, {}}, dir / "m");
  r = forge_cli("eval " + q(dir / "m") + " --command false --out " + q(dir / "run.json"));
  EXPECT_EQ(r.status, 4) << r.out;
  EXPECT_NE(r.out.find("error[external-command]"), std::string::npos) << r.out;
}

TEST_F(Cli, WorkerCountDoesNotChangeOutput) {
  CorpusManifest m{"c", {}, {}};
  for (int i = 0; i < 5; ++i) m.utterances.push_back(spoken("r" + std::to_string(i), 40.0 + i, i, "एक दुई तीन चार पाँच"));
  forge::write_audiofolder(m, dir / "in");
  for (const char* w : {"1", "3"}) {
    const auto seg = forge_cli(std::string("--workers ") + w + " segment " + q(dir / "in") + " " + q(dir / ("seg" + std::string(w))));
    ASSERT_EQ(seg.status, 0) << seg.out;
    const auto aug = forge_cli(std::string("--workers ") + w + " augment --seed 5 " + q(dir / ("seg" + std::string(w))) +
                               " " + q(dir / ("aug" + std::string(w))));
    ASSERT_EQ(aug.status, 0) << aug.out;
  }
  EXPECT_EQ(slurp(dir / "aug1/metadata.csv"), slurp(dir / "aug3/metadata.csv"));
  for (const auto& u : forge::read_audiofolder(dir / "aug1").utterances) {
    EXPECT_EQ(slurp(dir / "aug1" / u.audio_path), slurp(dir / "aug3" / u.audio_path)) << u.audio_path;
  }
}

TEST_F(Cli, SplitWritesReport) {
  CorpusManifest m{"c", {}, {}};
  for (int i = 0; i < 10; ++i) m.utterances.push_back(spoken("u" + std::to_string(i), 0.1, i, "क"));
  forge::write_audiofolder(m, dir / "in");
  const auto r = forge_cli("split --seed 3 " + q(dir / "in") + " " + q(dir / "out"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(forge::read_audiofolder(dir / "out/train").size(), 8u);
  EXPECT_EQ(forge::read_audiofolder(dir / "out/eval").size(), 2u);
  EXPECT_NE(slurp(dir / "out/split_report.json").find("\"seed\": 3"), std::string::npos);
}

}  // namespace
