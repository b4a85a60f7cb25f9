// tests/cli-test.cc

// Copyright 2026  The joinap-lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult Run(const std::string &args) {
  const std::string cmd = std::string(JOINAP_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string &name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string &f) const { return (path / f).string(); }
};

void WriteInventory(const std::string &path, const std::string &lang,
                    const std::vector<std::string> &phones) {
  nlohmann::json j;
  j["language"] = lang;
  j["phones"] = phones;
  std::ofstream(path) << j.dump();
}

}  // namespace

TEST_CASE("encode prints the bit vector; unknown phones are runtime errors") {
  const RunResult r = Run("encode --phone d");
  CHECK(r.code == 0);
  CHECK(r.out.find("010110010101010010010110100101010101010100010000000") != std::string::npos);
  CHECK(Run("encode --phone not-a-phone").code == 2);
  CHECK(Run("").code == 1);
  CHECK(Run("encode").code == 1);
  CHECK(Run("no-such-command").code == 1);
}

TEST_CASE("phone set utilities") {
  TempDir dir("joinap-cli-phoneset");
  WriteInventory(dir / "a.json", "aa", {"d", "i", "p"});
  WriteInventory(dir / "b.json", "bb", {"d", "ɛ"});
  WriteInventory(dir / "t.json", "tt", {"d", "ð"});
  const std::string invs = "--inventories " + (dir / "a.json") + " " + (dir / "b.json");

  CHECK(Run("phoneset build " + invs + " --out " + (dir / "units.txt")).code == 0);
  CHECK(Slurp(dir / "units.txt").find("ɛ") != std::string::npos);
  CHECK(fs::exists(dir / "units.txt.manifest.json"));

  const RunResult stats = Run("phoneset stats " + invs);
  CHECK(stats.code == 0);
  CHECK(stats.out.find("total\t4") != std::string::npos);

  const RunResult unseen = Run("phoneset unseen " + invs + " --target " + (dir / "t.json"));
  CHECK(unseen.code == 0);
  CHECK(unseen.out.find("unseen\t1\tð") != std::string::npos);

  WriteInventory(dir / "dup.json", "aa", {"d"});
  CHECK(Run("phoneset build " + invs + " " + (dir / "dup.json") + " --out " + (dir / "x.txt"))
            .code == 2);
}

TEST_CASE("full pipeline: synth, train, extend, finetune, eval, export") {
  TempDir dir("joinap-cli-pipeline");
  WriteInventory(dir / "a.json", "aa", {"d", "i", "ə", "p"});
  WriteInventory(dir / "b.json", "bb", {"d", "ɛ", "ð", "p"});
  WriteInventory(dir / "t.json", "tt", {"d", "i", "ʥ"});
  const std::string synth = "synth --utterances 24 --frame-dim 8 --emission-seed 1 ";
  REQUIRE(Run(synth + "--inventories " + (dir / "a.json") + " --seed 1 --out " + (dir / "a.japc"))
              .code == 0);
  REQUIRE(Run(synth + "--inventories " + (dir / "b.json") + " --seed 2 --out " + (dir / "b.japc"))
              .code == 0);
  REQUIRE(Run(synth + "--inventories " + (dir / "t.json") + " --seed 3 --out " + (dir / "t.japc"))
              .code == 0);
  CHECK(fs::exists(dir / "a.japc.manifest.json"));

  const std::string train = "train --inventories " + (dir / "a.json") + " " + (dir / "b.json") +
                            " --corpus " + (dir / "a.japc") + " " + (dir / "b.japc") +
                            " --head linear --context 1 --hidden 16 --embed-dim 8 --epochs 2"
                            " --deterministic --out ";
  REQUIRE(Run(train + (dir / "m.ckpt")).code == 0);
  REQUIRE(Run(train + (dir / "m2.ckpt")).code == 0);
  CHECK(Slurp(dir / "m.ckpt") == Slurp(dir / "m2.ckpt"));
  const std::string report = Slurp(dir / "m.ckpt.report.jsonl");
  CHECK(std::count(report.begin(), report.end(), '\n') == 4);  // epochs 0..2 + summary
  const auto manifest = nlohmann::json::parse(Slurp(dir / "m.ckpt.manifest.json"));
  CHECK(manifest["subcommand"] == "train");

  REQUIRE(Run("extend --checkpoint " + (dir / "m.ckpt") + " --target " + (dir / "t.json") +
              " --out " + (dir / "x.ckpt"))
              .code == 0);
  const RunResult zero = Run("eval --checkpoint " + (dir / "x.ckpt") + " --corpus " +
                             (dir / "t.japc") + " --inventories " + (dir / "a.json") + " " +
                             (dir / "b.json") + " --out " + (dir / "zero.jsonl"));
  REQUIRE(zero.code == 0);
  const auto rec = nlohmann::json::parse(zero.out);
  CHECK(rec["PER"].get<double>() >= 0.0);
  CHECK(rec.contains("seen_PER"));
  CHECK(rec.contains("unseen_PER"));
  CHECK(fs::exists(dir / "zero.jsonl.manifest.json"));

  REQUIRE(Run("finetune --checkpoint " + (dir / "x.ckpt") + " --corpus " + (dir / "t.japc") +
              " --epochs 1 --out " + (dir / "f.ckpt"))
              .code == 0);
  CHECK(fs::exists(dir / "f.ckpt.report.jsonl"));
  CHECK(Run("eval --checkpoint " + (dir / "f.ckpt") + " --corpus " + (dir / "t.japc")).code == 0);

  REQUIRE(Run("export-embeddings --checkpoint " + (dir / "x.ckpt") + " --out " +
              (dir / "e.csv"))
              .code == 0);
  const std::string csv = Slurp(dir / "e.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // 3 specials + 3 phones

  // The source checkpoint cannot score a corpus with phones it does not know.
  CHECK(Run("eval --checkpoint " + (dir / "m.ckpt") + " --corpus " + (dir / "t.japc")).code == 2);
}

TEST_CASE("bad input is rejected before any output is written") {
  TempDir dir("joinap-cli-validate");
  WriteInventory(dir / "a.json", "aa", {"d", "i"});
  std::ofstream(dir / "junk.japc") << "not a corpus";
  CHECK(Run("train --inventories " + (dir / "a.json") + " --corpus " + (dir / "junk.japc") +
            " --epochs 1 --out " + (dir / "m.ckpt"))
            .code == 2);
  CHECK_FALSE(fs::exists(dir / "m.ckpt"));
  CHECK_FALSE(fs::exists(dir / "m.ckpt.manifest.json"));

  CHECK(Run("train --inventories " + (dir / "a.json") + " --corpus " + (dir / "junk.japc") +
            " --loss bogus --out " + (dir / "m.ckpt"))
            .code == 1);
  CHECK(Run("synth --inventories " + (dir / "a.json") + " --min-frames 0 --out " +
            (dir / "c.japc"))
            .code != 0);
  CHECK_FALSE(fs::exists(dir / "c.japc"));
}

TEST_CASE("config files supply option values") {
  TempDir dir("joinap-cli-config");
  std::ofstream(dir / "cfg.toml") << "[encode]\nphone = [\"d\"]\n";
  const RunResult r = Run("--config " + (dir / "cfg.toml") + " encode");
  CHECK(r.code == 0);
  CHECK(r.out.find("010110010101") != std::string::npos);
}

TEST_CASE("selftest") { CHECK(Run("selftest").code == 0); }
