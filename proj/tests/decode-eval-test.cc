// tests/decode-eval-test.cc

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

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "joinap/decode-eval.h"
#include "oracles.h"

using namespace joinap;

namespace {

const FeatureTable &Table() {
  static const FeatureTable t = FeatureTable::ReadFile(JOINAP_FEATURES);
  return t;
}

const std::vector<std::string> kUnits = {"<blk>", "<spn>", "<nsn>", "d", "i", "ə", "kʲ"};

// Frames are one-hot unit indicators; a flat head with a scaled identity
// then decodes them perfectly.
AcousticModel IndicatorModel(double blank_bias = 0.0) {
  const int n = static_cast<int>(kUnits.size());
  AcousticModel m;
  m.units = kUnits;
  m.phono = EncodeUnits(Table(), kUnits);
  EncoderConfig c;
  c.input_dim = n;
  c.context = 0;
  c.hidden_dims = {};
  c.output_dim = n;
  c.activation = Activation::kIdentity;
  m.encoder = EncoderParams::Zeros(c);
  m.encoder.weights[0] = Matrix::Identity(n, n);
  m.encoder.biases[0](0) = blank_bias;
  m.head = FlatHead{10.0 * Matrix::Identity(n, n)};
  return m;
}

Corpus IndicatorCorpus(std::mt19937_64 &rng, int count) {
  Corpus c;
  c.units = kUnits;
  const int n = static_cast<int>(kUnits.size());
  for (int k = 0; k < count; ++k) {
    Utterance u;
    u.language_id = "xx";
    int prev = -1;
    while (u.labels.size() < 5) {
      const int l = std::uniform_int_distribution<int>(3, n - 1)(rng);
      if (l == prev) continue;
      u.labels.push_back(l);
      prev = l;
    }
    u.frames = Matrix::Zero(static_cast<Eigen::Index>(2 * u.labels.size()), n);
    for (size_t i = 0; i < u.labels.size(); ++i) {
      u.frames(static_cast<Eigen::Index>(2 * i), u.labels[i]) = 1.0;
      u.frames(static_cast<Eigen::Index>(2 * i + 1), 0) = 1.0;
    }
    c.utterances.push_back(std::move(u));
  }
  return c;
}

}  // namespace

TEST_CASE("edit distance examples") {
  CHECK(EditDistance(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 4}) == EditCounts{1, 0, 0});
  CHECK(EditDistance(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}) == EditCounts{0, 0, 0});
  CHECK(EditDistance(std::vector<int>{}, std::vector<int>{1, 2}) == EditCounts{0, 2, 0});
  CHECK(EditDistance(std::vector<int>{1, 2}, std::vector<int>{}) == EditCounts{0, 0, 2});
  // "ab" vs "ba": two substitutions beat one insertion plus one deletion.
  CHECK(EditDistance(std::vector<int>{1, 2}, std::vector<int>{2, 1}) == EditCounts{2, 0, 0});
}

TEST_CASE("edit distance matches exhaustive alignment search") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> ref, hyp;
    const int lr = std::uniform_int_distribution<int>(0, 6)(rng);
    const int lh = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int i = 0; i < lr; ++i) ref.push_back(std::uniform_int_distribution<int>(1, 3)(rng));
    for (int i = 0; i < lh; ++i) hyp.push_back(std::uniform_int_distribution<int>(1, 3)(rng));
    const EditCounts got = EditDistance(ref, hyp);
    const auto want = oracle::EditDistance(ref, hyp);
    CHECK(got.Errors() == want.cost);
    CHECK(got.substitutions == want.substitutions);
    CHECK(got.insertions + got.deletions == want.insertions + want.deletions);
    CHECK(got.deletions - got.insertions == lr - lh);
  }
}

TEST_CASE("perfect and silent models") {
  std::mt19937_64 rng(42);
  const Corpus c = IndicatorCorpus(rng, 10);
  const EvalResult perfect = Evaluate(IndicatorModel(), c);
  CHECK(perfect.per == 0.0);
  CHECK(perfect.total.Errors() == 0);
  CHECK(perfect.ref_length == 50);

  const EvalResult silent = Evaluate(IndicatorModel(100.0), c);
  CHECK(silent.per == 1.0);
  CHECK(silent.total == EditCounts{0, 0, 50});
  CHECK(silent.confusion.at({"d", "<eps>"}) > 0);
}

TEST_CASE("seen and unseen PER add back up") {
  std::mt19937_64 rng(43);
  Corpus c = IndicatorCorpus(rng, 30);
  // Corrupt some frames so there are errors of every kind.
  for (auto &u : c.utterances) {
    const Eigen::Index t = std::uniform_int_distribution<Eigen::Index>(0, u.frames.rows() - 1)(rng);
    u.frames.row(t).setZero();
    u.frames(t, std::uniform_int_distribution<int>(0, 6)(rng)) = 1.0;
  }
  const std::set<std::string> seen = {"d", "i"};
  const EvalResult r = Evaluate(IndicatorModel(), c, &seen);
  CHECK(r.total.Errors() > 0);
  CHECK(r.seen_ref_length + r.unseen_ref_length == r.ref_length);
  CHECK(r.seen_errors + r.unseen_errors == r.total.Errors());
  CHECK(r.seen_per * static_cast<double>(r.seen_ref_length) +
            r.unseen_per * static_cast<double>(r.unseen_ref_length) ==
        doctest::Approx(r.per * static_cast<double>(r.ref_length)));
  const EvalResult all_seen = Evaluate(IndicatorModel(), c);
  CHECK(std::isnan(all_seen.unseen_per));
  CHECK(all_seen.per == r.per);
}

TEST_CASE("PER is invariant under relabeling units") {
  std::mt19937_64 rng(44);
  Corpus c = IndicatorCorpus(rng, 10);
  for (auto &u : c.utterances) u.frames += 0.3 * oracle::RandomMatrix(u.frames.rows(), 7, rng);
  AcousticModel m = IndicatorModel();
  const double base = Evaluate(m, c).per;

  // Reverse the phone part of the unit order in both the model and corpus.
  const std::vector<int> perm = {0, 1, 2, 6, 5, 4, 3};
  AcousticModel pm = m;
  Corpus pc = c;
  for (int i = 0; i < 7; ++i) pm.units[perm[i]] = m.units[i];
  pm.phono = EncodeUnits(Table(), pm.units);
  Matrix w = Matrix::Zero(7, 7);
  for (int i = 0; i < 7; ++i) w(perm[i], i) = 1.0;
  pm.encoder.weights[0] = w;
  pc.units = pm.units;
  for (auto &u : pc.utterances)
    for (int &l : u.labels) l = perm[l];
  CHECK(Evaluate(pm, pc).per == base);
}

TEST_CASE("inventory mismatch") {
  std::mt19937_64 rng(45);
  Corpus c = IndicatorCorpus(rng, 2);
  c.units[3] = "p";
  try {
    Evaluate(IndicatorModel(), c);
    FAIL("expected InventoryMismatch");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kInventoryMismatch);
  }
}

TEST_CASE("report records round trip") {
  ReportRecord r{"joinap-linear", "heldout", "zero_shot", 7, 0.25, 0.125,
                 std::numeric_limits<double>::quiet_NaN()};
  const std::string line = r.ToJsonLine();
  CHECK(line.find("\"unseen_PER\":null") != std::string::npos);
  const ReportRecord back = ReportRecord::FromJsonLine(line);
  CHECK(back.method == r.method);
  CHECK(back.seed == 7);
  CHECK(back.per == 0.25);
  CHECK(std::isnan(back.unseen_per));
  CHECK_THROWS_AS(ReportRecord::FromJsonLine("{}"), Error);
}

TEST_CASE("embedding export") {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string a = (dir / "joinap-emb-a.csv").string(), b = (dir / "joinap-emb-b.csv").string();
  FlatHead head{Matrix(2, 3)};
  head.table << 1, 2, 3, 0.1, -0.5, 1e-20;
  const std::vector<std::string> units = {"<blk>", "d"};
  ExportEmbeddings(head, Matrix(), units, a);
  ExportEmbeddings(head, Matrix(), units, b);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  std::vector<std::string> lines;
  for (std::string l; std::getline(sa, l);) lines.push_back(l);
  REQUIRE(lines.size() == 2);
  CHECK(std::count(lines[0].begin(), lines[0].end(), ',') == 3);
  CHECK(lines[0] == "<blk>,1,2,3");
  CHECK(std::stod(lines[1].substr(lines[1].rfind(',') + 1)) == 1e-20);
  CHECK_THROWS_AS(ExportEmbeddings(head, Matrix(), {"x"}, a), Error);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  try {
    ExportEmbeddings(head, Matrix(), units, "/nonexistent-dir/x.csv");
    FAIL("expected IoFailure");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kIoFailure);
  }
}

TEST_CASE("export after phonological extension includes the new phones") {
  std::mt19937_64 rng(46);
  EmbeddingHead head = InitHead(HeadKind::kLinear, 0, 4, {}, rng);
  const std::vector<std::string> units = {"<blk>", "<spn>", "<nsn>", "d", "ʥ"};
  const auto path = (std::filesystem::temp_directory_path() / "joinap-emb-ext.csv").string();
  ExportEmbeddings(head, EncodeUnits(Table(), units), units, path);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 5);
  CHECK(lines[4].rfind("ʥ,", 0) == 0);
  std::filesystem::remove(path);
}
