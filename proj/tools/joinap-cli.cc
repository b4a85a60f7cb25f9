// tools/joinap-cli.cc

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

// Single entry point for the pipeline. Exit status: 0 on success, 1 on a
// usage error, 2 when inputs fail validation or a data error occurs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "joinap/benchmark.h"
#include "joinap/ctc-crf.h"
#include "joinap/decode-eval.h"
#include "joinap/phone-inventory.h"
#include "joinap/trainer.h"
#include "json.hpp"

#ifndef JOINAP_DEFAULT_FEATURES
#define JOINAP_DEFAULT_FEATURES "data/phonological_features.tsv"
#endif

namespace {

using namespace joinap;

const char *kVersion = "0.1.0";

struct Options {
  std::string features = JOINAP_DEFAULT_FEATURES;
  std::vector<std::string> inventories;
  std::vector<std::string> corpus;
  std::string checkpoint;
  std::string head = "nonlinear";
  std::string loss = "ctc";
  int lm_order = 2;
  uint64_t seed = 1;
  int seeds = 1;
  bool deterministic = false;
  std::string out;

  // encode
  std::vector<std::string> phones;
  // phoneset unseen / extend
  std::string target;
  // synth
  int utterances = 100;
  int frame_dim = 24;
  uint64_t emission_seed = 0;
  double noise = 0.5;
  double offset = 0.3;
  int min_frames = 2, max_frames = 4, min_phones = 4, max_phones = 8;
  // train / finetune
  int epochs = 15;
  double lr = 1e-3;
  int batch_size = 8;
  int patience = 2;
  double dev_fraction = 0.1;
  int context = 2;
  std::vector<int> hidden = {96};
  int embed_dim = 64;
  int head_hidden = 512;
  std::string head_activation = "sigmoid";
  bool head_bias = false;
  std::vector<std::string> freeze;
  int threads = 1;
  // extend
  std::string mode = "phonology";
  // bench
  bool explicit_head = false;
};

// Everything except the ctest harness reports through this manifest, which
// sits next to the primary output.
void WriteManifest(const std::string &out, const std::string &subcommand, const CLI::App &app,
                   const Options &o, const std::vector<std::string> &inputs,
                   const std::vector<std::string> &outputs) {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["tool_version"] = kVersion;
  j["seed"] = o.seed;
  j["config"] = app.config_to_str(true, false);
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  std::ofstream os(out + ".manifest.json", std::ios::trunc);
  os << j.dump(2) << '\n';
  if (!os) Fail(ErrorCode::kIoFailure, "cannot write manifest for " + out);
}

void RequireOut(const Options &o) {
  if (o.out.empty()) throw CLI::ValidationError("--out", "an output path is required");
  const auto parent = std::filesystem::path(o.out).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    Fail(ErrorCode::kIoFailure, "output directory does not exist: " + parent.string());
}

// Phones with identical rows get identical phonological embeddings; allowed,
// but worth a warning.
FeatureTable LoadTable(const std::string &path) {
  FeatureTable table = FeatureTable::ReadFile(path);
  for (const auto &[a, b] : table.IdenticalRows())
    std::cerr << "warning: " << a << " and " << b << " have identical feature rows\n";
  return table;
}

std::vector<LanguageInventory> ReadInventories(const std::vector<std::string> &paths) {
  std::vector<LanguageInventory> v;
  for (const auto &p : paths) v.push_back(LanguageInventory::ReadFile(p));
  return v;
}

TrainConfig MakeTrainConfig(const Options &o, int input_dim) {
  TrainConfig c;
  c.loss = ParseLossKind(o.loss);
  c.head = ParseHeadKind(o.head);
  c.head_options.hidden_dim = o.head_hidden;
  c.head_options.activation = ParseActivation(o.head_activation);
  c.head_options.use_bias = o.head_bias;
  c.encoder.input_dim = input_dim;
  c.encoder.context = o.context;
  c.encoder.hidden_dims = o.hidden;
  c.encoder.output_dim = o.embed_dim;
  c.initial_lr = o.lr;
  c.patience = o.patience;
  c.batch_size = o.batch_size;
  c.max_epochs = o.epochs;
  c.seed = o.seed;
  c.dev_fraction = o.dev_fraction;
  c.freeze = {o.freeze.begin(), o.freeze.end()};
  c.lm_order = o.lm_order;
  c.deterministic = o.deterministic;
  c.num_threads = o.threads;
  c.Validate();
  return c;
}

void WriteReportFile(const std::string &path, const TrainReport &report) {
  std::ofstream os(path, std::ios::trunc);
  report.Write(os);
  if (!os) Fail(ErrorCode::kIoFailure, "cannot write " + path);
}

int CmdEncode(const Options &o) {
  const FeatureTable table = LoadTable(o.features);
  std::vector<std::string> lines;
  for (const auto &p : o.phones) {
    auto special = ParseSpecialSymbol(p);
    const PhonologicalVector v = special ? EncodeSpecial(*special) : EncodePhone(table, p);
    lines.push_back(o.phones.size() == 1 ? v.ToString() : p + "\t" + v.ToString());
  }
  for (const auto &l : lines) std::cout << l << '\n';
  return 0;
}

int CmdPhonesetBuild(const CLI::App &app, const Options &o) {
  RequireOut(o);
  const auto set = UniversalPhoneSet::Merge(ReadInventories(o.inventories));
  std::ofstream os(o.out, std::ios::trunc);
  os << set.ToJson() << '\n';
  if (!os) Fail(ErrorCode::kIoFailure, "cannot write " + o.out);
  WriteManifest(o.out, "phoneset build", app, o, o.inventories, {o.out});
  std::cerr << "phoneset: " << set.Phones().size() << " phones from "
            << set.Languages().size() << " languages\n";
  return 0;
}

int CmdPhonesetStats(const Options &o) {
  const auto set = UniversalPhoneSet::Merge(ReadInventories(o.inventories));
  int total = 0;
  std::cout << "degree\tphones\n";
  for (auto [degree, count] : LanguageDegree(set)) {
    std::cout << degree << '\t' << count << '\n';
    total += count;
  }
  std::cout << "total\t" << total << '\n';
  return 0;
}

int CmdPhonesetUnseen(const Options &o) {
  if (o.target.empty()) throw CLI::ValidationError("--target", "a target inventory is required");
  const auto set = UniversalPhoneSet::Merge(ReadInventories(o.inventories));
  const auto target = LanguageInventory::ReadFile(o.target);
  const PhonePartition part = UnseenPhones(set, target);
  std::cout << "seen\t" << part.seen.size() << '\t';
  for (const auto &p : part.seen) std::cout << p << ' ';
  std::cout << "\nunseen\t" << part.unseen.size() << '\t';
  for (const auto &p : part.unseen) std::cout << p << ' ';
  std::cout << '\n';
  return 0;
}

int CmdSynth(const CLI::App &app, const Options &o) {
  RequireOut(o);
  if (o.inventories.size() != 1)
    throw CLI::ValidationError("--inventories", "synth takes exactly one inventory");
  const FeatureTable table = LoadTable(o.features);
  const auto inv = LanguageInventory::ReadFile(o.inventories[0]);
  SynthLanguageSpec spec;
  spec.language_id = inv.language_id;
  spec.inventory = inv.phones;
  spec.num_utterances = o.utterances;
  spec.noise_std = o.noise;
  spec.language_offset_std = o.offset;
  spec.min_frames_per_phone = o.min_frames;
  spec.max_frames_per_phone = o.max_frames;
  spec.min_phones = o.min_phones;
  spec.max_phones = o.max_phones;
  spec.seed = o.seed;
  spec.Validate();
  for (const auto &p : inv.phones) (void)table.Row(p);
  const Corpus c = GenerateLanguage(spec, table, MakeEmissionMap(o.frame_dim, o.emission_seed));
  WriteCorpus(o.out, c);
  WriteManifest(o.out, "synth", app, o, {o.features, o.inventories[0]}, {o.out});
  std::cerr << "synth: " << c.utterances.size() << " utterances of " << inv.language_id << '\n';
  return 0;
}

int CmdTrain(const CLI::App &app, const Options &o) {
  RequireOut(o);
  if (o.corpus.empty()) throw CLI::ValidationError("--corpus", "at least one corpus is required");
  const FeatureTable table = LoadTable(o.features);
  const auto set = UniversalPhoneSet::Merge(ReadInventories(o.inventories));
  std::vector<Corpus> corpora;
  for (const auto &p : o.corpus) corpora.push_back(ReadCorpus(p));
  const int dim = static_cast<int>(corpora.front().FrameDim());
  const TrainConfig cfg = MakeTrainConfig(o, dim);
  const Matrix phono = EncodeUnits(table, set.Units());

  const TrainResult r = TrainMultilingual(corpora, set, phono, cfg);
  SaveCheckpoint(o.out, {cfg.ToJson(), r.model, r.adam,
                         static_cast<int>(r.report.epochs.size()) - 1});
  WriteReportFile(o.out + ".report.jsonl", r.report);
  std::vector<std::string> inputs = o.inventories;
  inputs.insert(inputs.end(), o.corpus.begin(), o.corpus.end());
  WriteManifest(o.out, "train", app, o, inputs, {o.out, o.out + ".report.jsonl"});
  const auto &last = r.report.epochs.back();
  std::fprintf(stderr, "train: %d epochs, dev loss %.4f, dev PER %.4f, skipped %d\n",
               last.epoch, last.dev_loss, last.dev_per, r.report.skipped);
  return 0;
}

int CmdExtend(const CLI::App &app, const Options &o) {
  RequireOut(o);
  if (o.target.empty()) throw CLI::ValidationError("--target", "a target inventory is required");
  const FeatureTable table = LoadTable(o.features);
  const Checkpoint ck = LoadCheckpoint(o.checkpoint);
  const auto target = LanguageInventory::ReadFile(o.target);
  std::vector<std::string> units;
  for (SpecialToken t : kAllSpecials) units.emplace_back(SpecialSymbol(t));
  units.insert(units.end(), target.phones.begin(), target.phones.end());
  ExtensionOptions ext;
  ext.mode = ParseExtensionMode(o.mode);
  ext.seed = o.seed;
  TargetModelInfo info;
  Checkpoint out;
  out.config_json = ck.config_json;
  out.model = BuildTargetModel(ck.model, units, table, ext, &info);
  SaveCheckpoint(o.out, out);
  WriteManifest(o.out, "extend", app, o, {o.checkpoint, o.target}, {o.out});
  std::cerr << "extend: " << info.seen.size() << " seen, " << info.unseen.size()
            << " unseen phones\n";
  return 0;
}

int CmdFinetune(const CLI::App &app, const Options &o) {
  RequireOut(o);
  if (o.corpus.size() != 1) throw CLI::ValidationError("--corpus", "finetune takes one corpus");
  const Checkpoint ck = LoadCheckpoint(o.checkpoint);
  const Corpus corpus = ReadCorpus(o.corpus[0]);
  Options local = o;
  local.head = std::string(HeadKindName(ck.model.head_kind()));
  TrainConfig cfg = MakeTrainConfig(local, ck.model.encoder.config.input_dim);
  cfg.encoder = ck.model.encoder.config;
  const TrainResult r = Finetune(ck.model, corpus, cfg);
  SaveCheckpoint(o.out, {cfg.ToJson(), r.model, r.adam,
                         static_cast<int>(r.report.epochs.size()) - 1});
  WriteReportFile(o.out + ".report.jsonl", r.report);
  WriteManifest(o.out, "finetune", app, o, {o.checkpoint, o.corpus[0]},
                {o.out, o.out + ".report.jsonl"});
  return 0;
}

int CmdEval(const CLI::App &app, const Options &o) {
  if (o.corpus.size() != 1) throw CLI::ValidationError("--corpus", "eval takes one corpus");
  const Checkpoint ck = LoadCheckpoint(o.checkpoint);
  const Corpus corpus = ReadCorpus(o.corpus[0]);
  std::set<std::string> seen;
  if (!o.inventories.empty()) {
    const auto phones = UniversalPhoneSet::Merge(ReadInventories(o.inventories)).Phones();
    seen.insert(phones.begin(), phones.end());
  }
  const EvalResult r = Evaluate(ck.model, corpus, o.inventories.empty() ? nullptr : &seen);
  std::string language = corpus.utterances.empty() ? "" : corpus.utterances[0].language_id;
  ReportRecord rec{std::string("joinap-") + std::string(HeadKindName(ck.model.head_kind())),
                   language, "eval", o.seed, r.per, r.seen_per, r.unseen_per};
  if (ck.model.head_kind() == HeadKind::kFlat) rec.method = "flat";
  if (!o.out.empty()) {
    RequireOut(o);
    std::ofstream os(o.out, std::ios::trunc);
    WriteReport(os, std::vector<ReportRecord>{rec});
    WriteManifest(o.out, "eval", app, o, {o.checkpoint, o.corpus[0]}, {o.out});
  }
  std::cout << rec.ToJsonLine() << '\n';
  std::fprintf(stderr, "eval: S=%d I=%d D=%d ref=%ld\n", r.total.substitutions,
               r.total.insertions, r.total.deletions, r.ref_length);
  return 0;
}

int CmdExport(const CLI::App &app, const Options &o) {
  RequireOut(o);
  const Checkpoint ck = LoadCheckpoint(o.checkpoint);
  ExportEmbeddings(ck.model.head, ck.model.phono, ck.model.units, o.out);
  WriteManifest(o.out, "export-embeddings", app, o, {o.checkpoint}, {o.out});
  return 0;
}

int CmdBench(const CLI::App &app, const Options &o, BenchCondition condition) {
  if (o.seeds < 1) throw CLI::ValidationError("--seeds", "must be >= 1");
  if (!o.out.empty()) RequireOut(o);
  const FeatureTable table = LoadTable(o.features);
  BenchmarkConfig cfg;
  for (TrainConfig *t : {&cfg.train, &cfg.finetune}) {
    t->loss = ParseLossKind(o.loss);
    t->lm_order = o.lm_order;
    t->deterministic = o.deterministic;
    t->num_threads = o.threads;
  }
  BenchmarkRequest req;
  if (o.explicit_head) req.heads = {ParseHeadKind(o.head)};
  req.seeds.clear();
  for (int i = 0; i < o.seeds; ++i) req.seeds.push_back(o.seed + static_cast<uint64_t>(i));
  req.conditions = {condition};
  const auto records =
      RunBenchmark(table, cfg, req, [](const std::string &s) { std::cerr << s << '\n'; });
  if (o.out.empty()) {
    WriteReport(std::cout, records);
  } else {
    std::ofstream os(o.out, std::ios::binary | std::ios::trunc);
    WriteReport(os, records);
    WriteManifest(o.out, "bench " + std::string(BenchConditionName(condition)), app, o,
                  {o.features}, {o.out});
  }
  return 0;
}

// Quick oracle checks that need no input files.
int CmdSelftest() {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal(0.0, 1.0);
  int failures = 0;
  auto report = [&](const char *name, bool ok, double value) {
    std::printf("%s %-28s %.3g\n", ok ? "PASS" : "FAIL", name, value);
    if (!ok) ++failures;
  };

  // CTC against explicit path enumeration.
  double worst_value = 0.0, worst_grad = 0.0, worst_crf = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int t_len = 3, n = 3;
    Matrix z(t_len, n);
    for (int t = 0; t < t_len; ++t)
      for (int k = 0; k < n; ++k) z(t, k) = normal(rng);
    const LabelSequence labels = {1 + trial % 2, 2 - trial % 2};
    const Matrix logp = LogPosteriors(z);
    double total = kLogZero;
    std::vector<int> path(t_len);
    for (int code = 0; code < n * n * n; ++code) {
      int c = code;
      double lp = 0.0;
      for (int t = 0; t < t_len; ++t, c /= n) {
        path[t] = c % n;
        lp += logp(t, path[t]);
      }
      if (CollapseOrEmpty(path) == labels) total = LogAdd(total, lp);
    }
    const CtcResult r = CtcLoss(z, labels);
    worst_value = std::max(worst_value, std::abs(r.nll + total));
    Matrix numeric(t_len, n);
    for (int t = 0; t < t_len; ++t)
      for (int k = 0; k < n; ++k) {
        Matrix zp = z, zm = z;
        zp(t, k) += 1e-5;
        zm(t, k) -= 1e-5;
        numeric(t, k) = (CtcLoss(zp, labels).nll - CtcLoss(zm, labels).nll) / 2e-5;
      }
    worst_grad = std::max(worst_grad, MaxRelativeError(r.grad, numeric));
    worst_crf = std::max(worst_crf, std::abs(CrfLoss(z, labels, nullptr).nll - r.nll));
  }
  report("ctc-vs-enumeration", worst_value < 1e-9, worst_value);
  report("ctc-gradient", worst_grad < 1e-4, worst_grad);
  report("ctc-crf-without-lm", worst_crf < 1e-8, worst_crf);

  const std::vector<LabelSequence> corpus = {{1, 2}, {2, 2, 1}, {1}};
  const PhoneLm lm = PhoneLm::Train(corpus, 2, 1.0, 2);
  Matrix z(4, 3);
  for (int t = 0; t < 4; ++t)
    for (int k = 0; k < 3; ++k) z(t, k) = normal(rng);
  const double crf_grad = CrfGradCheck(z, LabelSequence{1, 2}, &lm);
  report("ctc-crf-gradient", crf_grad < 1e-4, crf_grad);
  return failures ? 2 : 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"joinap: phonology-driven phone embeddings for multilingual and "
               "cross-lingual acoustic models"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file with option values; flags win");
  app.require_subcommand(1);
  Options o;

  auto add_features = [&](CLI::App *c) {
    c->add_option("--features", o.features, "phonological feature table (TSV)")
        ->check(CLI::ExistingFile)
        ->capture_default_str();
  };
  auto add_out = [&](CLI::App *c, const std::string &what) {
    c->add_option("--out", o.out, what);
  };
  auto add_seed = [&](CLI::App *c) {
    c->add_option("--seed", o.seed, "random seed")->capture_default_str();
  };
  auto add_train_flags = [&](CLI::App *c) {
    c->add_option("--loss", o.loss, "ctc | ctc-crf")
        ->check(CLI::IsMember({"ctc", "ctc-crf"}))
        ->capture_default_str();
    c->add_option("--lm-order", o.lm_order, "phone LM order for ctc-crf")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    c->add_option("--epochs", o.epochs, "maximum epochs")->capture_default_str();
    c->add_option("--lr", o.lr, "initial learning rate")->capture_default_str();
    c->add_option("--batch-size", o.batch_size, "utterances per update")->capture_default_str();
    c->add_option("--patience", o.patience, "plateau patience in epochs")->capture_default_str();
    c->add_option("--dev-fraction", o.dev_fraction, "held-out dev share")->capture_default_str();
    c->add_option("--freeze", o.freeze, "parameter groups to keep fixed (encoder, head, names)");
    c->add_option("--threads", o.threads, "worker threads (ignored with --deterministic)")
        ->capture_default_str();
    c->add_flag("--deterministic", o.deterministic, "serial gradient accumulation");
    add_seed(c);
  };

  auto *encode = app.add_subcommand("encode", "print the 51-bit phonological vector of phones");
  add_features(encode);
  encode->add_option("--phone", o.phones, "IPA phone or special token")->required();

  auto *phoneset = app.add_subcommand("phoneset", "universal phone set utilities");
  phoneset->require_subcommand(1);
  auto *ps_build = phoneset->add_subcommand("build", "merge inventories into a phone set");
  auto *ps_stats = phoneset->add_subcommand("stats", "language-degree histogram");
  auto *ps_unseen = phoneset->add_subcommand("unseen", "split a target inventory into seen/unseen");
  for (auto *c : {ps_build, ps_stats, ps_unseen})
    c->add_option("--inventories", o.inventories, "language inventory JSON files")
        ->required()
        ->check(CLI::ExistingFile);
  add_out(ps_build, "phone set JSON");
  ps_unseen->add_option("--target", o.target, "target inventory JSON")->check(CLI::ExistingFile);

  auto *synth = app.add_subcommand("synth", "generate a synthetic corpus for one language");
  add_features(synth);
  synth->add_option("--inventories", o.inventories, "the language inventory JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--utterances", o.utterances, "utterance count")->capture_default_str();
  synth->add_option("--frame-dim", o.frame_dim, "frame dimension D")->capture_default_str();
  synth->add_option("--emission-seed", o.emission_seed,
                    "seed of the phonology-to-acoustics map (share it across languages)")
      ->capture_default_str();
  synth->add_option("--noise", o.noise, "frame noise std")->capture_default_str();
  synth->add_option("--offset", o.offset, "language offset std")->capture_default_str();
  synth->add_option("--min-frames", o.min_frames, "minimum frames per phone")->capture_default_str();
  synth->add_option("--max-frames", o.max_frames, "maximum frames per phone")->capture_default_str();
  synth->add_option("--min-phones", o.min_phones, "minimum phones per utterance")->capture_default_str();
  synth->add_option("--max-phones", o.max_phones, "maximum phones per utterance")->capture_default_str();
  add_seed(synth);
  add_out(synth, "corpus file");

  auto *train = app.add_subcommand("train", "multilingual training from scratch");
  add_features(train);
  train->add_option("--inventories", o.inventories, "training language inventories")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--corpus", o.corpus, "training corpora")->required()->check(CLI::ExistingFile);
  train->add_option("--head", o.head, "flat | linear | nonlinear")
      ->check(CLI::IsMember({"flat", "linear", "nonlinear"}))
      ->capture_default_str();
  train->add_option("--context", o.context, "frames of context on each side")->capture_default_str();
  train->add_option("--hidden", o.hidden, "encoder hidden widths")->capture_default_str();
  train->add_option("--embed-dim", o.embed_dim, "embedding / encoder output size H")
      ->capture_default_str();
  train->add_option("--head-hidden", o.head_hidden, "nonlinear head hidden size")
      ->capture_default_str();
  train->add_option("--head-activation", o.head_activation, "sigmoid | tanh | relu")
      ->capture_default_str();
  train->add_flag("--head-bias", o.head_bias, "add biases to the JoinAP head");
  add_train_flags(train);
  add_out(train, "checkpoint");

  auto *extend = app.add_subcommand("extend", "retarget a checkpoint to a new language");
  add_features(extend);
  extend->add_option("--checkpoint", o.checkpoint, "source checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  extend->add_option("--target", o.target, "target inventory JSON")
      ->required()
      ->check(CLI::ExistingFile);
  extend->add_option("--mode", o.mode, "phonology | random | mean")
      ->check(CLI::IsMember({"phonology", "random", "mean"}))
      ->capture_default_str();
  add_seed(extend);
  add_out(extend, "extended checkpoint");

  auto *finetune = app.add_subcommand("finetune", "continue training on target data");
  finetune->add_option("--checkpoint", o.checkpoint, "checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  finetune->add_option("--corpus", o.corpus, "target corpus")->required()->check(CLI::ExistingFile);
  add_train_flags(finetune);
  add_out(finetune, "finetuned checkpoint");

  auto *eval = app.add_subcommand("eval", "greedy decoding and phone error rate");
  eval->add_option("--checkpoint", o.checkpoint, "checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--corpus", o.corpus, "test corpus")->required()->check(CLI::ExistingFile);
  eval->add_option("--inventories", o.inventories,
                   "training inventories; enables the seen/unseen split")
      ->check(CLI::ExistingFile);
  add_seed(eval);
  add_out(eval, "report file");

  auto *export_emb = app.add_subcommand("export-embeddings", "write phone embeddings as CSV");
  export_emb->add_option("--checkpoint", o.checkpoint, "checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  add_out(export_emb, "CSV file");

  auto *bench = app.add_subcommand("bench", "synthetic cross-lingual benchmark");
  bench->require_subcommand(1);
  std::vector<std::pair<CLI::App *, BenchCondition>> bench_cmds;
  for (auto [name, cond] : {std::pair{"zero-shot", BenchCondition::kZeroShot},
                            std::pair{"few-shot", BenchCondition::kFewShot},
                            std::pair{"multilingual", BenchCondition::kMultilingual}}) {
    auto *c = bench->add_subcommand(name, std::string("run the ") + name + " condition");
    add_features(c);
    c->add_option("--head", o.head, "restrict to one head: flat | linear | nonlinear")
        ->check(CLI::IsMember({"flat", "linear", "nonlinear"}));
    c->add_option("--loss", o.loss, "ctc | ctc-crf")
        ->check(CLI::IsMember({"ctc", "ctc-crf"}))
        ->capture_default_str();
    c->add_option("--lm-order", o.lm_order, "phone LM order for ctc-crf")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    c->add_option("--seeds", o.seeds, "number of consecutive seeds starting at --seed")
        ->capture_default_str();
    c->add_option("--threads", o.threads, "worker threads (ignored with --deterministic)")
        ->capture_default_str();
    c->add_flag("--deterministic", o.deterministic, "serial gradient accumulation");
    add_seed(c);
    add_out(c, "report file (stdout when absent)");
    bench_cmds.emplace_back(c, cond);
  }

  auto *selftest = app.add_subcommand("selftest", "oracle and gradient checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*encode) return CmdEncode(o);
    if (*ps_build) return CmdPhonesetBuild(app, o);
    if (*ps_stats) return CmdPhonesetStats(o);
    if (*ps_unseen) return CmdPhonesetUnseen(o);
    if (*synth) return CmdSynth(app, o);
    if (*train) return CmdTrain(app, o);
    if (*extend) return CmdExtend(app, o);
    if (*finetune) return CmdFinetune(app, o);
    if (*eval) return CmdEval(app, o);
    if (*export_emb) return CmdExport(app, o);
    for (auto &[cmd, cond] : bench_cmds)
      if (*cmd) {
        o.explicit_head = cmd->count("--head") > 0;
        return CmdBench(app, o, cond);
      }
    if (*selftest) return CmdSelftest();
  } catch (const CLI::ValidationError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
