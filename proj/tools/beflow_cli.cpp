//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beflow/checkpoint.h"
#include "beflow/dataio.h"
#include "beflow/evaluate.h"
#include "beflow/mechsearch.h"
#include "beflow/metrics.h"
#include "beflow/run_config.h"
#include "beflow/smiles.h"
#include "beflow/train.h"

namespace {

using namespace beflow;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;

class DataError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_file;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> flags;  // config key -> value
  std::string reactants;
};

RunConfig build_config(const Options &o) {
  RunConfig c;
  if (!o.config_file.empty())
    c.load_file(o.config_file);
  for (const auto &[k, v]: o.flags)
    c.set(k, v);
  for (const std::string &s: o.overrides)
    c.apply_override(s);
  return c;
}

PeriodicTable element_table(const RunConfig &c) {
  const std::string &path = c.get("element_table");
  if (path.empty())
    return PeriodicTable::standard();
  try {
    return PeriodicTable::load(path);
  } catch (const std::exception &e) {
    throw DataError(e.what());
  }
}

fs::path prepare_out_dir(const RunConfig &c) {
  fs::path dir = c.get("out_dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw DataError("cannot create output directory " + dir.string() + ": "
                    + ec.message());
  std::ofstream cfg(dir / "config.txt");
  if (!cfg)
    throw DataError("cannot write to " + dir.string());
  c.write(cfg);
  return dir;
}

std::ofstream open_out(const fs::path &path) {
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot write " + path.string());
  return out;
}

CorpusLoad read_corpus_file(const std::string &path, const char *key) {
  if (path.empty())
    throw ConfigError(std::string("no ") + key + " given");
  if (!fs::exists(path))
    throw DataError("cannot open " + std::string(key) + " " + path);
  CorpusLoad load = load_corpus(path);
  for (const std::string &d: load.diagnostics)
    std::cerr << path << ": " << d << '\n';
  return load;
}

std::vector<StepRecord> read_records(const std::string &path,
                                     const char *key) {
  return read_corpus_file(path, key).records;
}

VectorFieldModel load_model(const RunConfig &c, const PeriodicTable &table) {
  const std::string &path = c.get("checkpoint");
  if (path.empty())
    throw ConfigError("no checkpoint given");
  VectorFieldModel model = [&] {
    try {
      return load_checkpoint(path);
    } catch (const CheckpointError &e) {
      throw DataError(e.what());
    }
  }();
  if (model.feature_dim() != feature_dim(table))
    throw DataError("checkpoint " + path + " expects "
                    + std::to_string(model.feature_dim())
                    + " atom features but the element table gives "
                    + std::to_string(feature_dim(table)));
  return model;
}

BEMatrix parse_reactants(const std::string &smiles,
                         const PeriodicTable &table) {
  if (smiles.empty())
    throw ConfigError("no reactant SMILES given");
  try {
    return build_be(parse_smiles(smiles, table), 0, table);
  } catch (const SmilesError &e) {
    throw DataError("cannot parse reactants at offset "
                    + std::to_string(e.offset()) + ": " + e.message());
  } catch (const std::runtime_error &e) {
    throw DataError(std::string("cannot encode reactants: ") + e.what());
  }
}

int cmd_validate(const Options &o) {
  RunConfig c = build_config(o);
  PeriodicTable table = element_table(c);
  CorpusLoad load = read_corpus_file(c.get("corpus"), "corpus");
  const std::vector<StepRecord> &records = load.records;
  CleanResult result = clean(records, table);
  fs::path dir = prepare_out_dir(c);

  std::ofstream acc = open_out(dir / "accepted.tsv");
  write_corpus(acc, result.accepted);
  std::ofstream rej = open_out(dir / "rejected.tsv");
  write_rejections(rej, result.rejected);

  std::map<std::string, int> reasons;
  for (const Rejection &r: result.rejected)
    ++reasons[to_string(r.reason)];
  std::ofstream sum = open_out(dir / "summary.txt");
  for (std::ostream *out: { static_cast<std::ostream *>(&sum), &std::cout }) {
    *out << "records=" << records.size() << '\n'
         << "skipped_lines=" << load.skipped << '\n'
         << "accepted=" << result.accepted.size() << '\n'
         << "rejected=" << result.rejected.size() << '\n';
    for (const auto &[reason, n]: reasons)
      *out << "rejected." << reason << '=' << n << '\n';
  }
  return kExitOk;
}

int cmd_split(const Options &o) {
  RunConfig c = build_config(o);
  PeriodicTable table = element_table(c);
  CleanResult cleaned = clean(read_records(c.get("corpus"), "corpus"), table);
  CorpusSplit split = [&] {
    try {
      return split_corpus(cleaned.accepted, c.split_ratios(),
                          static_cast<std::uint64_t>(c.get_long("seed")));
    } catch (const std::invalid_argument &e) {
      throw DataError(e.what());
    }
  }();
  fs::path dir = prepare_out_dir(c);
  const std::pair<const char *, const std::vector<StepRecord> *> parts[] = {
    { "train", &split.train }, { "val", &split.val }, { "test", &split.test }
  };
  for (auto [name, recs]: parts) {
    std::ofstream out = open_out(dir / (std::string(name) + ".tsv"));
    write_corpus(out, *recs);
    std::cout << name << '=' << recs->size() << '\n';
  }
  return kExitOk;
}

void check_sizes(const std::vector<PreparedStep> &steps, int max_atoms) {
  for (const PreparedStep &s: steps)
    if (s.reactant.size() > max_atoms)
      throw DataError("step " + s.record.reaction_id + "/"
                      + std::to_string(s.record.step_index) + " has "
                      + std::to_string(s.reactant.size())
                      + " atoms, above max_atoms");
}

int cmd_train(const Options &o) {
  RunConfig c = build_config(o);
  PeriodicTable table = element_table(c);
  ModelConfig mc = c.model_config();
  FlowConfig fc = c.flow_config();
  TrainConfig tc = c.train_config();
  SampleConfig sc = c.sample_config();

  auto steps = prepare_accepted(read_records(c.get("corpus"), "corpus"),
                                table);
  if (steps.empty())
    throw DataError("corpus has no accepted steps");
  check_sizes(steps, mc.max_atoms);
  std::vector<PreparedStep> val;
  if (!c.get("val_corpus").empty())
    val = prepare_accepted(read_records(c.get("val_corpus"), "val_corpus"),
                           table);
  check_sizes(val, mc.max_atoms);

  VectorFieldModel model(mc, fc, feature_dim(table));
  if (!c.get("init_checkpoint").empty()) {
    try {
      model = load_checkpoint(c.get("init_checkpoint"), mc,
                              feature_dim(table));
    } catch (const CheckpointError &e) {
      throw DataError(e.what());
    }
  } else {
    model.initialize(fc.seed);
  }

  fs::path dir = prepare_out_dir(c);
  std::ofstream log = open_out(dir / "train_log.tsv");
  log << "step\tloss\tlr\tval_top1\n" << std::setprecision(17);
  Validator validator;
  const int val_samples = c.get_int("val_samples");
  if (!val.empty())
    validator = [&](const VectorFieldModel &m) {
      NetworkField field(m, table);
      FlowSampler sampler(field, sc, table);
      return top1_step_accuracy(sampler, val, val_samples);
    };
  auto sink = [&](const TrainLogEntry &e) {
    log << e.step << '\t' << e.loss << '\t' << e.lr << '\t';
    if (e.validated)
      log << e.val_accuracy;
    log << '\n';
    if (e.validated)
      std::cerr << "step " << e.step << " loss " << e.loss << " val top-1 "
                << e.val_accuracy << '\n';
  };
  TrainResult result = train(model, make_train_pairs(steps, table), tc,
                             validator, sink);
  model.parameters() = result.best_parameters;
  std::string ckpt = c.get("checkpoint");
  if (ckpt.empty())
    ckpt = (dir / "model.ckpt").string();
  save_checkpoint(ckpt, model);
  std::cout << "checkpoint=" << ckpt << '\n'
            << "best_step=" << result.best_step << '\n';
  if (result.best_val_accuracy >= 0)
    std::cout << "best_val_top1=" << result.best_val_accuracy << '\n';
  return kExitOk;
}

int cmd_sample(const Options &o) {
  RunConfig c = build_config(o);
  PeriodicTable table = element_table(c);
  VectorFieldModel model = load_model(c, table);
  BEMatrix root = parse_reactants(o.reactants, table);
  if (root.size() > model.config().max_atoms)
    throw DataError("reactants exceed the checkpoint's max_atoms");
  NetworkField field(model, table);
  const int samples = c.get_int("samples");
  StepSampling s = sample_step(field, root, samples, c.sample_config(), table);
  fs::path dir = prepare_out_dir(c);
  std::ofstream out = open_out(dir / "outcomes.tsv");
  out << "# rank\tfrequency\tproduct\n";
  int rank = 0;
  for (const StepOutcome &oc: s.outcomes) {
    ++rank;
    out << rank << '\t' << oc.frequency << '/' << s.samples << '\t'
        << oc.product << '\n';
    std::cout << rank << '\t' << oc.frequency << '/' << s.samples << '\t'
              << oc.product << '\n';
  }
  out << "# invalid\t" << s.invalid << '/' << s.samples << '\n';
  std::cout << "invalid\t" << s.invalid << '/' << s.samples << '\n';
  return kExitOk;
}

int cmd_search(const Options &o) {
  RunConfig c = build_config(o);
  PeriodicTable table = element_table(c);
  VectorFieldModel model = load_model(c, table);
  BEMatrix root = parse_reactants(o.reactants, table);
  if (root.size() > model.config().max_atoms)
    throw DataError("reactants exceed the checkpoint's max_atoms");
  NetworkField field(model, table);
  FlowSampler sampler(field, c.sample_config(), table);
  auto paths = beam_search(sampler, root, c.get_int("beam_width"),
                           c.get_int("beam_depth"), c.get_int("samples"),
                           table);
  fs::path dir = prepare_out_dir(c);
  std::ofstream out = open_out(dir / "pathways.txt");
  write_pathways(out, paths);
  write_pathways(std::cout, paths);
  return kExitOk;
}

MetricsReport run_evaluation(const RunConfig &c, const SampleConfig &sc,
                             bool pathways, const PeriodicTable &table,
                             std::vector<StepPrediction> *predictions) {
  VectorFieldModel model = load_model(c, table);
  auto steps = prepare_accepted(read_records(c.get("corpus"), "corpus"),
                                table);
  check_sizes(steps, model.config().max_atoms);
  NetworkField field(model, table);
  FlowSampler sampler(field, sc, table);
  EvalOptions opt;
  opt.samples = c.get_int("samples");
  opt.ks = c.get_int_list("top_k");
  opt.pathways = pathways;
  opt.depth = c.get_int("beam_depth");
  return evaluate(sampler, steps, opt, table, predictions);
}

void write_predictions(std::ostream &out,
                       const std::vector<StepPrediction> &preds) {
  out << "# reaction_id\tstep_index\treference\ttop1\tfrequency\tinvalid\n";
  for (const StepPrediction &p: preds) {
    const StepSampling &s = p.sampling;
    out << p.reaction_id << '\t' << p.step_index << '\t' << p.reference
        << '\t' << (s.outcomes.empty() ? "" : s.outcomes[0].product) << '\t'
        << (s.outcomes.empty() ? 0 : s.outcomes[0].frequency) << '/'
        << s.samples << '\t' << s.invalid << '\n';
  }
}

int cmd_evaluate(const Options &o) {
  RunConfig c = build_config(o);
  PeriodicTable table = element_table(c);
  std::vector<StepPrediction> preds;
  MetricsReport r = run_evaluation(c, c.sample_config(), true, table, &preds);
  fs::path dir = prepare_out_dir(c);
  std::ofstream txt = open_out(dir / "report.txt");
  write_report_text(txt, r);
  std::ofstream kv = open_out(dir / "metrics.kv");
  write_report_kv(kv, r);
  std::ofstream pr = open_out(dir / "predictions.tsv");
  write_predictions(pr, preds);
  write_report_text(std::cout, r);
  return kExitOk;
}

int cmd_failures(const Options &o) {
  RunConfig c = build_config(o);
  PeriodicTable table = element_table(c);
  SampleConfig sc = c.sample_config();
  sc.rounding = RoundingMode::kFullMatrix;
  sc.validity_fix = false;
  MetricsReport r = run_evaluation(c, sc, false, table, nullptr);
  fs::path dir = prepare_out_dir(c);
  std::ofstream out = open_out(dir / "failures.tsv");
  out << "# failure_mode\tcount\tfraction_of_samples\n";
  for (auto [mode, n]: r.failure_histogram) {
    double frac = r.samples ? static_cast<double>(n) / r.samples : 0.0;
    out << to_string(mode) << '\t' << n << '\t' << frac << '\n';
    std::cout << to_string(mode) << '\t' << n << '\t' << frac << '\n';
  }
  std::cout << "samples\t" << r.samples << "\ninvalid\t" << r.invalid_samples
            << '\n';
  return kExitOk;
}

void add_common(CLI::App *cmd, Options &o) {
  cmd->add_option("-c,--config", o.config_file, "key=value config file");
  cmd->add_option("--set", o.overrides, "override, key=value (repeatable)");
  cmd->add_option_function<std::string>(
      "-o,--out", [&o](const std::string &v) { o.flags["out_dir"] = v; },
      "output directory");
  cmd->add_option_function<std::string>(
      "--seed", [&o](const std::string &v) { o.flags["seed"] = v; },
      "random seed");
}

void add_flag_option(CLI::App *cmd, Options &o, const std::string &flag,
                     const std::string &key, const std::string &help) {
  cmd->add_option_function<std::string>(
      flag, [&o, key](const std::string &v) { o.flags[key] = v; }, help);
}

void add_sampling(CLI::App *cmd, Options &o) {
  add_flag_option(cmd, o, "--checkpoint", "checkpoint", "model checkpoint");
  add_flag_option(cmd, o, "-S,--samples", "samples", "samples per step");
  add_flag_option(cmd, o, "--rounding", "rounding",
                  "symmetric_safe or full_matrix");
  add_flag_option(cmd, o, "--sigma", "sigma", "sampling noise std");
  add_flag_option(cmd, o, "--threads", "threads", "sampling worker threads");
  cmd->add_flag_function(
      "--no-fix", [&o](std::int64_t) { o.flags["validity_fix"] = "false"; },
      "disable the lone-pair repair");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "beflow: electron-redistribution flow matching for "
                 "elementary reaction steps" };
  app.require_subcommand(1);
  Options o;

  auto *validate = app.add_subcommand("validate",
                                      "clean a corpus and report rejects");
  add_common(validate, o);
  add_flag_option(validate, o, "--corpus", "corpus", "step corpus TSV");

  auto *split = app.add_subcommand("split", "split a corpus by reaction");
  add_common(split, o);
  add_flag_option(split, o, "--corpus", "corpus", "step corpus TSV");
  add_flag_option(split, o, "--ratios", "split_ratios", "train,val,test");

  auto *trn = app.add_subcommand("train", "train a vector-field model");
  add_common(trn, o);
  add_flag_option(trn, o, "--corpus", "corpus", "training corpus TSV");
  add_flag_option(trn, o, "--val-corpus", "val_corpus", "validation corpus");
  add_flag_option(trn, o, "--checkpoint", "checkpoint", "output checkpoint");
  add_flag_option(trn, o, "--steps", "train_steps", "optimizer steps");

  auto *sample = app.add_subcommand("sample", "rank sampled products");
  add_common(sample, o);
  add_sampling(sample, o);
  sample->add_option("reactants", o.reactants, "reactant SMILES")
      ->required();

  auto *search = app.add_subcommand("search", "beam search for pathways");
  add_common(search, o);
  add_sampling(search, o);
  add_flag_option(search, o, "--width", "beam_width", "beam width");
  add_flag_option(search, o, "--depth", "beam_depth", "beam depth");
  search->add_option("reactants", o.reactants, "reactant SMILES")
      ->required();

  auto *evaluate = app.add_subcommand("evaluate", "compute the metric suite");
  add_common(evaluate, o);
  add_sampling(evaluate, o);
  add_flag_option(evaluate, o, "--corpus", "corpus", "test corpus TSV");
  add_flag_option(evaluate, o, "--ks", "top_k", "k values, comma-separated");

  auto *failures = app.add_subcommand(
      "failures", "failure-mode histogram without symmetric rounding or fix");
  add_common(failures, o);
  add_sampling(failures, o);
  add_flag_option(failures, o, "--corpus", "corpus", "test corpus TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate)
      return cmd_validate(o);
    if (*split)
      return cmd_split(o);
    if (*trn)
      return cmd_train(o);
    if (*sample)
      return cmd_sample(o);
    if (*search)
      return cmd_search(o);
    if (*evaluate)
      return cmd_evaluate(o);
    if (*failures)
      return cmd_failures(o);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError &e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const NonFiniteField &e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const NonFiniteActivation &e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
