//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/run_config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace beflow {
namespace {

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const ConfigKey *find_key(const std::string &name) {
  for (const ConfigKey &k: RunConfig::keys())
    if (k.name == name)
      return &k;
  return nullptr;
}

std::vector<std::string> split_commas(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    out.push_back(trim(item));
  return out;
}

template<typename T, typename F> T convert(const std::string &key,
                                           const std::string &v, F f) {
  try {
    std::size_t used = 0;
    T out = f(v, &used);
    if (used != v.size())
      throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception &) {
    throw ConfigError("config key " + key + ": cannot parse '" + v + "'");
  }
}

int to_int(const std::string &key, const std::string &v) {
  return convert<int>(key, v, [](const std::string &s, std::size_t *u) {
    return std::stoi(s, u);
  });
}

long to_long(const std::string &key, const std::string &v) {
  return convert<long>(key, v, [](const std::string &s, std::size_t *u) {
    return std::stol(s, u);
  });
}

double to_real(const std::string &key, const std::string &v) {
  return convert<double>(key, v, [](const std::string &s, std::size_t *u) {
    return std::stod(s, u);
  });
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError("config key " + key + ": '" + v + "' is not a boolean");
}

void check_value(const ConfigKey &k, const std::string &v) {
  switch (k.type) {
  case ConfigType::kString:
    break;
  case ConfigType::kInt:
    to_long(k.name, v);
    break;
  case ConfigType::kReal:
    to_real(k.name, v);
    break;
  case ConfigType::kBool:
    to_bool(k.name, v);
    break;
  case ConfigType::kIntList:
    for (const auto &item: split_commas(v))
      to_int(k.name, item);
    break;
  case ConfigType::kRealList:
    for (const auto &item: split_commas(v))
      to_real(k.name, item);
    break;
  }
}

}  // namespace

const std::vector<ConfigKey> &RunConfig::keys() {
  using T = ConfigType;
  static const std::vector<ConfigKey> k = {
    { "corpus", T::kString, "", "step corpus TSV" },
    { "val_corpus", T::kString, "", "validation corpus TSV" },
    { "out_dir", T::kString, "out", "output directory" },
    { "checkpoint", T::kString, "", "model checkpoint path" },
    { "init_checkpoint", T::kString, "", "warm-start checkpoint for training" },
    { "element_table", T::kString, "", "element table TSV (built-in if empty)" },
    { "seed", T::kInt, "1", "random seed" },
    { "sigma", T::kReal, "0.15", "path and sampling noise std" },
    { "rbf_low", T::kReal, "0", "first RBF center" },
    { "rbf_high", T::kReal, "8", "last RBF center" },
    { "rbf_step", T::kReal, "0.1", "RBF center spacing" },
    { "rbf_gamma", T::kReal, "10", "RBF width" },
    { "euler_steps", T::kInt, "10", "Euler steps per sample" },
    { "embed_dim", T::kInt, "64", "token width" },
    { "hidden_dim", T::kInt, "64", "output head width" },
    { "ffn_dim", T::kInt, "128", "feed-forward width" },
    { "layers", T::kInt, "4", "transformer blocks" },
    { "heads", T::kInt, "8", "attention heads" },
    { "max_atoms", T::kInt, "64", "largest system accepted" },
    { "learning_rate", T::kReal, "0.001", "peak learning rate" },
    { "warmup", T::kInt, "200", "Noam warmup steps" },
    { "batch_size", T::kInt, "32", "examples per step" },
    { "train_steps", T::kInt, "3000", "optimizer steps" },
    { "grad_clip", T::kReal, "1.0", "global gradient norm clip (0 = off)" },
    { "eval_every", T::kInt, "500", "validation interval in steps" },
    { "val_samples", T::kInt, "4", "samples per step during validation" },
    { "samples", T::kInt, "16", "samples per step" },
    { "rounding", T::kString, "symmetric_safe",
      "symmetric_safe or full_matrix" },
    { "validity_fix", T::kBool, "true", "apply the lone-pair repair" },
    { "threads", T::kInt, "1", "sampling worker threads" },
    { "beam_width", T::kInt, "2", "beam width" },
    { "beam_depth", T::kInt, "9", "beam depth" },
    { "top_k", T::kIntList, "1,2,3,5", "k values reported" },
    { "split_ratios", T::kRealList, "0.89,0.01,0.10",
      "train,validation,test fractions" },
  };
  return k;
}

RunConfig::RunConfig() {
  for (const ConfigKey &k: keys())
    values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string &key, const std::string &value) {
  const ConfigKey *k = find_key(key);
  if (!k)
    throw ConfigError("unknown config key '" + key + "'");
  std::string v = trim(value);
  check_value(*k, v);
  if (key == "rounding")
    try {
      parse_rounding_mode(v);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(e.what());
    }
  values_[key] = v;
}

void RunConfig::apply_override(const std::string &assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::parse(const std::string &text, const std::string &origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno)
                        + ": expected key=value");
    try {
      set(trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const ConfigError &e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": "
                        + e.what());
    }
  }
}

void RunConfig::load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  parse(ss.str(), path);
}

const std::string &RunConfig::get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

int RunConfig::get_int(const std::string &key) const {
  return to_int(key, get(key));
}

long RunConfig::get_long(const std::string &key) const {
  return to_long(key, get(key));
}

double RunConfig::get_real(const std::string &key) const {
  return to_real(key, get(key));
}

bool RunConfig::get_bool(const std::string &key) const {
  return to_bool(key, get(key));
}

std::vector<int> RunConfig::get_int_list(const std::string &key) const {
  std::vector<int> out;
  for (const auto &item: split_commas(get(key)))
    out.push_back(to_int(key, item));
  return out;
}

std::vector<double> RunConfig::get_real_list(const std::string &key) const {
  std::vector<double> out;
  for (const auto &item: split_commas(get(key)))
    out.push_back(to_real(key, item));
  return out;
}

void RunConfig::write(std::ostream &out) const {
  for (const ConfigKey &k: keys())
    out << k.name << '=' << values_.at(k.name) << '\n';
}

FlowConfig RunConfig::flow_config() const {
  FlowConfig f;
  f.sigma = get_real("sigma");
  f.rbf_low = get_real("rbf_low");
  f.rbf_high = get_real("rbf_high");
  f.rbf_step = get_real("rbf_step");
  f.rbf_gamma = get_real("rbf_gamma");
  f.euler_steps = get_int("euler_steps");
  f.seed = static_cast<std::uint64_t>(get_long("seed"));
  try {
    f.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  return f;
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.embed_dim = get_int("embed_dim");
  m.hidden_dim = get_int("hidden_dim");
  m.ffn_dim = get_int("ffn_dim");
  m.layers = get_int("layers");
  m.heads = get_int("heads");
  m.max_atoms = get_int("max_atoms");
  try {
    m.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.steps = get_long("train_steps");
  t.batch_size = get_int("batch_size");
  t.learning_rate = get_real("learning_rate");
  t.warmup = get_int("warmup");
  t.grad_clip = get_real("grad_clip");
  t.sigma = get_real("sigma");
  t.eval_every = get_long("eval_every");
  t.seed = static_cast<std::uint64_t>(get_long("seed"));
  if (t.steps < 1 || t.batch_size < 1 || t.warmup < 1)
    throw ConfigError("train_steps, batch_size and warmup must be positive");
  return t;
}

SampleConfig RunConfig::sample_config() const {
  SampleConfig s;
  s.sigma = get_real("sigma");
  s.euler_steps = get_int("euler_steps");
  s.rounding = parse_rounding_mode(get("rounding"));
  s.validity_fix = get_bool("validity_fix");
  s.threads = get_int("threads");
  s.seed = static_cast<std::uint64_t>(get_long("seed"));
  if (s.euler_steps < 1 || s.threads < 1)
    throw ConfigError("euler_steps and threads must be positive");
  return s;
}

SplitRatios RunConfig::split_ratios() const {
  auto r = get_real_list("split_ratios");
  if (r.size() != 3)
    throw ConfigError("split_ratios needs three values");
  return { r[0], r[1], r[2] };
}

}  // namespace beflow
