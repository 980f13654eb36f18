//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_RUN_CONFIG_H_
#define BEFLOW_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beflow/dataio.h"
#include "beflow/flow.h"
#include "beflow/mechsearch.h"
#include "beflow/model.h"
#include "beflow/train.h"

namespace beflow {

class ConfigError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ConfigType { kString, kInt, kReal, kBool, kIntList, kRealList };

struct ConfigKey {
  std::string name;
  ConfigType type;
  std::string default_value;
  std::string help;
};

/**
 * Flat key=value settings for every command. Files hold one assignment per
 * line ('#' comments); later assignments and overrides win. Unknown keys
 * and ill-typed values throw ConfigError.
 */
class RunConfig {
public:
  RunConfig();

  static const std::vector<ConfigKey> &keys();

  void load_file(const std::string &path);
  void parse(const std::string &text, const std::string &origin = "config");
  // "key=value".
  void apply_override(const std::string &assignment);
  void set(const std::string &key, const std::string &value);

  const std::string &get(const std::string &key) const;
  int get_int(const std::string &key) const;
  long get_long(const std::string &key) const;
  double get_real(const std::string &key) const;
  bool get_bool(const std::string &key) const;
  std::vector<int> get_int_list(const std::string &key) const;
  std::vector<double> get_real_list(const std::string &key) const;

  // Every key in declaration order, ready to be loaded again.
  void write(std::ostream &out) const;

  FlowConfig flow_config() const;
  ModelConfig model_config() const;
  TrainConfig train_config() const;
  SampleConfig sample_config() const;
  SplitRatios split_ratios() const;

private:
  std::map<std::string, std::string> values_;
};

}  // namespace beflow

#endif  // BEFLOW_RUN_CONFIG_H_
