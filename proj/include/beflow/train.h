//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_TRAIN_H_
#define BEFLOW_TRAIN_H_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beflow/be_matrix.h"
#include "beflow/model.h"

namespace beflow {

// lr(step) = factor * d^-0.5 * min(step^-0.5, step * warmup^-1.5), step >= 1.
class NoamSchedule {
public:
  NoamSchedule(double factor, int model_dim, int warmup);
  // Schedule whose value at step == warmup equals peak.
  static NoamSchedule with_peak(double peak, int model_dim, int warmup);

  double operator()(long step) const;
  double factor() const { return factor_; }

private:
  double factor_;
  int model_dim_;
  int warmup_;
};

class Adam {
public:
  Adam(long size, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  void step(Eigen::VectorXd &params, const Eigen::VectorXd &grad, double lr);
  long steps() const { return t_; }

private:
  double beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

// Reactant/product matrices of one cleaned elementary step.
struct TrainPair {
  std::string id;
  BEMatrix reactant;
  BEMatrix product;
  AtomFeatures features;  // of the reactant
};

struct TrainConfig {
  long steps = 3000;
  int batch_size = 32;
  double learning_rate = 1e-3;  // peak of the Noam schedule
  int warmup = 200;
  double grad_clip = 1.0;  // global norm; <= 0 disables
  double sigma = 0.15;
  long eval_every = 0;  // 0: validate only at the end
  std::uint64_t seed = 1;
};

struct TrainLogEntry {
  long step = 0;
  double loss = 0;
  double lr = 0;
  bool validated = false;
  double val_accuracy = 0;
};

struct TrainResult {
  Eigen::VectorXd best_parameters;
  double best_val_accuracy = -1;  // -1 without a validator
  long best_step = 0;
  std::vector<TrainLogEntry> log;
};

class DivergenceError: public std::runtime_error {
public:
  DivergenceError(const std::string &what, std::vector<std::string> batch)
      : std::runtime_error(what), batch_(std::move(batch)) { }

  const std::vector<std::string> &batch_ids() const { return batch_; }

private:
  std::vector<std::string> batch_;
};

using Validator = std::function<double(const VectorFieldModel &)>;
using LogSink = std::function<void(const TrainLogEntry &)>;

/**
 * Conditional flow-matching training. Each step draws batch_size pairs
 * uniformly with replacement, t ~ U[0, 1], and regresses the model at
 * t*x1 + (1-t)*x0 + noise onto x1 - x0. Adam under a Noam schedule with
 * global-norm clipping. The validator, when given, runs every eval_every
 * steps and at the end; the best-scoring parameters are returned (ties keep
 * the later step). The model is left holding the final parameters.
 *
 * Throws DivergenceError naming the batch when the loss is not finite.
 */
TrainResult train(VectorFieldModel &model, const std::vector<TrainPair> &data,
                  const TrainConfig &config, const Validator &validate = {},
                  const LogSink &sink = {});

// Draw the examples for one batch (exposed for tests).
std::vector<FieldExample> make_batch(const std::vector<TrainPair> &data,
                                     const std::vector<int> &indices,
                                     double sigma, Rng &rng);

}  // namespace beflow

#endif  // BEFLOW_TRAIN_H_
