//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/train.h"

#include <cmath>

namespace beflow {

NoamSchedule::NoamSchedule(double factor, int model_dim, int warmup)
    : factor_(factor), model_dim_(model_dim), warmup_(warmup) {
  if (model_dim <= 0 || warmup <= 0)
    throw std::invalid_argument("Noam schedule needs positive dims");
}

NoamSchedule NoamSchedule::with_peak(double peak, int model_dim, int warmup) {
  return NoamSchedule(peak * std::sqrt(static_cast<double>(model_dim) * warmup),
                      model_dim, warmup);
}

double NoamSchedule::operator()(long step) const {
  const double s = static_cast<double>(std::max(1L, step));
  return factor_ / std::sqrt(static_cast<double>(model_dim_))
         * std::min(1.0 / std::sqrt(s), s * std::pow(warmup_, -1.5));
}

Adam::Adam(long size, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)) { }

void Adam::step(Eigen::VectorXd &params, const Eigen::VectorXd &grad,
                double lr) {
  ++t_;
  m_ = beta1_ * m_ + (1 - beta1_) * grad;
  v_ = beta2_ * v_ + (1 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -=
      lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

std::vector<FieldExample> make_batch(const std::vector<TrainPair> &data,
                                     const std::vector<int> &indices,
                                     double sigma, Rng &rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<FieldExample> batch;
  batch.reserve(indices.size());
  for (int idx: indices) {
    const TrainPair &p = data[idx];
    Eigen::MatrixXd x0 = p.reactant.active().cast<double>();
    Eigen::MatrixXd x1 = p.product.active().cast<double>();
    FieldExample ex;
    ex.t = uniform(rng);
    ex.state = sample_path_point(x0, x1, ex.t, sigma, rng);
    ex.features = p.features;
    ex.target = target_field(x0, x1);
    batch.push_back(std::move(ex));
  }
  return batch;
}

TrainResult train(VectorFieldModel &model, const std::vector<TrainPair> &data,
                  const TrainConfig &config, const Validator &validate,
                  const LogSink &sink) {
  if (data.empty())
    throw std::invalid_argument("training set is empty");
  if (config.batch_size < 1 || config.steps < 1)
    throw std::invalid_argument("batch_size and steps must be positive");

  Rng rng(config.seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(data.size()) - 1);
  auto schedule = NoamSchedule::with_peak(
      config.learning_rate, model.config().embed_dim, config.warmup);
  Adam adam(model.num_parameters());
  Eigen::VectorXd grad;

  TrainResult result;
  result.best_parameters = model.parameters();
  auto run_validation = [&](TrainLogEntry &entry) {
    entry.validated = true;
    entry.val_accuracy = validate(model);
    if (entry.val_accuracy >= result.best_val_accuracy) {
      result.best_val_accuracy = entry.val_accuracy;
      result.best_parameters = model.parameters();
      result.best_step = entry.step;
    }
  };

  for (long step = 1; step <= config.steps; ++step) {
    std::vector<int> indices(config.batch_size);
    for (int &i: indices)
      i = pick(rng);
    auto batch = make_batch(data, indices, config.sigma, rng);

    TrainLogEntry entry;
    entry.step = step;
    try {
      entry.loss = model.loss_and_gradient(batch, grad);
    } catch (const NonFiniteActivation &) {
      entry.loss = std::nan("");
    }
    if (!std::isfinite(entry.loss) || !grad.allFinite()) {
      std::vector<std::string> ids;
      for (int i: indices)
        ids.push_back(data[i].id);
      throw DivergenceError("loss diverged at step " + std::to_string(step),
                            ids);
    }
    if (config.grad_clip > 0) {
      double norm = grad.norm();
      if (norm > config.grad_clip)
        grad *= config.grad_clip / norm;
    }
    entry.lr = schedule(step);
    adam.step(model.parameters(), grad, entry.lr);

    bool last = step == config.steps;
    if (validate && (last || (config.eval_every > 0
                              && step % config.eval_every == 0)))
      run_validation(entry);
    result.log.push_back(entry);
    if (sink)
      sink(entry);
  }
  if (!validate) {
    result.best_parameters = model.parameters();
    result.best_step = config.steps;
  }
  return result;
}

}  // namespace beflow
