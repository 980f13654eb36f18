//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/flow.h"

#include <cmath>
#include <string>

namespace beflow {

int FlowConfig::rbf_count() const {
  if (rbf_step <= 0 || rbf_high < rbf_low)
    return 0;
  return static_cast<int>(std::floor((rbf_high - rbf_low) / rbf_step + 1e-9))
         + 1;
}

void FlowConfig::validate() const {
  if (!(sigma >= 0))
    throw std::invalid_argument("sigma must be nonnegative");
  if (rbf_count() < 1)
    throw std::invalid_argument("RBF grid is empty");
  if (!(rbf_gamma > 0))
    throw std::invalid_argument("rbf_gamma must be positive");
  if (euler_steps < 1)
    throw std::invalid_argument("euler_steps must be at least 1");
}

Eigen::MatrixXd sample_noise(const std::vector<bool> &mask, double sigma,
                             Rng &rng) {
  const int n = static_cast<int>(mask.size());
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
  if (sigma == 0)
    return z;
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0;
  long active = 0;
  for (int i = 0; i < n; ++i) {
    if (!mask[i])
      continue;
    for (int j = i; j < n; ++j) {
      if (!mask[j])
        continue;
      double v = normal(rng);
      z(i, j) = z(j, i) = v;
      sum += i == j ? v : 2 * v;
    }
    ++active;
  }
  const double mean = sum / static_cast<double>(active * active);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (mask[i] && mask[j])
        z(i, j) = sigma * (z(i, j) - mean);
  return z;
}

Eigen::MatrixXd sample_noise(int n, double sigma, Rng &rng) {
  return sample_noise(std::vector<bool>(n, true), sigma, rng);
}

Eigen::MatrixXd sample_path_point(const Eigen::MatrixXd &x0,
                                  const Eigen::MatrixXd &x1, double t,
                                  double sigma, Rng &rng) {
  if (x0.rows() != x1.rows() || x0.cols() != x1.cols())
    throw std::invalid_argument("path endpoints differ in shape");
  Eigen::MatrixXd x = t * x1 + (1 - t) * x0;
  if (sigma > 0)
    x += sample_noise(static_cast<int>(x0.rows()), sigma, rng);
  return x;
}

Eigen::MatrixXd target_field(const Eigen::MatrixXd &x0,
                             const Eigen::MatrixXd &x1) {
  if (x0.rows() != x1.rows() || x0.cols() != x1.cols())
    throw std::invalid_argument("path endpoints differ in shape");
  Eigen::MatrixXd u = x1 - x0;
  if (std::abs(u.sum()) > 1e-9)
    throw std::invalid_argument("endpoint electron totals differ by "
                                + std::to_string(u.sum()));
  return u;
}

double cfm_loss(const std::vector<Eigen::MatrixXd> &predicted,
                const std::vector<Eigen::MatrixXd> &target,
                const std::vector<std::vector<bool>> &masks) {
  if (predicted.empty())
    throw std::invalid_argument("empty batch");
  if (predicted.size() != target.size()
      || (!masks.empty() && masks.size() != predicted.size()))
    throw std::invalid_argument("batch sizes differ");
  double total = 0;
  for (std::size_t b = 0; b < predicted.size(); ++b) {
    const auto &p = predicted[b];
    const auto &y = target[b];
    if (p.rows() != y.rows() || p.cols() != y.cols())
      throw std::invalid_argument("prediction and target differ in shape");
    double se = 0;
    long count = 0;
    for (int i = 0; i < p.rows(); ++i)
      for (int j = 0; j < p.cols(); ++j) {
        if (!masks.empty() && !(masks[b][i] && masks[b][j]))
          continue;
        double d = p(i, j) - y(i, j);
        se += d * d;
        ++count;
      }
    total += count > 0 ? se / static_cast<double>(count) : 0.0;
  }
  return total / static_cast<double>(predicted.size());
}

std::vector<double> rbf_centers(const FlowConfig &config) {
  std::vector<double> c(config.rbf_count());
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] = config.rbf_low + static_cast<double>(k) * config.rbf_step;
  return c;
}

Eigen::VectorXd rbf_featurize(double value, const FlowConfig &config) {
  const auto centers = rbf_centers(config);
  Eigen::VectorXd out(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) {
    double d = value - centers[k];
    out[static_cast<Eigen::Index>(k)] = std::exp(-config.rbf_gamma * d * d);
  }
  return out;
}

Eigen::MatrixXd euler_integrate(const VectorField &field,
                                const Eigen::MatrixXd &x0, int steps,
                                std::vector<double> *totals) {
  if (steps < 1)
    throw std::invalid_argument("euler_integrate needs at least one step");
  Eigen::MatrixXd x = x0;
  const double dt = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    Eigen::MatrixXd v = field(s * dt, x);
    if (!v.allFinite())
      throw NonFiniteField("vector field returned a non-finite value at step "
                               + std::to_string(s),
                           s);
    x += dt * v;
    if (totals)
      totals->push_back(x.sum());
  }
  return x;
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                         std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

}  // namespace beflow
