//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_FLOW_H_
#define BEFLOW_FLOW_H_

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace beflow {

using Rng = std::mt19937_64;

struct FlowConfig {
  double sigma = 0.15;
  double rbf_low = 0.0;
  double rbf_high = 8.0;
  double rbf_step = 0.1;
  double rbf_gamma = 10.0;
  int euler_steps = 10;
  std::uint64_t seed = 0;

  int rbf_count() const;
  // Throws std::invalid_argument on a negative sigma, empty grid or
  // nonpositive step count.
  void validate() const;
};

class NonFiniteField: public std::runtime_error {
public:
  NonFiniteField(const std::string &what, int step)
      : std::runtime_error(what), step_(step) { }

  int step() const { return step_; }

private:
  int step_;
};

/**
 * Symmetric Gaussian noise with zero total over the active block: normal
 * draws on the diagonal and upper triangle, mirrored, centered by the mean
 * of all active cells, then scaled by sigma. Inactive rows and columns are
 * zero.
 */
Eigen::MatrixXd sample_noise(const std::vector<bool> &mask, double sigma,
                             Rng &rng);
Eigen::MatrixXd sample_noise(int n, double sigma, Rng &rng);

// t * x1 + (1 - t) * x0 plus sample_noise(sigma).
Eigen::MatrixXd sample_path_point(const Eigen::MatrixXd &x0,
                                  const Eigen::MatrixXd &x1, double t,
                                  double sigma, Rng &rng);

// x1 - x0; throws std::invalid_argument on shape mismatch or a nonzero sum.
Eigen::MatrixXd target_field(const Eigen::MatrixXd &x0,
                             const Eigen::MatrixXd &x1);

/**
 * Mean squared error over the active cells of each sample, averaged over
 * the batch. masks may be empty (all cells active) or hold one atom mask
 * per sample.
 */
double cfm_loss(const std::vector<Eigen::MatrixXd> &predicted,
                const std::vector<Eigen::MatrixXd> &target,
                const std::vector<std::vector<bool>> &masks = {});

// exp(-gamma * (value - c_k)^2) for each grid center c_k.
Eigen::VectorXd rbf_featurize(double value, const FlowConfig &config);
std::vector<double> rbf_centers(const FlowConfig &config);

using VectorField =
    std::function<Eigen::MatrixXd(double t, const Eigen::MatrixXd &x)>;

/**
 * Forward Euler from t = 0 to 1 in the given number of steps. When totals
 * is given it receives the matrix sum after every step.
 *
 * Throws NonFiniteField if the field returns NaN or infinity.
 */
Eigen::MatrixXd euler_integrate(const VectorField &field,
                                const Eigen::MatrixXd &x0, int steps,
                                std::vector<double> *totals = nullptr);

// Independent 64-bit stream key derived from (seed, a, b).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                         std::uint64_t b = 0);

}  // namespace beflow

#endif  // BEFLOW_FLOW_H_
