//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_MODEL_H_
#define BEFLOW_MODEL_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beflow/be_matrix.h"
#include "beflow/flow.h"
#include "beflow/periodic_table.h"

namespace beflow {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ModelConfig {
  int embed_dim = 64;
  int hidden_dim = 64;  // width of the two output heads
  int ffn_dim = 128;
  int layers = 4;
  int heads = 8;
  int max_atoms = 64;

  void validate() const;
  bool operator==(const ModelConfig &) const = default;
};

/**
 * Per-atom input features derived from a BE matrix: element one-hot in
 * periodic-table order, then one-hot buckets for formal charge (<=-2 .. >=2),
 * attached hydrogens (0 .. >=4) and heavy-atom neighbors (0 .. >=4).
 */
struct AtomFeatures {
  RowMatrix values;  // atoms x feature_dim

  int size() const { return static_cast<int>(values.rows()); }
};

int feature_dim(const PeriodicTable &table);
AtomFeatures atom_features(const BEMatrix &be,
                           const PeriodicTable &table
                           = PeriodicTable::standard());

class NonFiniteActivation: public std::runtime_error {
public:
  NonFiniteActivation(const std::string &what, int layer)
      : std::runtime_error(what), layer_(layer) { }

  int layer() const { return layer_; }

private:
  int layer_;
};

struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  long offset = 0;

  long size() const { return static_cast<long>(rows) * cols; }
};

// One (x_t, t) -> target regression example.
struct FieldExample {
  Eigen::MatrixXd state;
  AtomFeatures features;
  double t = 0;
  Eigen::MatrixXd target;
};

/**
 * Vector field v(t, x) over a BE matrix. Atom tokens (features plus a
 * sinusoidal time embedding) pass through pre-norm transformer blocks whose
 * attention logits carry a per-head bias linear in the RBF expansion of each
 * matrix cell; neither keys nor that bias carry an offset, which softmax
 * would cancel. A token head predicts diagonal changes; a symmetric pair head
 * (shared token projections of both atoms plus the cell's RBF) predicts
 * off-diagonal changes. The output mean is subtracted so every prediction
 * sums to zero.
 *
 * Parameters live in one flat vector; tensors() names the slices.
 */
class VectorFieldModel {
public:
  VectorFieldModel(const ModelConfig &config, const FlowConfig &flow,
                   int feature_dim);

  const ModelConfig &config() const { return config_; }
  const FlowConfig &flow() const { return flow_; }
  int feature_dim() const { return feature_dim_; }

  const std::vector<TensorInfo> &tensors() const { return tensors_; }
  const TensorInfo &tensor(const std::string &name) const;
  long num_parameters() const { return params_.size(); }

  Eigen::VectorXd &parameters() { return params_; }
  const Eigen::VectorXd &parameters() const { return params_; }

  // Scaled normal weights, zero biases, unit layer-norm gains.
  void initialize(std::uint64_t seed);
  // Zero every output-head weight and bias.
  void zero_output_heads();

  // Throws NonFiniteActivation when an activation overflows.
  Eigen::MatrixXd forward(const Eigen::MatrixXd &state,
                          const AtomFeatures &features, double t) const;

  /**
   * Mean over the batch of the per-example mean squared error; gradient
   * (same layout as parameters()) is overwritten.
   */
  double loss_and_gradient(const std::vector<FieldExample> &batch,
                           Eigen::VectorXd &gradient) const;

  double loss(const std::vector<FieldExample> &batch) const;

private:
  struct Cache;

  Eigen::MatrixXd run(const Eigen::MatrixXd &state,
                      const AtomFeatures &features, double t,
                      Cache &cache) const;
  void backprop(const Cache &cache, const Eigen::MatrixXd &dy,
                Eigen::VectorXd &gradient) const;

  int add_tensor(const std::string &name, int rows, int cols);

  ModelConfig config_;
  FlowConfig flow_;
  int feature_dim_;
  std::vector<TensorInfo> tensors_;
  Eigen::VectorXd params_;

  struct LayerIds {
    int ln1_g, ln1_b, wq, bq, wk, wv, bv, wo, bo;
    int ln2_g, ln2_b, w1, b1, w2, b2;
  };
  int embed_w_, embed_b_, time_w_, time_b_, bias_w_;
  std::vector<LayerIds> layer_ids_;
  int final_g_, final_b_;
  int diag_w1_, diag_wr_, diag_b1_, diag_w2_, diag_b2_;
  int pair_wh_, pair_wr_, pair_b_, pair_w2_, pair_b2_;
};

// Sinusoidal embedding of t in [0, 1], length dim.
Eigen::VectorXd time_embedding(double t, int dim);

}  // namespace beflow

#endif  // BEFLOW_MODEL_H_
