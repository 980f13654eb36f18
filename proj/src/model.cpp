//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/model.h"

#include <cmath>
#include <random>
#include <utility>

namespace beflow {

void ModelConfig::validate() const {
  if (embed_dim < 2 || hidden_dim < 1 || ffn_dim < 1 || layers < 0
      || heads < 1 || max_atoms < 1)
    throw std::invalid_argument("model dimensions must be positive");
  if (embed_dim % heads != 0)
    throw std::invalid_argument("embed_dim must be divisible by heads");
}

namespace {

constexpr int kBuckets = 5;
constexpr double kLayerNormEps = 1e-5;

int bucket(int v, int lo) {
  return std::clamp(v - lo, 0, kBuckets - 1);
}

using Map = Eigen::Map<RowMatrix>;
using ConstMap = Eigen::Map<const RowMatrix>;

struct LnCache {
  RowMatrix xhat;
  Eigen::VectorXd rstd;
};

RowMatrix layer_norm(const RowMatrix &x, const ConstMap &g, const ConstMap &b,
                     LnCache &c) {
  const auto n = x.rows();
  c.xhat.resize(n, x.cols());
  c.rstd.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mu = x.row(i).mean();
    auto centered = x.row(i).array() - mu;
    double var = centered.square().mean();
    c.rstd[i] = 1.0 / std::sqrt(var + kLayerNormEps);
    c.xhat.row(i) = centered * c.rstd[i];
  }
  RowMatrix y = c.xhat.array().rowwise() * g.row(0).array();
  y.rowwise() += b.row(0);
  return y;
}

RowMatrix layer_norm_backward(const RowMatrix &dy, const ConstMap &g,
                              const LnCache &c, Map dg, Map db) {
  dg.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  db.row(0) += dy.colwise().sum();
  RowMatrix dxhat = dy.array().rowwise() * g.row(0).array();
  RowMatrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    double m1 = dxhat.row(i).mean();
    double m2 = (dxhat.row(i).array() * c.xhat.row(i).array()).mean();
    dx.row(i) = c.rstd[i]
                * (dxhat.row(i).array() - m1 - c.xhat.row(i).array() * m2);
  }
  return dx;
}

RowMatrix relu(const RowMatrix &x) {
  return x.cwiseMax(0.0);
}

RowMatrix relu_mask(const RowMatrix &x) {
  return (x.array() > 0).cast<double>();
}

void check_finite(const RowMatrix &m, int layer, const char *where) {
  if (!m.allFinite())
    throw NonFiniteActivation(std::string("non-finite activation in ") + where
                                  + " of layer " + std::to_string(layer),
                              layer);
}

}  // namespace

int feature_dim(const PeriodicTable &table) {
  return table.size() + 3 * kBuckets;
}

AtomFeatures atom_features(const BEMatrix &be, const PeriodicTable &table) {
  const int n = be.size();
  const int e = table.size();
  AtomFeatures f;
  f.values = RowMatrix::Zero(n, feature_dim(table));
  for (int i = 0; i < n; ++i) {
    int idx = table.index_of(be.atoms[i].atomic_number);
    if (idx < 0)
      throw BEError("element missing from periodic table");
    f.values(i, idx) = 1;
    int hydrogens = 0, heavy = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i || be.entries(i, j) == 0)
        continue;
      if (be.atoms[j].atomic_number == 1)
        ++hydrogens;
      else
        ++heavy;
    }
    f.values(i, e + bucket(formal_charge(be, i, table), -2)) = 1;
    f.values(i, e + kBuckets + bucket(hydrogens, 0)) = 1;
    f.values(i, e + 2 * kBuckets + bucket(heavy, 0)) = 1;
  }
  return f;
}

Eigen::VectorXd time_embedding(double t, int dim) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  const int half = dim / 2;
  for (int k = 0; k < half; ++k) {
    double freq = std::exp(-std::log(10000.0) * k / half);
    double arg = 1000.0 * t * freq;
    out[k] = std::sin(arg);
    out[half + k] = std::cos(arg);
  }
  return out;
}

struct VectorFieldModel::Cache {
  struct Layer {
    RowMatrix h_in;
    LnCache ln1;
    RowMatrix u, q, k, v;
    std::vector<RowMatrix> p;
    RowMatrix o;
    LnCache ln2;
    RowMatrix u2, f1, g;
  };

  int n = 0;
  RowMatrix features;
  Eigen::RowVectorXd temb;
  RowMatrix rbf;   // n*n x K, row i*n+j
  RowMatrix bias;  // n*n x layers*heads
  std::vector<Layer> layers;
  LnCache lnf;
  RowMatrix z;
  RowMatrix diag_rbf, diag_pre;
  std::vector<std::pair<int, int>> pairs;
  RowMatrix pair_rbf, pair_pre;
};

int VectorFieldModel::add_tensor(const std::string &name, int rows, int cols) {
  long offset = tensors_.empty() ? 0 : tensors_.back().offset
                                           + tensors_.back().size();
  tensors_.push_back({ name, rows, cols, offset });
  return static_cast<int>(tensors_.size()) - 1;
}

VectorFieldModel::VectorFieldModel(const ModelConfig &config,
                                   const FlowConfig &flow, int feature_dim)
    : config_(config), flow_(flow), feature_dim_(feature_dim) {
  config_.validate();
  flow_.validate();
  const int d = config_.embed_dim, f = config_.ffn_dim,
            hd = config_.hidden_dim, k = flow_.rbf_count(),
            lh = config_.layers * config_.heads;

  embed_w_ = add_tensor("embed.w", feature_dim_, d);
  embed_b_ = add_tensor("embed.b", 1, d);
  time_w_ = add_tensor("time.w", d, d);
  time_b_ = add_tensor("time.b", 1, d);
  bias_w_ = add_tensor("attn_bias.w", k, lh);
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    LayerIds ids;
    ids.ln1_g = add_tensor(p + "ln1.g", 1, d);
    ids.ln1_b = add_tensor(p + "ln1.b", 1, d);
    ids.wq = add_tensor(p + "attn.wq", d, d);
    ids.bq = add_tensor(p + "attn.bq", 1, d);
    ids.wk = add_tensor(p + "attn.wk", d, d);
    ids.wv = add_tensor(p + "attn.wv", d, d);
    ids.bv = add_tensor(p + "attn.bv", 1, d);
    ids.wo = add_tensor(p + "attn.wo", d, d);
    ids.bo = add_tensor(p + "attn.bo", 1, d);
    ids.ln2_g = add_tensor(p + "ln2.g", 1, d);
    ids.ln2_b = add_tensor(p + "ln2.b", 1, d);
    ids.w1 = add_tensor(p + "ffn.w1", d, f);
    ids.b1 = add_tensor(p + "ffn.b1", 1, f);
    ids.w2 = add_tensor(p + "ffn.w2", f, d);
    ids.b2 = add_tensor(p + "ffn.b2", 1, d);
    layer_ids_.push_back(ids);
  }
  final_g_ = add_tensor("final_ln.g", 1, d);
  final_b_ = add_tensor("final_ln.b", 1, d);
  diag_w1_ = add_tensor("diag_head.w1", d, hd);
  diag_wr_ = add_tensor("diag_head.wr", k, hd);
  diag_b1_ = add_tensor("diag_head.b1", 1, hd);
  diag_w2_ = add_tensor("diag_head.w2", hd, 1);
  diag_b2_ = add_tensor("diag_head.b2", 1, 1);
  pair_wh_ = add_tensor("pair_head.wh", d, hd);
  pair_wr_ = add_tensor("pair_head.wr", k, hd);
  pair_b_ = add_tensor("pair_head.b1", 1, hd);
  pair_w2_ = add_tensor("pair_head.w2", hd, 1);
  pair_b2_ = add_tensor("pair_head.b2", 1, 1);

  params_ = Eigen::VectorXd::Zero(tensors_.back().offset
                                  + tensors_.back().size());
}

const TensorInfo &VectorFieldModel::tensor(const std::string &name) const {
  for (const TensorInfo &t: tensors_)
    if (t.name == name)
      return t;
  throw std::out_of_range("no tensor named " + name);
}

void VectorFieldModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const TensorInfo &t: tensors_) {
    double *p = params_.data() + t.offset;
    const bool gain = t.name.ends_with(".g");
    const bool bias = t.rows == 1 && !gain;
    for (long i = 0; i < t.size(); ++i) {
      if (gain)
        p[i] = 1.0;
      else if (bias)
        p[i] = 0.0;
      else
        p[i] = normal(rng) / std::sqrt(static_cast<double>(t.rows));
    }
  }
}

void VectorFieldModel::zero_output_heads() {
  for (int id: { diag_w2_, diag_b2_, pair_w2_, pair_b2_ }) {
    const TensorInfo &t = tensors_[id];
    params_.segment(t.offset, t.size()).setZero();
  }
}

Eigen::MatrixXd VectorFieldModel::run(const Eigen::MatrixXd &state,
                                      const AtomFeatures &features, double t,
                                      Cache &c) const {
  auto W = [&](int id) {
    const TensorInfo &ti = tensors_[id];
    return ConstMap(params_.data() + ti.offset, ti.rows, ti.cols);
  };

  const int n = static_cast<int>(state.rows());
  if (state.cols() != n || features.size() != n)
    throw std::invalid_argument("state and features disagree on atom count");
  if (features.values.cols() != feature_dim_)
    throw std::invalid_argument("feature width does not match the model");
  if (n > config_.max_atoms)
    throw std::invalid_argument("system has " + std::to_string(n)
                                + " atoms; model limit is "
                                + std::to_string(config_.max_atoms));
  const int d = config_.embed_dim, heads = config_.heads, dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto centers = rbf_centers(flow_);
  const int k = static_cast<int>(centers.size());

  c.n = n;
  c.features = features.values;
  c.rbf.resize(static_cast<long>(n) * n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int q = 0; q < k; ++q) {
        double dv = state(i, j) - centers[q];
        c.rbf(i * n + j, q) = std::exp(-flow_.rbf_gamma * dv * dv);
      }
  c.bias = c.rbf * W(bias_w_);

  c.temb = time_embedding(t, d).transpose();
  Eigen::RowVectorXd tproj = c.temb * W(time_w_) + W(time_b_).row(0);
  RowMatrix h = c.features * W(embed_w_);
  h.rowwise() += W(embed_b_).row(0) + tproj;
  check_finite(h, -1, "embedding");

  c.layers.assign(config_.layers, {});
  for (int l = 0; l < config_.layers; ++l) {
    const LayerIds &id = layer_ids_[l];
    Cache::Layer &lc = c.layers[l];
    lc.h_in = h;
    lc.u = layer_norm(h, W(id.ln1_g), W(id.ln1_b), lc.ln1);
    lc.q = lc.u * W(id.wq);
    lc.q.rowwise() += W(id.bq).row(0);
    lc.k = lc.u * W(id.wk);
    lc.v = lc.u * W(id.wv);
    lc.v.rowwise() += W(id.bv).row(0);
    lc.o.resize(n, d);
    lc.p.resize(heads);
    for (int hh = 0; hh < heads; ++hh) {
      RowMatrix s = lc.q.middleCols(hh * dh, dh)
                    * lc.k.middleCols(hh * dh, dh).transpose() * scale;
      const int col = l * heads + hh;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
          s(i, j) += c.bias(i * n + j, col);
        double mx = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - mx).exp();
        s.row(i) /= s.row(i).sum();
      }
      lc.o.middleCols(hh * dh, dh) = s * lc.v.middleCols(hh * dh, dh);
      lc.p[hh] = std::move(s);
    }
    h += lc.o * W(id.wo);
    h.rowwise() += W(id.bo).row(0);
    lc.u2 = layer_norm(h, W(id.ln2_g), W(id.ln2_b), lc.ln2);
    lc.f1 = lc.u2 * W(id.w1);
    lc.f1.rowwise() += W(id.b1).row(0);
    lc.g = relu(lc.f1);
    h += lc.g * W(id.w2);
    h.rowwise() += W(id.b2).row(0);
    check_finite(h, l, "transformer block");
  }
  c.z = layer_norm(h, W(final_g_), W(final_b_), c.lnf);

  // Diagonal head.
  c.diag_rbf.resize(n, k);
  for (int i = 0; i < n; ++i)
    c.diag_rbf.row(i) = c.rbf.row(i * n + i);
  c.diag_pre = c.z * W(diag_w1_) + c.diag_rbf * W(diag_wr_);
  c.diag_pre.rowwise() += W(diag_b1_).row(0);
  RowMatrix diag_out = relu(c.diag_pre) * W(diag_w2_);

  // Pair head over i < j.
  c.pairs.clear();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      c.pairs.emplace_back(i, j);
  const int np = static_cast<int>(c.pairs.size());
  c.pair_rbf.resize(np, k);
  for (int p = 0; p < np; ++p)
    c.pair_rbf.row(p) = c.rbf.row(c.pairs[p].first * n + c.pairs[p].second);
  RowMatrix m = c.z * W(pair_wh_);
  c.pair_pre = c.pair_rbf * W(pair_wr_);
  for (int p = 0; p < np; ++p)
    c.pair_pre.row(p) += m.row(c.pairs[p].first) + m.row(c.pairs[p].second)
                         + W(pair_b_).row(0);
  RowMatrix pair_out = relu(c.pair_pre) * W(pair_w2_);

  Eigen::MatrixXd y(n, n);
  const double db = W(diag_b2_)(0, 0), pb = W(pair_b2_)(0, 0);
  for (int i = 0; i < n; ++i)
    y(i, i) = diag_out(i, 0) + db;
  for (int p = 0; p < np; ++p) {
    auto [i, j] = c.pairs[p];
    y(i, j) = y(j, i) = pair_out(p, 0) + pb;
  }
  if (!y.allFinite())
    throw NonFiniteActivation("non-finite output", config_.layers);
  y.array() -= y.mean();
  return y;
}

void VectorFieldModel::backprop(const Cache &c, const Eigen::MatrixXd &dy,
                                Eigen::VectorXd &gradient) const {
  auto W = [&](int id) {
    const TensorInfo &ti = tensors_[id];
    return ConstMap(params_.data() + ti.offset, ti.rows, ti.cols);
  };
  auto G = [&](int id) {
    const TensorInfo &ti = tensors_[id];
    return Map(gradient.data() + ti.offset, ti.rows, ti.cols);
  };

  const int n = c.n, d = config_.embed_dim, heads = config_.heads,
            hdim = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hdim));

  // Mean-subtraction projection.
  Eigen::MatrixXd draw = dy.array() - dy.mean();

  // Diagonal head.
  RowMatrix ddiag(n, 1);
  for (int i = 0; i < n; ++i)
    ddiag(i, 0) = draw(i, i);
  RowMatrix diag_act = relu(c.diag_pre);
  G(diag_w2_) += diag_act.transpose() * ddiag;
  G(diag_b2_)(0, 0) += ddiag.sum();
  RowMatrix ddpre = (ddiag * W(diag_w2_).transpose()).cwiseProduct(
      relu_mask(c.diag_pre));
  G(diag_w1_) += c.z.transpose() * ddpre;
  G(diag_wr_) += c.diag_rbf.transpose() * ddpre;
  G(diag_b1_).row(0) += ddpre.colwise().sum();
  RowMatrix dz = ddpre * W(diag_w1_).transpose();

  // Pair head.
  const int np = static_cast<int>(c.pairs.size());
  RowMatrix dpair(np, 1);
  for (int p = 0; p < np; ++p) {
    auto [i, j] = c.pairs[p];
    dpair(p, 0) = draw(i, j) + draw(j, i);
  }
  RowMatrix pair_act = relu(c.pair_pre);
  G(pair_w2_) += pair_act.transpose() * dpair;
  G(pair_b2_)(0, 0) += dpair.sum();
  RowMatrix dppre = (dpair * W(pair_w2_).transpose()).cwiseProduct(
      relu_mask(c.pair_pre));
  G(pair_wr_) += c.pair_rbf.transpose() * dppre;
  G(pair_b_).row(0) += dppre.colwise().sum();
  RowMatrix dm = RowMatrix::Zero(n, config_.hidden_dim);
  for (int p = 0; p < np; ++p) {
    dm.row(c.pairs[p].first) += dppre.row(p);
    dm.row(c.pairs[p].second) += dppre.row(p);
  }
  G(pair_wh_) += c.z.transpose() * dm;
  dz += dm * W(pair_wh_).transpose();

  RowMatrix dh = layer_norm_backward(dz, W(final_g_), c.lnf, G(final_g_),
                                     G(final_b_));

  RowMatrix dbias = RowMatrix::Zero(c.bias.rows(), c.bias.cols());
  for (int l = config_.layers - 1; l >= 0; --l) {
    const LayerIds &id = layer_ids_[l];
    const Cache::Layer &lc = c.layers[l];

    // Feed-forward sublayer.
    G(id.w2) += lc.g.transpose() * dh;
    G(id.b2).row(0) += dh.colwise().sum();
    RowMatrix df1 = (dh * W(id.w2).transpose()).cwiseProduct(relu_mask(lc.f1));
    G(id.w1) += lc.u2.transpose() * df1;
    G(id.b1).row(0) += df1.colwise().sum();
    RowMatrix du2 = df1 * W(id.w1).transpose();
    dh += layer_norm_backward(du2, W(id.ln2_g), lc.ln2, G(id.ln2_g),
                              G(id.ln2_b));

    // Attention sublayer.
    G(id.wo) += lc.o.transpose() * dh;
    G(id.bo).row(0) += dh.colwise().sum();
    RowMatrix dout = dh * W(id.wo).transpose();
    RowMatrix dq(n, d), dk(n, d), dv(n, d);
    for (int hh = 0; hh < heads; ++hh) {
      const RowMatrix &p = lc.p[hh];
      RowMatrix doh = dout.middleCols(hh * hdim, hdim);
      RowMatrix dp = doh * lc.v.middleCols(hh * hdim, hdim).transpose();
      dv.middleCols(hh * hdim, hdim) = p.transpose() * doh;
      RowMatrix ds(n, n);
      for (int i = 0; i < n; ++i) {
        double dot = p.row(i).dot(dp.row(i));
        ds.row(i) = p.row(i).array() * (dp.row(i).array() - dot);
      }
      const int col = l * heads + hh;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          dbias(i * n + j, col) = ds(i, j);
      dq.middleCols(hh * hdim, hdim) = ds * lc.k.middleCols(hh * hdim, hdim) * scale;
      dk.middleCols(hh * hdim, hdim) =
          ds.transpose() * lc.q.middleCols(hh * hdim, hdim) * scale;
    }
    G(id.wq) += lc.u.transpose() * dq;
    G(id.bq).row(0) += dq.colwise().sum();
    G(id.wk) += lc.u.transpose() * dk;
    G(id.wv) += lc.u.transpose() * dv;
    G(id.bv).row(0) += dv.colwise().sum();
    RowMatrix du = dq * W(id.wq).transpose() + dk * W(id.wk).transpose()
                   + dv * W(id.wv).transpose();
    dh += layer_norm_backward(du, W(id.ln1_g), lc.ln1, G(id.ln1_g),
                              G(id.ln1_b));
  }

  G(bias_w_) += c.rbf.transpose() * dbias;
  G(embed_w_) += c.features.transpose() * dh;
  Eigen::RowVectorXd dsum = dh.colwise().sum();
  G(embed_b_).row(0) += dsum;
  G(time_w_) += c.temb.transpose() * dsum;
  G(time_b_).row(0) += dsum;
}

Eigen::MatrixXd VectorFieldModel::forward(const Eigen::MatrixXd &state,
                                          const AtomFeatures &features,
                                          double t) const {
  // Reused across calls so the RBF block is not reallocated per step.
  thread_local Cache cache;
  return run(state, features, t, cache);
}

double VectorFieldModel::loss_and_gradient(
    const std::vector<FieldExample> &batch, Eigen::VectorXd &gradient) const {
  if (batch.empty())
    throw std::invalid_argument("empty batch");
  gradient = Eigen::VectorXd::Zero(params_.size());
  const double b = static_cast<double>(batch.size());
  double total = 0;
  thread_local Cache cache;
  for (const FieldExample &ex: batch) {
    Eigen::MatrixXd y = run(ex.state, ex.features, ex.t, cache);
    Eigen::MatrixXd diff = y - ex.target;
    const double m = static_cast<double>(diff.size());
    total += diff.squaredNorm() / m;
    backprop(cache, 2.0 * diff / (m * b), gradient);
  }
  return total / b;
}

double VectorFieldModel::loss(const std::vector<FieldExample> &batch) const {
  if (batch.empty())
    throw std::invalid_argument("empty batch");
  double total = 0;
  for (const FieldExample &ex: batch) {
    Eigen::MatrixXd diff = forward(ex.state, ex.features, ex.t) - ex.target;
    total += diff.squaredNorm() / static_cast<double>(diff.size());
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace beflow
