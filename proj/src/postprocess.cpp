//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/postprocess.h"

#include <cmath>
#include <string>

namespace beflow {

const char *to_string(RoundingMode mode) {
  return mode == RoundingMode::kFullMatrix ? "full_matrix" : "symmetric_safe";
}

RoundingMode parse_rounding_mode(std::string_view name) {
  if (name == "full_matrix")
    return RoundingMode::kFullMatrix;
  if (name == "symmetric_safe")
    return RoundingMode::kSymmetricSafe;
  throw std::invalid_argument("unknown rounding mode '" + std::string(name)
                              + "'");
}

namespace {

// Each value counts weight[i] times toward the sum.
std::vector<long> round_weighted(const std::vector<double> &x,
                                 const std::vector<int> &weight, long target) {
  const std::size_t m = x.size();
  std::vector<long> out(m);
  std::vector<double> diff(m);
  long need = target, cells = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double r = std::nearbyint(x[i]);
    out[i] = static_cast<long>(r);
    diff[i] = x[i] - r;
    need -= weight[i] * out[i];
    cells += weight[i];
  }
  // Each entry moves by at most one unit.
  if (std::abs(need) > cells)
    throw InfeasibleTarget("target " + std::to_string(target) + " is "
                           + std::to_string(need) + " units from the rounded"
                           " sum with only " + std::to_string(cells)
                           + " adjustable units");

  std::vector<bool> moved(m, false);
  while (need != 0) {
    const int dir = need > 0 ? 1 : -1;
    long best = -1;
    for (std::size_t i = 0; i < m; ++i) {
      if (moved[i] || weight[i] > std::abs(need))
        continue;
      if (best < 0 || (dir > 0 ? diff[i] > diff[best] : diff[i] < diff[best]))
        best = static_cast<long>(i);
    }
    if (best < 0)
      throw InfeasibleTarget("no adjustable entry left; "
                             + std::to_string(need) + " units unassigned");
    moved[best] = true;
    out[best] += dir;
    need -= dir * weight[best];
  }
  return out;
}

}  // namespace

std::vector<long> sum_safe_round(const std::vector<double> &x, long target) {
  return round_weighted(x, std::vector<int>(x.size(), 1), target);
}

IntMatrix sum_safe_round(const Eigen::MatrixXd &x, long target,
                         RoundingMode mode) {
  const int rows = static_cast<int>(x.rows()), cols = static_cast<int>(x.cols());
  IntMatrix out(rows, cols);
  std::vector<double> flat;
  std::vector<int> weight;
  if (mode == RoundingMode::kFullMatrix) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        flat.push_back(x(i, j));
        weight.push_back(1);
      }
    auto r = round_weighted(flat, weight, target);
    for (int i = 0, k = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        out(i, j) = static_cast<int>(r[k++]);
    return out;
  }

  if (rows != cols)
    throw std::invalid_argument("symmetric rounding needs a square matrix");
  for (int i = 0; i < rows; ++i)
    for (int j = i; j < cols; ++j) {
      flat.push_back(i == j ? x(i, i) : 0.5 * (x(i, j) + x(j, i)));
      weight.push_back(i == j ? 1 : 2);
    }
  auto r = round_weighted(flat, weight, target);
  for (int i = 0, k = 0; i < rows; ++i)
    for (int j = i; j < cols; ++j, ++k)
      out(i, j) = out(j, i) = static_cast<int>(r[k]);
  return out;
}

FixResult validity_fix(const BEMatrix &reactant, const IntMatrix &predicted) {
  const int n = reactant.size();
  FixResult res { predicted, FixStatus::kNotNeeded };
  std::vector<int> d(n);
  long sum = 0;
  bool any = false;
  for (int i = 0; i < n; ++i) {
    d[i] = predicted.row(i).head(n).sum() - reactant.entries.row(i).head(n).sum();
    sum += d[i];
    any = any || d[i] != 0;
  }
  if (!any)
    return res;
  res.status = FixStatus::kNotApplicable;
  if (sum != 0)
    return res;
  for (int i = 0; i < n; ++i)
    if (predicted(i, i) - d[i] < 0)
      return res;
  for (int i = 0; i < n; ++i)
    res.matrix(i, i) -= d[i];
  res.status = FixStatus::kApplied;
  return res;
}

const char *to_string(FailureMode mode) {
  switch (mode) {
  case FailureMode::kNegativeAndAsymmetric:
    return "negative_and_asymmetric";
  case FailureMode::kNegativeOnly:
    return "negative_only";
  case FailureMode::kAsymmetricOnly:
    return "asymmetric_only";
  case FailureMode::kChemInvalid:
    return "chem_invalid";
  case FailureMode::kNone:
    return "none";
  }
  return "unknown";
}

FailureMode classify_failure(const IntMatrix &m,
                             const Reconstruction &reconstruction) {
  bool negative = (m.array() < 0).any();
  bool asymmetric = m.rows() != m.cols() || m != m.transpose();
  for (int i = 0; i < m.rows() && !asymmetric; ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) % 2 != 0) {
        asymmetric = true;
        break;
      }
  if (negative && asymmetric)
    return FailureMode::kNegativeAndAsymmetric;
  if (negative)
    return FailureMode::kNegativeOnly;
  if (asymmetric)
    return FailureMode::kAsymmetricOnly;
  if (!reconstruction.ok())
    return FailureMode::kChemInvalid;
  return FailureMode::kNone;
}

DecodedState decode_state(const BEMatrix &reactant, const Eigen::MatrixXd &x,
                          RoundingMode mode, bool apply_fix,
                          const PeriodicTable &table) {
  DecodedState out;
  IntMatrix rounded = sum_safe_round(x, reactant.total(), mode);
  if (apply_fix) {
    FixResult fixed = validity_fix(reactant, rounded);
    out.fix = fixed.status;
    rounded = std::move(fixed.matrix);
  }
  out.product.atoms = reactant.atoms;
  out.product.entries = std::move(rounded);
  out.reconstruction = reconstruct(out.product, table);
  out.failure = classify_failure(out.product.entries, out.reconstruction);
  return out;
}

}  // namespace beflow
