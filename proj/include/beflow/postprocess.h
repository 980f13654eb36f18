//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_POSTPROCESS_H_
#define BEFLOW_POSTPROCESS_H_

#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "beflow/be_matrix.h"

namespace beflow {

enum class RoundingMode {
  kFullMatrix,     // every cell rounded independently
  kSymmetricSafe,  // diagonal and upper triangle rounded, then mirrored
};

const char *to_string(RoundingMode mode);
// Accepts "full_matrix" and "symmetric_safe".
RoundingMode parse_rounding_mode(std::string_view name);

class InfeasibleTarget: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/**
 * Round to integers while hitting target exactly. Values are rounded to
 * nearest (ties to even); the shortfall is then closed one unit at a time,
 * raising the entry with the largest residual x - round(x) or lowering the
 * one with the smallest, lowest index first on ties. Each entry moves at
 * most once, so no output is more than 1 from its nearest rounding.
 *
 * Throws InfeasibleTarget when |sum(x) - target| >= 0.5 * x.size().
 */
std::vector<long> sum_safe_round(const std::vector<double> &x, long target);

// Matrix form. In symmetric-safe mode off-diagonal pairs count twice
// toward the sum, so the mirrored output still totals target.
IntMatrix sum_safe_round(const Eigen::MatrixXd &x, long target,
                         RoundingMode mode);

enum class FixStatus {
  kNotNeeded,      // row sums already match the reactant
  kApplied,
  kNotApplicable,  // discrepancies do not cancel or would go negative
};

struct FixResult {
  IntMatrix matrix;
  FixStatus status = FixStatus::kNotNeeded;
};

/**
 * Restore per-atom row sums to the reactant's by moving lone electrons:
 * with d_i = predicted row i - reactant row i and sum(d) = 0, every
 * diagonal cell is shifted by -d_i. Off-diagonal cells are never touched.
 */
FixResult validity_fix(const BEMatrix &reactant, const IntMatrix &predicted);

enum class FailureMode {
  kNegativeAndAsymmetric,
  kNegativeOnly,
  kAsymmetricOnly,
  kChemInvalid,
  kNone,
};

inline constexpr FailureMode kAllFailureModes[] = {
  FailureMode::kNegativeAndAsymmetric, FailureMode::kNegativeOnly,
  FailureMode::kAsymmetricOnly, FailureMode::kChemInvalid, FailureMode::kNone
};

const char *to_string(FailureMode mode);

// Odd off-diagonal cells count as asymmetry damage.
FailureMode classify_failure(const IntMatrix &predicted,
                             const Reconstruction &reconstruction);

struct DecodedState {
  BEMatrix product;  // reactant atoms with the rounded entries
  Reconstruction reconstruction;
  FailureMode failure = FailureMode::kNone;
  FixStatus fix = FixStatus::kNotNeeded;

  bool valid() const { return failure == FailureMode::kNone; }
};

// Round, optionally fix, reconstruct and classify a continuous state.
DecodedState decode_state(const BEMatrix &reactant, const Eigen::MatrixXd &x,
                          RoundingMode mode, bool apply_fix,
                          const PeriodicTable &table
                          = PeriodicTable::standard());

}  // namespace beflow

#endif  // BEFLOW_POSTPROCESS_H_
