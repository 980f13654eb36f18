//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_METRICS_H_
#define BEFLOW_METRICS_H_

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "beflow/be_matrix.h"
#include "beflow/mechsearch.h"
#include "beflow/postprocess.h"

namespace beflow {

/**
 * Fraction of steps whose reference appears among the first k distinct
 * predictions, for each k. Predictions are deduplicated in order before
 * ranking. Throws std::invalid_argument when the two lists differ in
 * length.
 */
std::map<int, double>
step_accuracy(const std::vector<std::vector<std::string>> &ranked,
              const std::vector<std::string> &references,
              const std::vector<int> &ks);

/**
 * True when a terminal pathway reproduces the reference product sequence.
 * Repeated products at the end of either sequence (identity steps) are
 * collapsed to one before comparing.
 */
bool pathway_matches(const Pathway &pathway,
                     const std::vector<std::string> &reference);

/**
 * Smallest beam width in 1..max_width whose search returns a pathway
 * matching the reference; 0 when none does. search(width) runs the beam.
 */
int min_pathway_width(
    const std::function<std::vector<Pathway>(int width)> &search,
    const std::vector<std::string> &reference, int max_width);

// Rate at k = fraction of reactions with 0 < min width <= k.
std::map<int, double> pathway_accuracy(const std::vector<int> &min_widths,
                                       const std::vector<int> &ks);

struct ConservationRates {
  long count = 0;
  double validity = 0;
  double heavy_atoms = 0;
  double protons = 0;
  double electrons = 0;
  double cumulative = 0;  // all three together
};

/**
 * Conservation over predicted matrices. Every matrix is checked against its
 * reactant whether or not it reconstructs; validity counts the ones that
 * do. An empty matrix stands for a sample that could not be rounded and
 * counts as invalid and non-conserving.
 */
ConservationRates conservation_rates(const std::vector<BEMatrix> &reactants,
                                     const std::vector<BEMatrix> &predicted,
                                     const PeriodicTable &table
                                     = PeriodicTable::standard());

/**
 * Conservation over predicted SMILES (as a text model would emit them).
 * A prediction that fails to parse or encode is invalid and conserves
 * nothing. Hydrogens are counted after materializing implicit ones.
 */
ConservationRates
conservation_rates_smiles(const std::vector<BEMatrix> &reactants,
                          const std::vector<std::string> &predicted,
                          const PeriodicTable &table
                          = PeriodicTable::standard());

struct MetricsReport {
  ConservationRates conservation;
  std::map<int, double> topk_step;
  std::map<int, double> topk_pathway;
  std::map<FailureMode, long> failure_histogram;  // every mode but kNone
  long samples = 0;
  long invalid_samples = 0;
};

// Zero-filled histogram over the four failure bins.
std::map<FailureMode, long> empty_histogram();

void write_report_text(std::ostream &out, const MetricsReport &report);
// One "key=value" per line; keys are stable across runs.
void write_report_kv(std::ostream &out, const MetricsReport &report);

}  // namespace beflow

#endif  // BEFLOW_METRICS_H_
