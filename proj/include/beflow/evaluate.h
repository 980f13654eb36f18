//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_EVALUATE_H_
#define BEFLOW_EVALUATE_H_

#include <string>
#include <vector>

#include "beflow/dataio.h"
#include "beflow/mechsearch.h"
#include "beflow/metrics.h"
#include "beflow/train.h"

namespace beflow {

/**
 * Clean the records and encode every accepted step. Rejections are
 * appended to rejected when given.
 */
std::vector<PreparedStep>
prepare_accepted(const std::vector<StepRecord> &records,
                 const PeriodicTable &table = PeriodicTable::standard(),
                 std::vector<Rejection> *rejected = nullptr);

std::vector<TrainPair>
make_train_pairs(const std::vector<PreparedStep> &steps,
                 const PeriodicTable &table = PeriodicTable::standard());

struct ReferencePathway {
  std::string reaction_id;
  BEMatrix root;                      // reactants of the first step
  std::vector<std::string> products;  // canonical product of each step
};

// One reference per reaction id, in order of first appearance.
std::vector<ReferencePathway>
reference_pathways(const std::vector<PreparedStep> &steps);

struct EvalOptions {
  int samples = 16;
  std::vector<int> ks { 1, 2, 3, 5 };
  bool pathways = true;
  int depth = 9;  // beam depth for pathway recovery
};

struct StepPrediction {
  std::string reaction_id;
  int step_index = 0;
  std::string reference;
  StepSampling sampling;
};

/**
 * Sample every step and fill the report: validity and conservation over all
 * samples, top-k step accuracy, top-k pathway accuracy (beam widths 1..max
 * k) and the failure histogram. Per-step samplings go to predictions when
 * given.
 */
MetricsReport evaluate(const StepSampler &sampler,
                       const std::vector<PreparedStep> &steps,
                       const EvalOptions &options,
                       const PeriodicTable &table = PeriodicTable::standard(),
                       std::vector<StepPrediction> *predictions = nullptr);

// Top-1 step accuracy only; used as the training validator.
double top1_step_accuracy(const StepSampler &sampler,
                          const std::vector<PreparedStep> &steps, int samples);

}  // namespace beflow

#endif  // BEFLOW_EVALUATE_H_
