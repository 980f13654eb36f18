//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_MECHSEARCH_H_
#define BEFLOW_MECHSEARCH_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "beflow/be_matrix.h"
#include "beflow/flow.h"
#include "beflow/model.h"
#include "beflow/postprocess.h"

namespace beflow {

// Supplies the vector field to integrate from a given reactant state.
class FieldModel {
public:
  virtual ~FieldModel() = default;
  virtual VectorField field(const BEMatrix &reactant) const = 0;
};

class NetworkField: public FieldModel {
public:
  NetworkField(const VectorFieldModel &model,
               const PeriodicTable &table = PeriodicTable::standard())
      : model_(model), table_(table) { }

  VectorField field(const BEMatrix &reactant) const override;

private:
  const VectorFieldModel &model_;
  const PeriodicTable &table_;
};

struct SampleConfig {
  double sigma = 0.15;
  int euler_steps = 10;
  RoundingMode rounding = RoundingMode::kSymmetricSafe;
  bool validity_fix = true;
  int threads = 1;
  std::uint64_t seed = 0;
};

struct StepOutcome {
  std::string product;  // canonical SMILES, maps stripped
  BEMatrix be;          // matrix of the lowest-index sample giving product
  int frequency = 0;
};

struct StepSampling {
  int samples = 0;
  std::vector<StepOutcome> outcomes;  // frequency desc, then product asc
  int invalid = 0;
  std::map<FailureMode, int> failures;
  // Rounded matrix of every sample in index order; empty when rounding
  // could not meet the electron total.
  std::vector<BEMatrix> matrices;
};

// Stable hash of atoms and active entries.
std::uint64_t state_hash(const BEMatrix &be);

// Canonical SMILES of a valid state; empty when it does not reconstruct.
std::string state_smiles(const BEMatrix &be,
                         const PeriodicTable &table = PeriodicTable::standard());

/**
 * S noised Euler integrations from the reactant, each decoded, grouped by
 * canonical product and ranked. Sample k draws its noise from a stream keyed
 * by (seed, state_hash(reactant), k), so results do not depend on the
 * thread count.
 */
StepSampling sample_step(const FieldModel &model, const BEMatrix &reactant,
                         int samples, const SampleConfig &config,
                         const PeriodicTable &table
                         = PeriodicTable::standard());

// Anything that proposes ranked next states (the flow sampler, or a stub).
class StepSampler {
public:
  virtual ~StepSampler() = default;
  virtual StepSampling sample(const BEMatrix &state, int samples) const = 0;
};

class FlowSampler: public StepSampler {
public:
  FlowSampler(const FieldModel &model, SampleConfig config,
              const PeriodicTable &table = PeriodicTable::standard())
      : model_(model), config_(config), table_(table) { }

  StepSampling sample(const BEMatrix &state, int samples) const override {
    return sample_step(model_, state, samples, config_, table_);
  }

private:
  const FieldModel &model_;
  SampleConfig config_;
  const PeriodicTable &table_;
};

struct PathwayStep {
  std::string reactants;
  std::string product;
  BEMatrix state;  // after the step
  int frequency = 0;
  int samples = 0;
};

struct Pathway {
  std::string root;
  BEMatrix root_state;
  std::vector<PathwayStep> steps;
  double score = 0;  // sum of log(frequency / samples)
  bool terminal = false;
  bool depth_exhausted = false;

  const BEMatrix &last_state() const {
    return steps.empty() ? root_state : steps.back().state;
  }
  const std::string &last_smiles() const {
    return steps.empty() ? root : steps.back().product;
  }
  // Step products in order.
  std::vector<std::string> products() const;
};

/**
 * Follow the top outcome until it reproduces its input (a terminal identity
 * step, which is recorded) or max_depth steps have been taken. A state with
 * no valid outcome ends the chain unflagged.
 */
Pathway rollout(const StepSampler &sampler, const BEMatrix &reactants,
                int samples, int max_depth,
                const PeriodicTable &table = PeriodicTable::standard());

/**
 * Level-synchronous beam. Every live pathway is expanded by its top `width`
 * outcomes; all children of a level are ranked by score (ties by product
 * sequence) and the best `width` kept. Kept children whose step reproduced
 * its input are terminal and retire to the result. Pathways still live at
 * the depth limit are returned with depth_exhausted set. The result is
 * ranked by score, best first.
 */
std::vector<Pathway> beam_search(const StepSampler &sampler,
                                 const BEMatrix &reactants, int width,
                                 int depth, int samples,
                                 const PeriodicTable &table
                                 = PeriodicTable::standard());

// Ranked text records: "pathway <rank> score=<s> terminal=<0|1>" then one
// "reactants>>product (f/S)" line per step.
void write_pathways(std::ostream &out, const std::vector<Pathway> &pathways);

}  // namespace beflow

#endif  // BEFLOW_MECHSEARCH_H_
