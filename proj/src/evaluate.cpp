//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/evaluate.h"

#include <algorithm>

namespace beflow {

std::vector<PreparedStep>
prepare_accepted(const std::vector<StepRecord> &records,
                 const PeriodicTable &table,
                 std::vector<Rejection> *rejected) {
  CleanResult c = clean(records, table);
  if (rejected)
    rejected->insert(rejected->end(), c.rejected.begin(), c.rejected.end());
  std::vector<PreparedStep> out;
  out.reserve(c.accepted.size());
  for (const StepRecord &r: c.accepted)
    out.push_back(prepare_step(r, table));
  return out;
}

std::vector<TrainPair> make_train_pairs(const std::vector<PreparedStep> &steps,
                                        const PeriodicTable &table) {
  std::vector<TrainPair> out;
  out.reserve(steps.size());
  for (const PreparedStep &s: steps)
    out.push_back({ s.record.reaction_id + "/"
                        + std::to_string(s.record.step_index),
                    s.reactant, s.product, atom_features(s.reactant, table) });
  return out;
}

std::vector<ReferencePathway>
reference_pathways(const std::vector<PreparedStep> &steps) {
  std::vector<ReferencePathway> out;
  for (const PreparedStep &s: steps) {
    if (out.empty() || out.back().reaction_id != s.record.reaction_id)
      out.push_back({ s.record.reaction_id, s.reactant, {} });
    out.back().products.push_back(s.product_smiles);
  }
  return out;
}

MetricsReport evaluate(const StepSampler &sampler,
                       const std::vector<PreparedStep> &steps,
                       const EvalOptions &options, const PeriodicTable &table,
                       std::vector<StepPrediction> *predictions) {
  MetricsReport report;
  report.failure_histogram = empty_histogram();

  std::vector<BEMatrix> reactants, predicted;
  std::vector<std::vector<std::string>> ranked;
  std::vector<std::string> references;
  for (const PreparedStep &s: steps) {
    StepSampling sampling = sampler.sample(s.reactant, options.samples);
    report.samples += sampling.samples;
    report.invalid_samples += sampling.invalid;
    for (auto [mode, n]: sampling.failures)
      report.failure_histogram[mode] += n;
    for (const BEMatrix &m: sampling.matrices) {
      reactants.push_back(s.reactant);
      predicted.push_back(m);
    }
    std::vector<std::string> r;
    for (const StepOutcome &o: sampling.outcomes)
      r.push_back(o.product);
    ranked.push_back(std::move(r));
    references.push_back(s.product_smiles);
    if (predictions)
      predictions->push_back({ s.record.reaction_id, s.record.step_index,
                               s.product_smiles, std::move(sampling) });
  }
  report.conservation = conservation_rates(reactants, predicted, table);
  report.topk_step = step_accuracy(ranked, references, options.ks);

  if (options.pathways && !options.ks.empty()) {
    const int max_k = *std::max_element(options.ks.begin(), options.ks.end());
    std::vector<int> widths;
    for (const ReferencePathway &ref: reference_pathways(steps)) {
      auto search = [&](int width) {
        return beam_search(sampler, ref.root, width, options.depth,
                           options.samples, table);
      };
      widths.push_back(min_pathway_width(search, ref.products, max_k));
    }
    report.topk_pathway = pathway_accuracy(widths, options.ks);
  }
  return report;
}

double top1_step_accuracy(const StepSampler &sampler,
                          const std::vector<PreparedStep> &steps,
                          int samples) {
  if (steps.empty())
    return 0;
  long hit = 0;
  for (const PreparedStep &s: steps) {
    StepSampling sampling = sampler.sample(s.reactant, samples);
    hit += !sampling.outcomes.empty()
           && sampling.outcomes.front().product == s.product_smiles;
  }
  return static_cast<double>(hit) / static_cast<double>(steps.size());
}

}  // namespace beflow
