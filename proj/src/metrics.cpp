//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/metrics.h"

#include <algorithm>
#include <iomanip>
#include <set>

#include "beflow/smiles.h"

namespace beflow {

std::map<int, double>
step_accuracy(const std::vector<std::vector<std::string>> &ranked,
              const std::vector<std::string> &references,
              const std::vector<int> &ks) {
  if (ranked.size() != references.size())
    throw std::invalid_argument("prediction and reference counts differ");
  std::map<int, double> out;
  for (int k: ks)
    out[k] = 0;
  if (references.empty())
    return out;
  for (std::size_t s = 0; s < ranked.size(); ++s) {
    std::vector<std::string> unique;
    for (const std::string &p: ranked[s])
      if (std::find(unique.begin(), unique.end(), p) == unique.end())
        unique.push_back(p);
    auto it = std::find(unique.begin(), unique.end(), references[s]);
    if (it == unique.end())
      continue;
    const int rank = static_cast<int>(it - unique.begin()) + 1;
    for (int k: ks)
      if (rank <= k)
        out[k] += 1;
  }
  for (auto &[k, v]: out)
    v /= static_cast<double>(references.size());
  return out;
}

namespace {

std::vector<std::string> collapse_tail(std::vector<std::string> seq) {
  while (seq.size() >= 2 && seq[seq.size() - 1] == seq[seq.size() - 2])
    seq.pop_back();
  return seq;
}

}  // namespace

bool pathway_matches(const Pathway &pathway,
                     const std::vector<std::string> &reference) {
  if (!pathway.terminal)
    return false;
  return collapse_tail(pathway.products()) == collapse_tail(reference);
}

int min_pathway_width(
    const std::function<std::vector<Pathway>(int width)> &search,
    const std::vector<std::string> &reference, int max_width) {
  for (int w = 1; w <= max_width; ++w) {
    auto results = search(w);
    for (const Pathway &p: results)
      if (pathway_matches(p, reference))
        return w;
  }
  return 0;
}

std::map<int, double> pathway_accuracy(const std::vector<int> &min_widths,
                                       const std::vector<int> &ks) {
  std::map<int, double> out;
  for (int k: ks) {
    long hit = std::count_if(min_widths.begin(), min_widths.end(),
                             [k](int w) { return w > 0 && w <= k; });
    out[k] = min_widths.empty()
                 ? 0.0
                 : static_cast<double>(hit)
                       / static_cast<double>(min_widths.size());
  }
  return out;
}

namespace {

struct Tally {
  long count = 0, valid = 0, heavy = 0, protons = 0, electrons = 0, all = 0;

  void add(bool is_valid, const ConservationReport *r) {
    ++count;
    valid += is_valid;
    if (!r)
      return;
    heavy += r->heavy_atoms;
    protons += r->protons;
    electrons += r->electrons;
    all += r->all();
  }

  ConservationRates rates() const {
    ConservationRates c;
    c.count = count;
    if (count == 0)
      return c;
    const double n = static_cast<double>(count);
    c.validity = valid / n;
    c.heavy_atoms = heavy / n;
    c.protons = protons / n;
    c.electrons = electrons / n;
    c.cumulative = all / n;
    return c;
  }
};

}  // namespace

ConservationRates conservation_rates(const std::vector<BEMatrix> &reactants,
                                     const std::vector<BEMatrix> &predicted,
                                     const PeriodicTable &table) {
  if (reactants.size() != predicted.size())
    throw std::invalid_argument("prediction and reactant counts differ");
  Tally t;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i].size() == 0 && reactants[i].size() > 0) {
      t.add(false, nullptr);
      continue;
    }
    ConservationReport r = check_conservation(reactants[i], predicted[i]);
    t.add(reconstruct(predicted[i], table).ok(), &r);
  }
  return t.rates();
}

ConservationRates
conservation_rates_smiles(const std::vector<BEMatrix> &reactants,
                          const std::vector<std::string> &predicted,
                          const PeriodicTable &table) {
  if (reactants.size() != predicted.size())
    throw std::invalid_argument("prediction and reactant counts differ");
  Tally t;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    BEMatrix be;
    try {
      be = build_be(parse_smiles(predicted[i], table), 0, table);
    } catch (const std::exception &) {
      t.add(false, nullptr);
      continue;
    }
    ConservationReport r = check_conservation(reactants[i], be);
    t.add(true, &r);
  }
  return t.rates();
}

std::map<FailureMode, long> empty_histogram() {
  std::map<FailureMode, long> h;
  for (FailureMode m: kAllFailureModes)
    if (m != FailureMode::kNone)
      h[m] = 0;
  return h;
}

void write_report_text(std::ostream &out, const MetricsReport &r) {
  const auto &c = r.conservation;
  out << std::fixed << std::setprecision(4);
  out << "predictions:               " << c.count << '\n'
      << "validity:                  " << c.validity << '\n'
      << "heavy-atom conservation:   " << c.heavy_atoms << '\n'
      << "proton conservation:       " << c.protons << '\n'
      << "electron conservation:     " << c.electrons << '\n'
      << "all three conserved:       " << c.cumulative << '\n';
  for (auto [k, v]: r.topk_step)
    out << "top-" << k << " step accuracy:     " << v << '\n';
  for (auto [k, v]: r.topk_pathway)
    out << "top-" << k << " pathway accuracy:  " << v << '\n';
  out << "samples: " << r.samples << ", invalid: " << r.invalid_samples
      << '\n';
  out << "failure modes:\n";
  for (auto [mode, n]: r.failure_histogram)
    out << "  " << std::setw(24) << std::left << to_string(mode) << n << '\n';
  out << std::right;
}

void write_report_kv(std::ostream &out, const MetricsReport &r) {
  const auto &c = r.conservation;
  out << std::setprecision(6);
  out << "predictions=" << c.count << '\n'
      << "validity_rate=" << c.validity << '\n'
      << "heavy_atom_rate=" << c.heavy_atoms << '\n'
      << "proton_rate=" << c.protons << '\n'
      << "electron_rate=" << c.electrons << '\n'
      << "cumulative_conservation_rate=" << c.cumulative << '\n';
  for (auto [k, v]: r.topk_step)
    out << "topk_step." << k << '=' << v << '\n';
  for (auto [k, v]: r.topk_pathway)
    out << "topk_pathway." << k << '=' << v << '\n';
  out << "samples=" << r.samples << '\n'
      << "invalid_samples=" << r.invalid_samples << '\n';
  for (auto [mode, n]: r.failure_histogram)
    out << "failure." << to_string(mode) << '=' << n << '\n';
}

}  // namespace beflow
