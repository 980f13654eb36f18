//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "beflow/evaluate.h"
#include "beflow/smiles.h"

namespace {

using namespace beflow;

BEMatrix be_of(const std::string &smiles) {
  return build_be(parse_smiles(smiles));
}

Pathway make_pathway(std::vector<std::string> products, bool terminal) {
  Pathway p;
  for (auto &s: products)
    p.steps.push_back({ "", s, BEMatrix(), 1, 1 });
  p.terminal = terminal;
  return p;
}

// Element counts, charge and bond-order sum read off the parsed graph.
struct Composition {
  std::map<std::string, int> heavy;
  int hydrogens = 0;
  int charge = 0;
  int bond_orders = 0;  // hydrogen counts are single bonds
};

Composition composition(const MolGraph &g) {
  Composition c;
  for (int i = 0; i < g.num_atoms(); ++i) {
    const Atom &a = g.atom(i);
    if (a.atomic_number == 1)
      ++c.hydrogens;
    else
      ++c.heavy[PeriodicTable::standard().at(a.atomic_number).symbol];
    c.hydrogens += a.hydrogens;
    c.bond_orders += a.hydrogens;
    c.charge += a.formal_charge;
  }
  for (const Bond &b: g.bonds())
    c.bond_orders += static_cast<int>(b.order);
  return c;
}

// Answers every known reactant state with its recorded product.
class ReferenceSampler: public StepSampler {
public:
  explicit ReferenceSampler(const std::vector<PreparedStep> &steps) {
    for (const PreparedStep &s: steps)
      table_.emplace(state_smiles(s.reactant), s.product);
  }

  StepSampling sample(const BEMatrix &state, int samples) const override {
    StepSampling out;
    out.samples = samples;
    auto it = table_.find(state_smiles(state));
    if (it == table_.end()) {
      out.invalid = samples;
      out.failures[FailureMode::kChemInvalid] = samples;
      out.matrices.assign(samples, BEMatrix());
      return out;
    }
    out.outcomes.push_back({ state_smiles(it->second), it->second, samples });
    out.matrices.assign(samples, it->second);
    return out;
  }

private:
  std::map<std::string, BEMatrix> table_;
};

}  // namespace

TEST_CASE("step accuracy edge cases") {
  std::vector<std::string> refs { "A", "B", "C" };
  auto first = step_accuracy({ { "A", "x" }, { "B" }, { "C", "A" } }, refs,
                             { 1, 2, 3 });
  CHECK(first == std::map<int, double> { { 1, 1.0 }, { 2, 1.0 }, { 3, 1.0 } });

  auto second = step_accuracy({ { "x", "A" }, { "y", "B" }, { "z", "C" } },
                              refs, { 1, 2 });
  CHECK(second[1] == 0.0);
  CHECK(second[2] == 1.0);

  // Repeats collapse before ranking.
  auto dup = step_accuracy({ { "x", "x", "x", "A" } }, { "A" }, { 1, 2 });
  CHECK(dup[2] == 1.0);

  CHECK(step_accuracy({}, {}, { 1 })[1] == 0.0);
  CHECK_THROWS_AS(step_accuracy({ { "A" } }, {}, { 1 }), std::invalid_argument);
}

TEST_CASE("step accuracy matches a counting oracle") {
  std::mt19937 rng(17);
  const std::vector<int> ks { 1, 2, 3, 5, 8 };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::string>> ranked;
    std::vector<std::string> refs;
    std::vector<int> position;  // 1-based rank of the reference, 0 absent
    const int steps = 1 + static_cast<int>(rng() % 30);
    for (int s = 0; s < steps; ++s) {
      const int len = static_cast<int>(rng() % 7);
      std::vector<std::string> r;
      for (int i = 0; i < len; ++i)
        r.push_back("p" + std::to_string(i));
      int pos = len == 0 || rng() % 4 == 0 ? 0 : 1 + static_cast<int>(rng() % len);
      if (pos > 0)
        r[pos - 1] = "ref";
      ranked.push_back(r);
      refs.push_back("ref");
      position.push_back(pos);
    }
    auto got = step_accuracy(ranked, refs, ks);
    double prev = 0;
    for (int k: ks) {
      int hits = 0;
      for (int p: position)
        hits += p > 0 && p <= k;
      CHECK(got[k] == doctest::Approx(static_cast<double>(hits) / steps));
      CHECK(got[k] >= prev);
      prev = got[k];
    }
  }
}

TEST_CASE("pathway matching and minimal width") {
  Pathway p = make_pathway({ "B", "C", "C" }, true);
  CHECK(pathway_matches(p, { "B", "C" }));
  CHECK(pathway_matches(p, { "B", "C", "C", "C" }));
  CHECK_FALSE(pathway_matches(p, { "B" }));
  CHECK_FALSE(pathway_matches(make_pathway({ "B", "C" }, false), { "B", "C" }));

  auto search = [](int width) {
    std::vector<Pathway> out { make_pathway({ "X", "X" }, true) };
    if (width >= 2)
      out.push_back(make_pathway({ "B", "C", "C" }, true));
    return out;
  };
  CHECK(min_pathway_width(search, { "X" }, 5) == 1);
  CHECK(min_pathway_width(search, { "B", "C" }, 5) == 2);
  CHECK(min_pathway_width(search, { "B", "C" }, 1) == 0);
  CHECK(min_pathway_width(search, { "Q" }, 5) == 0);

  auto rates = pathway_accuracy({ 1, 2, 0, 2 }, { 1, 2, 3 });
  CHECK(rates[1] == 0.25);
  CHECK(rates[2] == 0.75);
  CHECK(rates[3] == 0.75);
}

TEST_CASE("conservation over matrices") {
  BEMatrix r = be_of("[CH3:1][Br:2].[OH-:3]");
  BEMatrix good = be_of("[CH3:1][OH:3].[Br-:2]");
  BEMatrix broken = good;
  broken.entries(0, 0) = -2;
  broken.entries(1, 1) += 2;
  BEMatrix lost = r;  // drop the hydroxide hydrogen's electrons
  lost.entries(2, 2) = 4;

  auto rates = conservation_rates({ r, r, r, r }, { good, broken, lost, BEMatrix() });
  CHECK(rates.count == 4);
  CHECK(rates.validity == 0.25);
  CHECK(rates.heavy_atoms == 0.75);
  CHECK(rates.protons == 0.75);
  CHECK(rates.electrons == 0.5);
  CHECK(rates.cumulative == 0.5);
}

TEST_CASE("conservation over text predictions") {
  BEMatrix r = be_of("[CH3:1][Br:2].[OH-:3]");
  auto rates = conservation_rates_smiles(
      { r, r, r, r }, { "CO.[Br-]", "CO", "C[OH2+].[Br-]", "C(" });
  CHECK(rates.validity == 0.75);
  CHECK(rates.heavy_atoms == 0.5);   // "CO" lost the bromine
  CHECK(rates.protons == 0.5);       // the oxonium gained one
  CHECK(rates.electrons == 0.25);
  CHECK(rates.cumulative == 0.25);
}

TEST_CASE("text conservation agrees with a formula oracle on a fuzzed corpus") {
  const char *pool[] = { "CCO", "CC(=O)[O-]", "[NH4+]", "O", "[OH-]", "C=C",
                         "CBr", "[Br-]", "C[O-]", "C=O", "CC#N", "Cl" };
  std::mt19937 rng(23);
  std::vector<BEMatrix> reactants;
  std::vector<std::string> predicted;
  std::vector<Composition> want, got;
  for (int k = 0; k < 200; ++k) {
    std::string a = pool[rng() % 12], b = pool[rng() % 12];
    std::string c = pool[rng() % 12], d = pool[rng() % 12];
    std::string rs = a + "." + b;
    std::string ps = rng() % 3 == 0 ? c + "." + d : b + "." + a;
    reactants.push_back(be_of(rs));
    predicted.push_back(ps);
    want.push_back(composition(parse_smiles(rs)));
    got.push_back(composition(parse_smiles(ps)));
  }
  auto rates = conservation_rates_smiles(reactants, predicted);
  double heavy = 0, protons = 0, electrons = 0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    heavy += want[i].heavy == got[i].heavy;
    protons += want[i].hydrogens == got[i].hydrogens;
    // Matrix total: valence electrons minus charge plus two per bond order.
    auto electrons_of = [](const Composition &c) {
      long e = c.hydrogens - c.charge + 2L * c.bond_orders;
      for (auto &[sym, n]: c.heavy)
        e += static_cast<long>(n)
             * PeriodicTable::standard().find(sym)->valence_electrons;
      return e;
    };
    electrons += electrons_of(want[i]) == electrons_of(got[i]);
  }
  CHECK(rates.validity == 1.0);
  CHECK(rates.heavy_atoms == doctest::Approx(heavy / 200));
  CHECK(rates.protons == doctest::Approx(protons / 200));
  CHECK(rates.electrons == doctest::Approx(electrons / 200));
}

TEST_CASE("perfect sampler scores full marks") {
  CorpusLoad load = load_corpus(std::string(BEFLOW_DATA_DIR) + "/toy_corpus.tsv");
  std::vector<StepRecord> chosen;
  for (const StepRecord &r: load.records)
    if (r.tag != "branch" && chosen.size() < 40)
      chosen.push_back(r);
  // Keep whole reactions only.
  while (!chosen.empty() && chosen.back().tag != "E")
    chosen.pop_back();
  std::vector<PreparedStep> steps = prepare_accepted(chosen);
  REQUIRE(steps.size() == chosen.size());
  ReferenceSampler sampler(steps);

  EvalOptions opt;
  opt.samples = 4;
  opt.depth = 9;
  std::vector<StepPrediction> predictions;
  MetricsReport report = evaluate(sampler, steps, opt, PeriodicTable::standard(),
                                  &predictions);
  CHECK(predictions.size() == steps.size());
  CHECK(report.topk_step[1] == 1.0);
  CHECK(report.topk_pathway[1] == 1.0);
  CHECK(report.conservation.validity == 1.0);
  CHECK(report.conservation.heavy_atoms == 1.0);
  CHECK(report.conservation.protons == 1.0);
  CHECK(report.conservation.electrons == 1.0);
  CHECK(report.conservation.cumulative == 1.0);
  CHECK(report.invalid_samples == 0);
  long histogram = 0;
  for (auto [mode, n]: report.failure_histogram)
    histogram += n;
  CHECK(histogram == report.invalid_samples);
  CHECK(top1_step_accuracy(sampler, steps, 4) == 1.0);

  std::ostringstream a, b;
  write_report_kv(a, report);
  write_report_kv(b, evaluate(sampler, steps, opt));
  CHECK(a.str() == b.str());
  for (const char *key: { "validity_rate=", "heavy_atom_rate=", "proton_rate=",
                          "electron_rate=", "cumulative_conservation_rate=",
                          "topk_step.1=", "topk_pathway.5=",
                          "failure.negative_and_asymmetric=",
                          "failure.negative_only=", "failure.asymmetric_only=",
                          "failure.chem_invalid=" })
    CHECK_MESSAGE(a.str().find(key) != std::string::npos, key);

  std::ostringstream text;
  write_report_text(text, report);
  CHECK(!text.str().empty());
}

TEST_CASE("unknown states count as invalid") {
  std::vector<PreparedStep> steps = prepare_accepted(
      { StepRecord { "x", 1, "[CH3:1][Br:2].[OH-:3]>>[CH3:1][OH:3].[Br-:2]", "t", 0 } });
  ReferenceSampler empty({});
  EvalOptions opt;
  opt.samples = 3;
  opt.pathways = false;
  MetricsReport report = evaluate(empty, steps, opt);
  CHECK(report.invalid_samples == 3);
  CHECK(report.failure_histogram[FailureMode::kChemInvalid] == 3);
  CHECK(report.conservation.validity == 0.0);
  CHECK(report.topk_step[1] == 0.0);
  CHECK(report.topk_pathway.empty());
}
