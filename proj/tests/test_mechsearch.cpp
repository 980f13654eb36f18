//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "beflow/mechsearch.h"
#include "beflow/smiles.h"

namespace {

using namespace beflow;

BEMatrix be_of(const std::string &smiles) {
  return build_be(parse_smiles(smiles));
}

// The same constant field for every reactant.
class ConstantField: public FieldModel {
public:
  explicit ConstantField(Eigen::MatrixXd u): u_(std::move(u)) { }

  VectorField field(const BEMatrix &) const override {
    Eigen::MatrixXd u = u_;
    return [u](double, const Eigen::MatrixXd &) { return u; };
  }

private:
  Eigen::MatrixXd u_;
};

/**
 * Two-branch field: when the noise on a watched cell exceeds a threshold the
 * flow heads to the first product, otherwise to the second. The watched
 * cell is unchanged by both deltas, so the branch choice is stable along
 * the integration.
 */
class BranchField: public FieldModel {
public:
  BranchField(const BEMatrix &reactant, Eigen::MatrixXd ua, Eigen::MatrixXd ub,
              int i, int j, double threshold)
      : base_(reactant.active().cast<double>()), ua_(std::move(ua)),
        ub_(std::move(ub)), i_(i), j_(j), threshold_(threshold) { }

  VectorField field(const BEMatrix &) const override {
    return [this](double, const Eigen::MatrixXd &x) {
      return x(i_, j_) - base_(i_, j_) > threshold_ ? ua_ : ub_;
    };
  }

private:
  Eigen::MatrixXd base_, ua_, ub_;
  int i_, j_;
  double threshold_;
};

// Field looked up from the reactant's canonical SMILES; identity otherwise.
class LookupField: public FieldModel {
public:
  void add(const std::string &mapped_reactant,
           const std::string &mapped_product) {
    BEMatrix r = be_of(mapped_reactant), p = be_of(mapped_product);
    REQUIRE(r.atoms == p.atoms);
    table_[state_smiles(r)] = (p.active() - r.active()).cast<double>();
  }

  VectorField field(const BEMatrix &reactant) const override {
    auto it = table_.find(state_smiles(reactant));
    Eigen::MatrixXd u = it == table_.end()
                            ? Eigen::MatrixXd::Zero(reactant.size(),
                                                    reactant.size())
                            : it->second;
    return [u](double, const Eigen::MatrixXd &) { return u; };
  }

private:
  std::map<std::string, Eigen::MatrixXd> table_;
};

/**
 * Sampler over a hand-written transition table keyed by canonical SMILES.
 * Each state lists (product SMILES, frequency) out of S samples; unlisted
 * states have no valid outcome.
 */
class StubSampler: public StepSampler {
public:
  explicit StubSampler(int samples): samples_(samples) { }

  void add(const std::string &from,
           std::vector<std::pair<std::string, int>> to) {
    table_[canonicalize(from)] = std::move(to);
  }

  StepSampling sample(const BEMatrix &state, int) const override {
    StepSampling s;
    s.samples = samples_;
    auto it = table_.find(state_smiles(state));
    int used = 0;
    if (it != table_.end())
      for (const auto &[product, freq]: it->second) {
        s.outcomes.push_back({ canonicalize(product), be_of(product), freq });
        used += freq;
      }
    s.invalid = samples_ - used;
    std::stable_sort(s.outcomes.begin(), s.outcomes.end(),
                     [](const StepOutcome &a, const StepOutcome &b) {
                       if (a.frequency != b.frequency)
                         return a.frequency > b.frequency;
                       return a.product < b.product;
                     });
    return s;
  }

private:
  int samples_;
  std::map<std::string, std::vector<std::pair<std::string, int>>> table_;
};

const char *kSn2R = "[CH3:1][Br:2].[OH-:3]";
const char *kSn2P = "[CH3:1][OH:3].[Br-:2]";

Eigen::MatrixXd sn2_delta() {
  return (be_of(kSn2P).active() - be_of(kSn2R).active()).cast<double>();
}

// Index of a hydrogen bonded to atom `heavy`.
int hydrogen_on(const BEMatrix &be, int heavy) {
  for (int j = 0; j < be.size(); ++j)
    if (be.atoms[j].atomic_number == 1 && be.entries(heavy, j) > 0)
      return j;
  return -1;
}

double normal_quantile(double p) {
  double lo = -10, hi = 10;
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

SampleConfig quiet_config(double sigma) {
  SampleConfig c;
  c.sigma = sigma;
  c.euler_steps = 10;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("deterministic field gives one outcome") {
  BEMatrix r = be_of(kSn2R);
  ConstantField f(sn2_delta());
  StepSampling s = sample_step(f, r, 3, quiet_config(0.0));
  REQUIRE(s.outcomes.size() == 1);
  CHECK(s.outcomes[0].frequency == 3);
  CHECK(s.outcomes[0].product == canonicalize(kSn2P));
  CHECK(s.outcomes[0].be.active() == be_of(kSn2P).active());
  CHECK(s.invalid == 0);
  CHECK(s.matrices.size() == 3);
  CHECK_THROWS_AS(sample_step(f, r, 0, quiet_config(0.0)),
                  std::invalid_argument);
}

TEST_CASE("zero field with noise returns the reactant") {
  BEMatrix r = be_of(kSn2R);
  ConstantField f(Eigen::MatrixXd::Zero(r.size(), r.size()));
  StepSampling s = sample_step(f, r, 20, quiet_config(0.15));
  REQUIRE(!s.outcomes.empty());
  CHECK(s.outcomes[0].product == canonicalize(kSn2R));
  int total = s.invalid;
  for (const StepOutcome &o: s.outcomes)
    total += o.frequency;
  CHECK(total == 20);
}

TEST_CASE("bimodal field matches its branching ratio") {
  BEMatrix r = be_of(kSn2R);
  const int n = r.size();
  const int c = 0, h = hydrogen_on(r, 0);
  REQUIRE(h >= 0);
  Eigen::MatrixXd ua = sn2_delta(), ub = Eigen::MatrixXd::Zero(n, n);
  REQUIRE(ua(c, h) == 0);

  // An off-diagonal noise cell is normal with variance
  // sigma^2 (1 - 2/n^2 - 1/n^3); place the threshold at its 70% quantile.
  const double sigma = 0.05, p = 0.3;
  const double sd = sigma * std::sqrt(1.0 - 2.0 / (n * n) - 1.0 / (n * n * n));
  const double threshold = sd * normal_quantile(1 - p);
  BranchField f(r, ua, ub, c, h, threshold);

  const int samples = 4000;
  StepSampling s = sample_step(f, r, samples, quiet_config(sigma));
  std::map<std::string, int> freq;
  for (const StepOutcome &o: s.outcomes)
    freq[o.product] = o.frequency;
  CHECK(s.invalid == 0);
  REQUIRE(s.outcomes.size() == 2);
  CHECK(s.outcomes[0].product == canonicalize(kSn2R));
  const double k = freq[canonicalize(kSn2P)];
  const double ci = 4 * std::sqrt(samples * p * (1 - p));
  CHECK(std::abs(k - samples * p) < ci);
}

TEST_CASE("sampling is independent of the thread count") {
  BEMatrix r = be_of(kSn2R);
  const int n = r.size(), h = hydrogen_on(r, 0);
  BranchField f(r, sn2_delta(), Eigen::MatrixXd::Zero(n, n), 0, h, 0.03);
  SampleConfig one = quiet_config(0.15), many = one;
  many.threads = 4;
  StepSampling a = sample_step(f, r, 300, one), b = sample_step(f, r, 300, many);
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    CHECK(a.outcomes[i].product == b.outcomes[i].product);
    CHECK(a.outcomes[i].frequency == b.outcomes[i].frequency);
  }
  CHECK(a.invalid == b.invalid);
  CHECK(a.failures == b.failures);
  REQUIRE(a.matrices.size() == b.matrices.size());
  for (std::size_t i = 0; i < a.matrices.size(); ++i)
    CHECK(a.matrices[i] == b.matrices[i]);

  SampleConfig reseeded = one;
  reseeded.seed = 6;
  StepSampling c = sample_step(f, r, 300, reseeded);
  CHECK(c.matrices != a.matrices);
}

TEST_CASE("frequencies and invalid counts partition the samples") {
  BEMatrix r = be_of(kSn2R);
  ConstantField f(sn2_delta());
  SampleConfig cfg = quiet_config(0.6);
  cfg.validity_fix = false;
  StepSampling s = sample_step(f, r, 200, cfg);
  int total = s.invalid, failures = 0;
  for (const StepOutcome &o: s.outcomes)
    total += o.frequency;
  for (auto [mode, count]: s.failures)
    failures += count;
  CHECK(total == 200);
  CHECK(failures == s.invalid);
  CHECK(s.invalid > 0);
}

TEST_CASE("rollout along a flow pathway conserves atoms and electrons") {
  LookupField f;
  f.add(kSn2R, kSn2P);
  FlowSampler sampler(f, quiet_config(0.1));
  BEMatrix root = be_of(kSn2R);
  Pathway p = rollout(sampler, root, 8, 5);
  REQUIRE(p.steps.size() == 2);
  CHECK(p.steps[0].product == canonicalize(kSn2P));
  CHECK(p.steps[1].product == canonicalize(kSn2P));
  CHECK(p.terminal);
  CHECK_FALSE(p.depth_exhausted);
  for (const PathwayStep &s: p.steps)
    CHECK(check_conservation(root, s.state).all());
}

TEST_CASE("stable input is terminal at depth one") {
  StubSampler stub(10);
  stub.add("CCO", { { "CCO", 9 } });
  Pathway p = rollout(stub, be_of("CCO"), 10, 5);
  REQUIRE(p.steps.size() == 1);
  CHECK(p.terminal);
  CHECK(p.score == doctest::Approx(std::log(0.9)));
}

TEST_CASE("three-step chain ends with the identity step") {
  StubSampler stub(10);
  stub.add("C", { { "CC", 8 }, { "O", 2 } });
  stub.add("CC", { { "CCC", 10 } });
  stub.add("CCC", { { "CCCC", 6 } });
  stub.add("CCCC", { { "CCCC", 10 } });
  Pathway p = rollout(stub, be_of("C"), 10, 9);
  CHECK(p.products()
        == std::vector<std::string> { canonicalize("CC"), canonicalize("CCC"),
                                      canonicalize("CCCC"),
                                      canonicalize("CCCC") });
  CHECK(p.terminal);
  CHECK(p.score == doctest::Approx(std::log(0.8) + std::log(0.6)));
  CHECK(p.steps[0].reactants == "C");
}

TEST_CASE("cyclic predictions stop at the depth limit") {
  StubSampler stub(4);
  stub.add("C", { { "CC", 4 } });
  stub.add("CC", { { "C", 3 } });
  Pathway p = rollout(stub, be_of("C"), 4, 5);
  CHECK(p.steps.size() == 5);
  CHECK(p.depth_exhausted);
  CHECK_FALSE(p.terminal);
  CHECK_THROWS_AS(rollout(stub, be_of("C"), 4, 0), std::invalid_argument);
}

TEST_CASE("a state with no valid outcome ends the chain") {
  StubSampler stub(4);
  stub.add("C", { { "CC", 4 } });
  Pathway p = rollout(stub, be_of("C"), 4, 5);
  CHECK(p.steps.size() == 1);
  CHECK_FALSE(p.terminal);
  CHECK_FALSE(p.depth_exhausted);
}

namespace {

StubSampler tree_stub() {
  // Root branches twice, each child branches twice, every leaf is stable.
  StubSampler stub(10);
  stub.add("C", { { "CC", 6 }, { "CO", 4 } });
  stub.add("CC", { { "CCC", 7 }, { "CCO", 3 } });
  stub.add("CO", { { "COC", 5 }, { "OCO", 5 } });
  stub.add("CCC", { { "CCC", 9 } });
  stub.add("CCO", { { "CCO", 10 } });
  stub.add("COC", { { "COC", 6 } });
  stub.add("OCO", { { "OCO", 8 } });
  return stub;
}

struct Enumerated {
  std::vector<std::string> products;
  double score;
};

// Every terminal pathway of the stub by depth-first enumeration.
void enumerate(const StubSampler &stub, const BEMatrix &state,
               const std::string &smiles, Enumerated current,
               std::vector<Enumerated> &out) {
  StepSampling s = stub.sample(state, 10);
  for (const StepOutcome &o: s.outcomes) {
    Enumerated next = current;
    next.products.push_back(o.product);
    next.score += std::log(o.frequency / 10.0);
    if (o.product == smiles)
      out.push_back(next);
    else
      enumerate(stub, o.be, o.product, next, out);
  }
}

}  // namespace

TEST_CASE("wide beam matches exhaustive enumeration") {
  StubSampler stub = tree_stub();
  std::vector<Enumerated> oracle;
  enumerate(stub, be_of("C"), "C", { {}, 0.0 }, oracle);
  REQUIRE(oracle.size() == 4);
  std::sort(oracle.begin(), oracle.end(),
            [](const Enumerated &a, const Enumerated &b) {
              if (a.score != b.score)
                return a.score > b.score;
              return a.products < b.products;
            });
  for (int width: { 4, 5, 8 }) {
    std::vector<Pathway> beam = beam_search(stub, be_of("C"), width, 3, 10);
    REQUIRE(beam.size() == oracle.size());
    for (std::size_t i = 0; i < beam.size(); ++i) {
      CHECK(beam[i].products() == oracle[i].products);
      CHECK(beam[i].score == doctest::Approx(oracle[i].score));
      CHECK(beam[i].terminal);
    }
  }
}

TEST_CASE("width-one beam equals rollout") {
  std::vector<StubSampler> stubs;
  stubs.push_back(tree_stub());
  StubSampler cycle(4);
  cycle.add("C", { { "CC", 4 } });
  cycle.add("CC", { { "C", 3 } });
  stubs.push_back(cycle);
  for (const StubSampler &stub: stubs) {
    Pathway r = rollout(stub, be_of("C"), 10, 6);
    std::vector<Pathway> b = beam_search(stub, be_of("C"), 1, 6, 10);
    REQUIRE(b.size() == 1);
    CHECK(b[0].products() == r.products());
    CHECK(b[0].terminal == r.terminal);
    CHECK(b[0].depth_exhausted == r.depth_exhausted);
    CHECK(b[0].score == doctest::Approx(r.score));
  }
}

TEST_CASE("width-two beam keeps both branches of a fork") {
  StubSampler stub(10);
  stub.add("CCBr", { { "CCO", 6 }, { "C=C", 4 } });
  stub.add("CCO", { { "CCO", 10 } });
  stub.add("C=C", { { "C=C", 10 } });
  std::vector<Pathway> b = beam_search(stub, be_of("CCBr"), 2, 9, 10);
  REQUIRE(b.size() == 2);
  CHECK(b[0].products().front() == canonicalize("CCO"));
  CHECK(b[1].products().front() == canonicalize("C=C"));
  CHECK(b[0].terminal);
  CHECK(b[1].terminal);
  CHECK(beam_search(stub, be_of("CCBr"), 1, 9, 10).size() == 1);
}

TEST_CASE("a wider beam can displace a narrow-beam pathway") {
  // Width 1 follows A (0.6) then a weak step (0.1); width 2 also opens B
  // (0.4) whose strong step (0.9) outscores the whole A branch.
  StubSampler stub(10);
  stub.add("C", { { "CC", 6 }, { "CO", 4 } });
  stub.add("CC", { { "CCC", 1 } });
  stub.add("CO", { { "COC", 9 } });
  stub.add("CCC", { { "CCC", 10 } });
  stub.add("COC", { { "COC", 10 } });
  auto narrow = beam_search(stub, be_of("C"), 1, 5, 10);
  auto wide = beam_search(stub, be_of("C"), 2, 5, 10);
  REQUIRE(narrow.size() == 1);
  CHECK(narrow[0].products().front() == canonicalize("CC"));
  CHECK(wide.front().products().front() == canonicalize("CO"));
}

TEST_CASE("beam arguments and output format") {
  StubSampler stub = tree_stub();
  CHECK_THROWS_AS(beam_search(stub, be_of("C"), 0, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(beam_search(stub, be_of("C"), 2, 0, 10), std::invalid_argument);

  std::vector<Pathway> b = beam_search(stub, be_of("C"), 2, 1, 10);
  for (const Pathway &p: b)
    CHECK(p.depth_exhausted);

  std::ostringstream score;
  score << std::log(0.6) + std::log(0.7) + std::log(0.9);
  std::ostringstream out;
  write_pathways(out, beam_search(stub, be_of("C"), 1, 3, 10));
  CHECK(out.str()
        == "pathway 1 score=" + score.str() + " terminal=1\nC>>CC (6/10)\nCC>>"
               + canonicalize("CCC") + " (7/10)\n" + canonicalize("CCC") + ">>"
               + canonicalize("CCC") + " (9/10)\n");
}

TEST_CASE("state hash and smiles") {
  BEMatrix a = be_of(kSn2R), b = be_of(kSn2P);
  CHECK(state_hash(a) == state_hash(be_of(kSn2R)));
  CHECK(state_hash(a) != state_hash(b));
  CHECK(state_smiles(a) == canonicalize(kSn2R));
  BEMatrix broken = a;
  broken.entries(0, 0) = -2;
  CHECK(state_smiles(broken).empty());
}
