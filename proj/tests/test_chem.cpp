//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "beflow/aromaticity.h"
#include "beflow/mol.h"
#include "beflow/periodic_table.h"
#include "beflow/smiles.h"

namespace {

using namespace beflow;

int count_aromatic_atoms(const MolGraph &m) {
  int n = 0;
  for (const Atom &a: m.atoms())
    n += a.aromatic ? 1 : 0;
  return n;
}

int count_bonds(const MolGraph &m, BondOrder order) {
  int n = 0;
  for (const Bond &b: m.bonds())
    n += b.order == order ? 1 : 0;
  return n;
}

// Every subset of candidate bonds that gives each listed atom exactly one
// double bond.
std::vector<std::set<int>> brute_force_matchings(const MolGraph &m,
                                                 const std::vector<int> &pi) {
  std::vector<int> cand;
  for (int b = 0; b < m.num_bonds(); ++b) {
    const Bond &bd = m.bond(b);
    if (std::count(pi.begin(), pi.end(), bd.src)
        && std::count(pi.begin(), pi.end(), bd.dst))
      cand.push_back(b);
  }
  std::vector<std::set<int>> out;
  for (unsigned mask = 0; mask < (1u << cand.size()); ++mask) {
    std::vector<int> deg(m.num_atoms(), 0);
    std::set<int> chosen;
    for (std::size_t k = 0; k < cand.size(); ++k)
      if (mask & (1u << k)) {
        chosen.insert(cand[k]);
        ++deg[m.bond(cand[k]).src];
        ++deg[m.bond(cand[k]).dst];
      }
    bool ok = true;
    for (int a: pi)
      ok = ok && deg[a] == 1;
    if (ok)
      out.push_back(chosen);
  }
  return out;
}

}  // namespace

TEST_CASE("standard table covers the shipped element set") {
  const PeriodicTable &t = PeriodicTable::standard();
  for (const char *s: { "H", "B", "C", "N", "O", "F", "Na", "Mg", "Si", "P",
                        "S", "Cl", "K", "Zn", "Br", "Pd", "Ag", "I", "Li" })
    CHECK_MESSAGE(t.find(s) != nullptr, s);
  CHECK(t.find("Xe") == nullptr);
  CHECK(t.at(8).valence_electrons == 6);
  CHECK(t.index_of(1) != t.index_of(6));
}

TEST_CASE("isoelectronic valence rule") {
  const PeriodicTable &t = PeriodicTable::standard();
  auto v = [&](const char *s, int q) {
    return t.allowed_valences(*t.find(s), q);
  };
  CHECK(v("O", 1) == std::vector<int> { 3 });
  CHECK(v("O", -1) == std::vector<int> { 1 });
  CHECK(v("N", 1) == std::vector<int> { 4 });
  CHECK(v("C", -1) == std::vector<int> { 3 });
  CHECK(v("H", 1) == std::vector<int> { 0 });
  CHECK(v("H", -1) == std::vector<int> { 0 });
  auto s = v("S", 0);
  CHECK(std::count(s.begin(), s.end(), 6) == 1);
}

TEST_CASE("element table file parses like the built-in one") {
  std::ifstream in(std::string(BEFLOW_DATA_DIR) + "/elements.tsv");
  REQUIRE(in.good());
  PeriodicTable t = PeriodicTable::load(std::string(BEFLOW_DATA_DIR)
                                        + "/elements.tsv");
  const PeriodicTable &s = PeriodicTable::standard();
  REQUIRE(t.size() == s.size());
  for (int i = 0; i < t.size(); ++i) {
    CHECK(t.elements()[i].symbol == s.elements()[i].symbol);
    CHECK(t.elements()[i].valence_electrons
          == s.elements()[i].valence_electrons);
    CHECK(t.elements()[i].allowed_valences
          == s.elements()[i].allowed_valences);
  }
  CHECK_THROWS(PeriodicTable::parse("X\t1\n"));
}

TEST_CASE("parse organic subset atoms") {
  MolGraph w = parse_smiles("O");
  REQUIRE(w.num_atoms() == 1);
  CHECK(w.atom(0).atomic_number == 8);
  CHECK(w.atom(0).hydrogens == 2);
  CHECK(w.atom(0).formal_charge == 0);

  MolGraph h3o = parse_smiles("[OH3+]");
  REQUIRE(h3o.num_atoms() == 1);
  CHECK(h3o.atom(0).hydrogens == 3);
  CHECK(h3o.atom(0).formal_charge == 1);
  CHECK(h3o.atom(0).bracket);

  MolGraph acid = parse_smiles("CC(=O)O");
  CHECK(acid.num_atoms() == 4);
  CHECK(acid.atom(0).hydrogens == 3);
  CHECK(acid.atom(1).hydrogens == 0);
  CHECK(acid.atom(3).hydrogens == 1);
  CHECK(count_bonds(acid, BondOrder::kDouble) == 1);
}

TEST_CASE("parse bracket grammar") {
  MolGraph m = parse_smiles("[13CH3:7][O-]");
  CHECK(m.atom(0).isotope == 13);
  CHECK(m.atom(0).atom_map == 7);
  CHECK(m.atom(0).hydrogens == 3);
  CHECK(m.atom(1).formal_charge == -1);
  CHECK(m.atom(1).hydrogens == 0);
  CHECK(parse_smiles("[Fe+++]", PeriodicTable::parse(
                                    "Fe\t26\t8\t2,3\t0\tmetal\n"))
            .atom(0)
            .formal_charge
        == 3);
  CHECK(parse_smiles("[NH4+]").atom(0).formal_charge == 1);
  CHECK(parse_smiles("[O--]").atom(0).formal_charge == -2);
}

TEST_CASE("parse rings, branches and disconnected parts") {
  MolGraph m = parse_smiles("C1CC1.[Na+].[Cl-]");
  CHECK(m.num_atoms() == 5);
  CHECK(m.num_bonds() == 3);
  CHECK(m.num_components() == 3);
  MolGraph big = parse_smiles("C%10CCCC%10");
  CHECK(big.num_bonds() == 5);
}

TEST_CASE("stereo tokens are dropped with a warning") {
  std::vector<std::string> warnings;
  MolGraph m = parse_smiles("C/C=C/[C@@H](F)Cl", PeriodicTable::standard(),
                            &warnings);
  CHECK(!warnings.empty());
  CHECK(m.num_atoms() == 6);
  CHECK(canonicalize("C/C=C/[C@@H](F)Cl") == canonicalize("CC=CC(F)Cl"));
}

TEST_CASE("parse errors report an offset") {
  auto offset_of = [](const char *s) -> long {
    try {
      parse_smiles(s);
    } catch (const SmilesError &e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("C1CC") >= 0);
  CHECK(offset_of("CC(C") >= 0);
  CHECK(offset_of("C[Xx]") == 2);
  CHECK(offset_of("CQ") == 1);
  CHECK(offset_of("C)") == 1);
  CHECK(parse_smiles("").num_atoms() == 0);
}

TEST_CASE("naphthalene perception") {
  MolGraph m = parse_smiles("c1ccc2ccccc2c1");
  CHECK(m.num_atoms() == 10);
  CHECK(count_aromatic_atoms(m) == 10);
  CHECK(count_bonds(m, BondOrder::kAromatic) == 11);
  auto cycles = smallest_cycles(m);
  REQUIRE(cycles.size() == 2);
  int shared = 0;
  for (int a = 0; a < m.num_atoms(); ++a) {
    int in = 0;
    for (const auto &c: cycles)
      in += std::count(c.begin(), c.end(), a) ? 1 : 0;
    shared += in == 2 ? 1 : 0;
  }
  CHECK(shared == 2);
}

TEST_CASE("kekulize benzene alternates") {
  MolGraph k = kekulize(parse_smiles("c1ccccc1"));
  CHECK(count_bonds(k, BondOrder::kDouble) == 3);
  CHECK(count_bonds(k, BondOrder::kSingle) == 3);
  for (int a = 0; a < 6; ++a) {
    int doubles = 0;
    for (int b: k.incident(a))
      doubles += k.bond(b).order == BondOrder::kDouble ? 1 : 0;
    CHECK(doubles == 1);
    CHECK(!k.atom(a).aromatic);
  }
}

TEST_CASE("kekulize naphthalene gives integer orders at fusion atoms") {
  MolGraph k = kekulize(parse_smiles("c1ccc2ccccc2c1"));
  CHECK(!k.has_aromatic_bonds());
  CHECK(count_bonds(k, BondOrder::kDouble) == 5);
  for (int a = 0; a < k.num_atoms(); ++a) {
    int doubles = 0;
    for (int b: k.incident(a))
      doubles += k.bond(b).order == BondOrder::kDouble ? 1 : 0;
    CHECK(doubles == 1);
    CHECK(k.bond_order_sum(a) + k.atom(a).hydrogens == 4);
  }
}

TEST_CASE("pyridinium Kekule form is one of the enumerated matchings") {
  MolGraph m = parse_smiles("c1cc[nH+]cc1");
  MolGraph k = kekulize(m);
  std::vector<int> pi(6);
  std::iota(pi.begin(), pi.end(), 0);
  auto all = brute_force_matchings(m, pi);
  CHECK(all.size() == 2);
  std::set<int> found;
  for (int b = 0; b < k.num_bonds(); ++b)
    if (k.bond(b).order == BondOrder::kDouble)
      found.insert(b);
  CHECK(std::find(all.begin(), all.end(), found) != all.end());
  int n = 3;
  int n_doubles = 0;
  for (int b: k.incident(n))
    n_doubles += k.bond(b).order == BondOrder::kDouble ? 1 : 0;
  CHECK(n_doubles == 1);
}

TEST_CASE("pyrrole keeps the NH out of the double bonds") {
  MolGraph k = kekulize(parse_smiles("c1cc[nH]c1"));
  CHECK(count_bonds(k, BondOrder::kDouble) == 2);
  for (int b: k.incident(3))
    CHECK(k.bond(b).order == BondOrder::kSingle);
}

TEST_CASE("impossible aromatic systems fail to kekulize") {
  CHECK_THROWS_AS(kekulize(parse_smiles("c1cccc1")), KekulizationFailure);
}

TEST_CASE("aromaticity perception") {
  MolGraph benzene = perceive_aromaticity(parse_smiles("C1=CC=CC=C1"));
  CHECK(count_aromatic_atoms(benzene) == 6);
  CHECK(count_aromatic_atoms(perceive_aromaticity(parse_smiles("C1CCCCC1")))
        == 0);
  MolGraph naph
      = perceive_aromaticity(parse_smiles("C1=CC=C2C=CC=CC2=C1"));
  CHECK(count_aromatic_atoms(naph) == 10);
  // Ring oracle: every atom of naphthalene lies on a six-membered cycle.
  for (const auto &c: smallest_cycles(naph))
    CHECK(c.size() == 6);
  CHECK(count_aromatic_atoms(
            perceive_aromaticity(parse_smiles("C1=CCC=C1")))
        == 0);
  CHECK(count_aromatic_atoms(perceive_aromaticity(parse_smiles("C1=CNC=C1")))
        == 5);
}

TEST_CASE("canonical SMILES ignores input order") {
  CHECK(canonicalize("OCC") == canonicalize("CCO"));
  CHECK(canonicalize("C(C)(C)O") == canonicalize("OC(C)C"));
  CHECK(canonicalize("c1ccccc1O") == canonicalize("Oc1ccccc1"));
  CHECK(canonicalize("C1=CC=CC=C1") == canonicalize("c1ccccc1"));
  CHECK(canonicalize("[Cl-].[Na+]") == canonicalize("[Na+].[Cl-]"));
  CHECK(canonicalize("CCO") != canonicalize("COC"));
}

TEST_CASE("maps are dropped unless kept") {
  CHECK(canonicalize("[CH3:1][OH:2]") == canonicalize("CO"));
  CHECK(canonicalize("[CH3:1][OH:2]", true) != canonicalize("CO"));
  std::string kept = canonicalize("[CH3:1][OH:2]", true);
  CHECK(kept.find(":1") != std::string::npos);
  CHECK(canonicalize(kept, true) == kept);
}

TEST_CASE("mapped explicit hydrogens survive when maps are kept") {
  MolGraph m = parse_smiles("[OH:1][H:3]");
  CHECK(m.num_atoms() == 2);
  std::string kept = canonicalize("[OH:1][H:3]", true);
  CHECK(kept.find(":3") != std::string::npos);
  CHECK(canonicalize("[OH:1][H:3]") == "O");
}

TEST_CASE("canonical output is stable under 500 atom permutations") {
  const char *smi = "CC(C)Oc1ccc(cc1)C(=O)N[C@@H](CC(N)=O)C(=O)[O-]";
  MolGraph m = parse_smiles(smi);
  REQUIRE(m.num_atoms() >= 20);
  std::string ref = canonical_smiles(m, false);
  std::mt19937 rng(7);
  std::set<std::string> seen;
  std::vector<int> perm(m.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 0; k < 500; ++k) {
    std::shuffle(perm.begin(), perm.end(), rng);
    seen.insert(canonical_smiles(m.permuted(perm), false));
  }
  CHECK(seen.size() == 1);
  CHECK(*seen.begin() == ref);
}

TEST_CASE("canonical output is a fixed point") {
  for (const char *s:
       { "C[N+](C)(C)C", "[O-][N+](=O)c1ccccc1", "C#N", "CC=O",
         "OC(=O)CC(O)=O", "c1ccc2[nH]ccc2c1", "[Zn+2].[Cl-].[Cl-]",
         "Cl[Pd]Cl", "C[Zn]Br", "[2H]OC" }) {
    std::string once = canonicalize(s);
    CHECK_MESSAGE(canonicalize(once) == once, s);
  }
}

TEST_CASE("symmetric molecules canonicalize") {
  // Highly symmetric graphs exercise rank tie-breaking.
  for (const char *s: { "C1CCCCC1", "C12C3C4C1C5C2C3C45", "CC(C)(C)C",
                        "c1ccc2cc3ccccc3cc2c1", "C1CC2CCC1CC2" }) {
    MolGraph m = parse_smiles(s);
    std::string ref = canonical_smiles(m, false);
    std::vector<int> perm(m.num_atoms());
    std::iota(perm.rbegin(), perm.rend(), 0);
    CHECK_MESSAGE(canonical_smiles(m.permuted(perm), false) == ref, s);
  }
}

TEST_CASE("suppress_hydrogens folds explicit H") {
  MolGraph m = parse_smiles("[H]O[H]");
  MolGraph s = m.suppress_hydrogens(true);
  CHECK(s.num_atoms() == 1);
  CHECK(s.atom(0).hydrogens == 2);
  MolGraph mapped = parse_smiles("[H:4]O[H]").suppress_hydrogens(false);
  CHECK(mapped.num_atoms() == 2);
}

TEST_CASE("graph helpers") {
  MolGraph m = parse_smiles("CC.O");
  auto parts = m.split_components();
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].num_atoms() == 2);
  CHECK(parts[1].num_atoms() == 1);
  CHECK(m.find_bond(0, 1) == 0);
  CHECK(m.find_bond(0, 2) == -1);
  CHECK_THROWS_AS(m.add_bond(0, 1, BondOrder::kSingle), std::invalid_argument);
  CHECK_THROWS_AS(m.add_bond(0, 0, BondOrder::kSingle), std::invalid_argument);
  CHECK(parse_smiles("[NH4+].[O-]C").total_charge() == 0);
}
