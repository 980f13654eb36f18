//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/be_matrix.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "beflow/aromaticity.h"
#include "beflow/smiles.h"

namespace beflow {

std::vector<bool> BEMatrix::mask() const {
  std::vector<bool> m(padded_size(), false);
  std::fill(m.begin(), m.begin() + size(), true);
  return m;
}

int BEMatrix::row_sum(int i) const {
  return entries.row(i).sum();
}

long BEMatrix::total() const {
  long s = 0;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      s += entries(i, j);
  return s;
}

BEMatrix build_be(const MolGraph &input, int padding,
                  const PeriodicTable &table) {
  MolGraph mol = input.has_aromatic_bonds() ? kekulize(input, table) : input;
  mol = mol.suppress_hydrogens(false);

  std::set<int> maps;
  for (const Atom &a: mol.atoms()) {
    if (!table.find(a.atomic_number))
      throw BEError("element Z=" + std::to_string(a.atomic_number)
                    + " missing from periodic table");
    if (a.atom_map > 0 && !maps.insert(a.atom_map).second)
      throw BEError("duplicate atom map " + std::to_string(a.atom_map));
  }

  const int n0 = mol.num_atoms();
  const auto ranks = canonical_ranks(mol, true);
  std::vector<int> order(n0);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const int ma = mol.atom(a).atom_map, mb = mol.atom(b).atom_map;
    if ((ma > 0) != (mb > 0))
      return ma > 0;
    if (ma > 0)
      return ma < mb;
    return ranks[a] < ranks[b];
  });

  int n = n0;
  for (const Atom &a: mol.atoms())
    n += a.hydrogens;
  const int size = std::max(n, padding);

  BEMatrix be;
  be.atoms.reserve(n);
  be.entries = IntMatrix::Zero(size, size);
  std::vector<int> pos(n0);
  for (int k = 0; k < n0; ++k) {
    pos[order[k]] = k;
    const Atom &a = mol.atom(order[k]);
    be.atoms.push_back({ a.atomic_number, a.atom_map });
  }
  for (const Bond &b: mol.bonds()) {
    int e = 2 * valence_contribution(b.order);
    be.entries(pos[b.src], pos[b.dst]) = e;
    be.entries(pos[b.dst], pos[b.src]) = e;
  }
  for (int k = 0; k < n0; ++k) {
    const Atom &a = mol.atom(order[k]);
    for (int h = 0; h < a.hydrogens; ++h) {
      int r = static_cast<int>(be.atoms.size());
      be.atoms.push_back({ 1, 0 });
      be.entries(k, r) = be.entries(r, k) = 2;
    }
  }
  for (int k = 0; k < n0; ++k) {
    const int i = order[k];
    const Atom &a = mol.atom(i);
    const Element &e = table.at(a.atomic_number);
    int lone = e.valence_electrons - a.formal_charge - mol.bond_order_sum(i)
               - a.hydrogens;
    if (lone < 0)
      throw ValenceError(e.symbol + " atom " + std::to_string(i)
                             + " has more bonds than valence electrons",
                         i);
    be.entries(k, k) = lone;
  }
  return be;
}

BEMatrix build_be(const std::vector<MolGraph> &mols, int padding,
                  const PeriodicTable &table) {
  MolGraph all;
  for (const MolGraph &m: mols)
    all.append(m);
  return build_be(all, padding, table);
}

int formal_charge(const BEMatrix &be, int i, const PeriodicTable &table) {
  int shared = 0;
  for (int j = 0; j < be.size(); ++j)
    if (j != i)
      shared += be.entries(i, j);
  return table.at(be.atoms[i].atomic_number).valence_electrons
         - be.entries(i, i) - shared / 2;
}

const char *to_string(ReconstructStatus status) {
  switch (status) {
  case ReconstructStatus::kOk:
    return "ok";
  case ReconstructStatus::kNegativeEntry:
    return "negative_entry";
  case ReconstructStatus::kAsymmetric:
    return "asymmetric";
  case ReconstructStatus::kOddBondElectrons:
    return "odd_bond_electrons";
  case ReconstructStatus::kValenceViolation:
    return "valence_violation";
  }
  return "unknown";
}

namespace {

Reconstruction failure(ReconstructStatus s, int atom, std::string detail) {
  Reconstruction r;
  r.status = s;
  r.atom = atom;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

Reconstruction reconstruct(const BEMatrix &be, const PeriodicTable &table) {
  const int n = be.size();
  const auto &m = be.entries;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m(i, j) < 0)
        return failure(ReconstructStatus::kNegativeEntry, i,
                       "negative cell (" + std::to_string(i) + ","
                           + std::to_string(j) + ")");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m(i, j) != m(j, i))
        return failure(ReconstructStatus::kAsymmetric, i,
                       "cells (" + std::to_string(i) + "," + std::to_string(j)
                           + ") differ");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m(i, j) % 2 != 0)
        return failure(ReconstructStatus::kOddBondElectrons, i,
                       "odd bond electrons between " + std::to_string(i)
                           + " and " + std::to_string(j));

  Reconstruction out;
  MolGraph &g = out.graph;
  for (int i = 0; i < n; ++i) {
    const Element *e = table.find(be.atoms[i].atomic_number);
    if (!e)
      return failure(ReconstructStatus::kValenceViolation, i,
                     "unknown element");
    Atom a;
    a.atomic_number = e->atomic_number;
    a.atom_map = be.atoms[i].atom_map;
    a.formal_charge = formal_charge(be, i, table);
    a.radical_electrons = m(i, i) % 2;
    a.bracket = true;
    g.add_atom(a);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (m(i, j) == 0)
        continue;
      if (m(i, j) > 6)
        return failure(ReconstructStatus::kValenceViolation, i,
                       "bond order above three");
      g.add_bond(i, j, static_cast<BondOrder>(m(i, j) / 2));
    }
  for (int i = 0; i < n; ++i) {
    const Atom &a = g.atom(i);
    const Element &e = table.at(a.atomic_number);
    if (std::abs(a.formal_charge) > PeriodicTable::max_abs_charge(e))
      return failure(ReconstructStatus::kValenceViolation, i,
                     e.symbol + " with charge "
                         + std::to_string(a.formal_charge));
    int used = g.bond_order_sum(i) + a.radical_electrons;
    auto allowed = table.allowed_valences(e, a.formal_charge);
    if (!std::binary_search(allowed.begin(), allowed.end(), used))
      return failure(ReconstructStatus::kValenceViolation, i,
                     e.symbol + " with valence " + std::to_string(used)
                         + " and charge " + std::to_string(a.formal_charge));
  }
  out.molecules = g.split_components();
  return out;
}

ConservationReport check_conservation(const BEMatrix &reactant,
                                      const BEMatrix &product) {
  ConservationReport r;
  auto count = [](const BEMatrix &be, std::map<int, int> &heavy, int &h) {
    for (const BEAtom &a: be.atoms) {
      if (a.atomic_number == 1)
        ++h;
      else
        ++heavy[a.atomic_number];
    }
  };
  count(reactant, r.reactant_heavy, r.reactant_hydrogens);
  count(product, r.product_heavy, r.product_hydrogens);
  r.reactant_electrons = reactant.total();
  r.product_electrons = product.total();
  r.heavy_atoms = r.reactant_heavy == r.product_heavy;
  r.protons = r.reactant_hydrogens == r.product_hydrogens;
  r.electrons = r.reactant_electrons == r.product_electrons;
  return r;
}

Eigen::MatrixXd delta(const BEMatrix &reactant, const BEMatrix &product) {
  if (reactant.atoms != product.atoms)
    throw BEError("atom lists differ between reactant and product");
  if (reactant.total() != product.total())
    throw BEError("electron totals differ: "
                  + std::to_string(reactant.total()) + " vs "
                  + std::to_string(product.total()));
  return (product.active() - reactant.active()).cast<double>();
}

std::string dump_be(const BEMatrix &be, const PeriodicTable &table) {
  std::ostringstream out;
  for (int i = 0; i < be.size(); ++i) {
    if (i > 0)
      out << ' ';
    out << table.at(be.atoms[i].atomic_number).symbol;
    if (be.atoms[i].atom_map > 0)
      out << ':' << be.atoms[i].atom_map;
  }
  out << '\n';
  for (int i = 0; i < be.size(); ++i) {
    for (int j = 0; j < be.size(); ++j) {
      if (j > 0)
        out << ' ';
      out << be.entries(i, j);
    }
    out << '\n';
  }
  return out.str();
}

BEMatrix parse_be_dump(std::string_view text, const PeriodicTable &table) {
  std::istringstream in { std::string(text) };
  std::string header;
  while (std::getline(in, header) && header.find_first_not_of(" \t\r")
                                         == std::string::npos) { }
  BEMatrix be;
  std::istringstream hs(header);
  std::string tok;
  while (hs >> tok) {
    auto colon = tok.find(':');
    std::string sym = tok.substr(0, colon);
    const Element *e = table.find(sym);
    if (!e)
      throw BEError("unknown element '" + sym + "' in matrix header");
    int map = colon == std::string::npos ? 0 : std::stoi(tok.substr(colon + 1));
    be.atoms.push_back({ e->atomic_number, map });
  }
  const int n = be.size();
  be.entries = IntMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(in >> be.entries(i, j)))
        throw BEError("matrix dump truncated at row " + std::to_string(i));
  return be;
}

}  // namespace beflow
