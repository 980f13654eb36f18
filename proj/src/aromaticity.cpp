//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <set>
#include <vector>

#include "beflow/aromaticity.h"

namespace beflow {
namespace {

constexpr int kDisqualified = -1;

std::vector<int> pi_contributions(const MolGraph &mol,
                                  const std::vector<bool> &in_ring,
                                  const PeriodicTable &table) {
  const int n = mol.num_atoms();
  std::vector<bool> ring_atom(n, false);
  for (int b = 0; b < mol.num_bonds(); ++b)
    if (in_ring[b])
      ring_atom[mol.bond(b).src] = ring_atom[mol.bond(b).dst] = true;

  std::vector<int> pi(n, kDisqualified);
  for (int i = 0; i < n; ++i) {
    if (!ring_atom[i])
      continue;
    const Atom &a = mol.atom(i);
    const Element &e = table.at(a.atomic_number);
    if (!e.aromatic_capable || a.radical_electrons != 0)
      continue;

    int doubles = 0, ring_doubles = 0;
    bool triple = false;
    for (int b: mol.incident(i)) {
      BondOrder o = mol.bond(b).order;
      if (o == BondOrder::kDouble) {
        ++doubles;
        if (in_ring[b])
          ++ring_doubles;
      } else if (o == BondOrder::kTriple) {
        triple = true;
      }
    }
    if (triple || doubles > 1)
      continue;
    if (doubles == 1) {
      pi[i] = ring_doubles == 1 ? 1 : 0;
      continue;
    }
    const int s = mol.bond_order_sum(i) + a.hydrogens;
    const int lone = e.valence_electrons - a.formal_charge - s;
    if (lone >= 2 && mol.degree(i) + a.hydrogens <= 3)
      pi[i] = 2;
    else if (lone == 0 && s <= 3)
      pi[i] = 0;
  }
  return pi;
}

struct Candidate {
  std::vector<int> atoms;
  std::vector<int> bonds;
};

std::vector<int> cycle_bonds(const MolGraph &mol, const std::vector<int> &cyc) {
  std::vector<int> out;
  for (std::size_t k = 0; k < cyc.size(); ++k) {
    int b = mol.find_bond(cyc[k], cyc[(k + 1) % cyc.size()]);
    out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Candidate> candidates(const MolGraph &mol) {
  auto cycles = smallest_cycles(mol);
  std::vector<Candidate> out;
  for (const auto &c: cycles) {
    Candidate cand { c, cycle_bonds(mol, c) };
    std::sort(cand.atoms.begin(), cand.atoms.end());
    out.push_back(std::move(cand));
  }
  const std::size_t singles = out.size();
  for (std::size_t i = 0; i < singles; ++i) {
    for (std::size_t j = i + 1; j < singles; ++j) {
      std::vector<int> shared;
      std::set_intersection(out[i].bonds.begin(), out[i].bonds.end(),
                            out[j].bonds.begin(), out[j].bonds.end(),
                            std::back_inserter(shared));
      if (shared.empty())
        continue;
      Candidate u;
      std::set_union(out[i].atoms.begin(), out[i].atoms.end(),
                     out[j].atoms.begin(), out[j].atoms.end(),
                     std::back_inserter(u.atoms));
      std::set_union(out[i].bonds.begin(), out[i].bonds.end(),
                     out[j].bonds.begin(), out[j].bonds.end(),
                     std::back_inserter(u.bonds));
      out.push_back(std::move(u));
    }
  }
  return out;
}

}  // namespace

MolGraph perceive_aromaticity(const MolGraph &input,
                              const PeriodicTable &table) {
  MolGraph mol = input.has_aromatic_bonds() ? kekulize(input, table) : input;
  for (int i = 0; i < mol.num_atoms(); ++i)
    mol.atom(i).aromatic = false;

  const auto in_ring = ring_bonds(mol);
  const auto pi = pi_contributions(mol, in_ring, table);
  auto cands = candidates(mol);

  std::vector<bool> accepted(cands.size(), false);
  for (std::size_t c = 0; c < cands.size(); ++c) {
    int electrons = 0;
    bool ok = true;
    for (int a: cands[c].atoms) {
      if (pi[a] < 0) {
        ok = false;
        break;
      }
      electrons += pi[a];
    }
    accepted[c] = ok && electrons % 4 == 2;
  }

  std::vector<bool> arom_atom, arom_bond;
  for (bool changed = true; changed;) {
    changed = false;
    arom_atom.assign(mol.num_atoms(), false);
    arom_bond.assign(mol.num_bonds(), false);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (!accepted[c])
        continue;
      for (int a: cands[c].atoms)
        arom_atom[a] = true;
      for (int b: cands[c].bonds)
        arom_bond[b] = true;
    }
    // A flagged atom whose double bond would not be written as aromatic
    // cannot be re-kekulized; drop every candidate containing it.
    for (int b = 0; b < mol.num_bonds(); ++b) {
      const Bond &bond = mol.bond(b);
      if (bond.order != BondOrder::kDouble || arom_bond[b])
        continue;
      for (int end: { bond.src, bond.dst }) {
        if (!arom_atom[end] || pi[end] != 1)
          continue;
        for (std::size_t c = 0; c < cands.size(); ++c) {
          if (accepted[c]
              && std::binary_search(cands[c].atoms.begin(),
                                    cands[c].atoms.end(), end)) {
            accepted[c] = false;
            changed = true;
          }
        }
      }
    }
  }

  for (int i = 0; i < mol.num_atoms(); ++i)
    mol.atom(i).aromatic = arom_atom[i];
  for (int b = 0; b < mol.num_bonds(); ++b)
    if (arom_bond[b])
      mol.bond(b).order = BondOrder::kAromatic;
  return mol;
}

}  // namespace beflow
