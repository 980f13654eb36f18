//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_MOL_H_
#define BEFLOW_MOL_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beflow/periodic_table.h"

namespace beflow {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Integral order used for valence sums; aromatic bonds count as 1 until the
// system is kekulized.
constexpr int valence_contribution(BondOrder order) {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

struct Atom {
  int atomic_number = 6;
  int formal_charge = 0;
  int hydrogens = 0;
  int atom_map = 0;  // 0 = unmapped
  int isotope = 0;
  int radical_electrons = 0;
  bool aromatic = false;
  // True when the hydrogen count came from a bracket atom rather than from
  // the default-valence rule. The two sources are never mixed.
  bool bracket = false;
};

struct Bond {
  int src;
  int dst;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == src ? dst : src; }
};

class KekulizationFailure: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ValenceError: public std::runtime_error {
public:
  ValenceError(const std::string &what, int atom)
      : std::runtime_error(what), atom_(atom) { }

  int atom() const { return atom_; }

private:
  int atom_;
};

/**
 * Atoms, bonds, charges and atom maps of one or more species. Hydrogens are
 * normally carried as per-atom counts; explicit hydrogen atoms appear only
 * where a bracket [H] was written or a bond-electron matrix was decoded.
 */
class MolGraph {
public:
  MolGraph() = default;

  int add_atom(const Atom &atom);
  // Throws std::invalid_argument for self-bonds or duplicate bonds.
  int add_bond(int src, int dst, BondOrder order);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }

  const Atom &atom(int i) const { return atoms_[i]; }
  Atom &atom(int i) { return atoms_[i]; }
  const std::vector<Atom> &atoms() const { return atoms_; }

  const Bond &bond(int b) const { return bonds_[b]; }
  Bond &bond(int b) { return bonds_[b]; }
  const std::vector<Bond> &bonds() const { return bonds_; }

  // Bond indices incident to atom i.
  const std::vector<int> &incident(int i) const { return adjacency_[i]; }
  int degree(int i) const { return static_cast<int>(adjacency_[i].size()); }

  // -1 when a and b are not bonded.
  int find_bond(int a, int b) const;

  // Sum of bond orders (aromatic = 1), excluding hydrogens counts.
  int bond_order_sum(int i) const;

  bool has_aromatic_bonds() const;

  // Component id per atom, numbered in order of first appearance.
  std::vector<int> component_ids() const;
  int num_components() const;

  // Copy of the atoms with the given ids, in that order.
  MolGraph subgraph(const std::vector<int> &atom_ids) const;
  std::vector<MolGraph> split_components() const;

  // Concatenate other into this graph; returns the index offset.
  int append(const MolGraph &other);

  // Relabel: new index of atom i is perm[i].
  MolGraph permuted(const std::vector<int> &perm) const;

  // Fold explicit hydrogen atoms that hang off exactly one non-hydrogen
  // atom into that atom's hydrogen count. Mapped hydrogens are kept unless
  // drop_mapped is set.
  MolGraph suppress_hydrogens(bool drop_mapped) const;

  int total_charge() const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace beflow

#endif  // BEFLOW_MOL_H_
