//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_BE_MATRIX_H_
#define BEFLOW_BE_MATRIX_H_

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "beflow/mol.h"
#include "beflow/periodic_table.h"

namespace beflow {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct BEAtom {
  int atomic_number = 0;
  int atom_map = 0;

  bool operator==(const BEAtom &) const = default;
};

class BEError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/**
 * Bond-electron matrix over a fixed atom list. The diagonal holds
 * nonbonding electrons, off-diagonal cells hold the electrons shared in a
 * bond (2, 4, 6). Rows beyond atoms.size() are padding and stay zero.
 */
struct BEMatrix {
  std::vector<BEAtom> atoms;
  IntMatrix entries;

  int size() const { return static_cast<int>(atoms.size()); }
  int padded_size() const { return static_cast<int>(entries.rows()); }

  // Active block only.
  IntMatrix active() const { return entries.topLeftCorner(size(), size()); }
  std::vector<bool> mask() const;

  int row_sum(int i) const;
  long total() const;

  bool operator==(const BEMatrix &o) const {
    return atoms == o.atoms && entries == o.entries;
  }
};

/**
 * Encode the species of mol as one BE matrix. Aromatic input is kekulized;
 * implicit hydrogens become explicit rows. Atom order: mapped atoms by
 * ascending map, then unmapped heavy atoms by canonical rank, then
 * unmapped hydrogens grouped by host position. A padding larger than the
 * atom count yields zero rows at the end.
 *
 * Throws BEError on duplicate maps and ValenceError when an atom would be
 * left with a negative lone-electron count.
 */
BEMatrix build_be(const MolGraph &mol, int padding = 0,
                  const PeriodicTable &table = PeriodicTable::standard());
BEMatrix build_be(const std::vector<MolGraph> &mols, int padding = 0,
                  const PeriodicTable &table = PeriodicTable::standard());

// Valence electrons - lone electrons - shared electrons / 2.
int formal_charge(const BEMatrix &be, int i,
                  const PeriodicTable &table = PeriodicTable::standard());

enum class ReconstructStatus {
  kOk,
  kNegativeEntry,
  kAsymmetric,
  kOddBondElectrons,
  kValenceViolation,
};

const char *to_string(ReconstructStatus status);

struct Reconstruction {
  ReconstructStatus status = ReconstructStatus::kOk;
  // Valid only when ok(): the whole system (explicit hydrogens, maps
  // kept) and its connected components.
  MolGraph graph;
  std::vector<MolGraph> molecules;
  int atom = -1;  // first offending atom, -1 when not atom-specific
  std::string detail;

  bool ok() const { return status == ReconstructStatus::kOk; }
};

/**
 * Decode a matrix into molecules. Checks, in order: negative cells,
 * asymmetry, odd off-diagonal cells, then per-atom chemistry (formal
 * charge within bounds and bond count plus unpaired electron in the
 * allowed valence list for that charge). An odd diagonal leaves one
 * unpaired electron on the atom.
 */
Reconstruction reconstruct(const BEMatrix &be,
                           const PeriodicTable &table
                           = PeriodicTable::standard());

struct ConservationReport {
  bool heavy_atoms = false;
  bool protons = false;
  bool electrons = false;
  std::map<int, int> reactant_heavy;  // atomic number -> count
  std::map<int, int> product_heavy;
  int reactant_hydrogens = 0;
  int product_hydrogens = 0;
  long reactant_electrons = 0;
  long product_electrons = 0;

  bool all() const { return heavy_atoms && protons && electrons; }
};

ConservationReport check_conservation(const BEMatrix &reactant,
                                      const BEMatrix &product);

// product - reactant over the active block. Throws BEError when the atom
// lists differ or the sums do not match.
Eigen::MatrixXd delta(const BEMatrix &reactant, const BEMatrix &product);

// "C:1 O:2 H H" header line, then one space-separated row per atom.
std::string dump_be(const BEMatrix &be,
                    const PeriodicTable &table = PeriodicTable::standard());
BEMatrix parse_be_dump(std::string_view text,
                       const PeriodicTable &table = PeriodicTable::standard());

}  // namespace beflow

#endif  // BEFLOW_BE_MATRIX_H_
