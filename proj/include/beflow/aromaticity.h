//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_AROMATICITY_H_
#define BEFLOW_AROMATICITY_H_

#include <vector>

#include "beflow/mol.h"
#include "beflow/periodic_table.h"

namespace beflow {

/**
 * Replace aromatic bonds with alternating single/double bonds.
 *
 * Atoms needing a pi bond are those whose valence (aromatic bonds counted
 * as 1, plus hydrogens) falls one short of their lowest allowed valence.
 * A perfect matching over aromatic bonds between those atoms is found by
 * depth-first search that always extends the lowest-index unmatched atom
 * and tries partners in ascending index order, so the result is
 * deterministic. Aromatic flags are cleared on the output.
 *
 * Throws KekulizationFailure when no perfect matching exists.
 */
MolGraph kekulize(const MolGraph &mol,
                  const PeriodicTable &table = PeriodicTable::standard());

/**
 * Flag aromatic rings on a kekulized graph.
 *
 * Each ring atom contributes pi electrons: 1 when it carries a double bond
 * to another atom of its ring system, 0 for an exocyclic double bond or an
 * empty p orbital (cation, trivalent boron), 2 for a lone pair on an atom
 * without double bonds. Any other atom (sp3, radical, element not aromatic
 * capable) disqualifies its ring. Candidate rings are the smallest cycle
 * through every ring bond plus unions of two such cycles sharing a bond; a
 * candidate whose electron count is 4n+2 is aromatic. Rings whose atoms
 * keep a double bond outside the aromatic bond set are left non-aromatic,
 * so the flagged form always re-kekulizes.
 */
MolGraph perceive_aromaticity(const MolGraph &mol,
                              const PeriodicTable &table
                              = PeriodicTable::standard());

// Smallest cycle (as atom lists) through each ring bond, deduplicated.
std::vector<std::vector<int>> smallest_cycles(const MolGraph &mol);

// Per-bond ring membership.
std::vector<bool> ring_bonds(const MolGraph &mol);

}  // namespace beflow

#endif  // BEFLOW_AROMATICITY_H_
