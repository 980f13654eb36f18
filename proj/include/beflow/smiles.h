//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_SMILES_H_
#define BEFLOW_SMILES_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "beflow/mol.h"
#include "beflow/periodic_table.h"

namespace beflow {

class SmilesError: public std::runtime_error {
public:
  SmilesError(const std::string &msg, std::size_t offset);

  std::size_t offset() const { return offset_; }
  const std::string &message() const { return message_; }

private:
  std::size_t offset_;
  std::string message_;
};

/**
 * Parse a SMILES string.
 *
 * Supported: organic-subset atoms (B C N O P S F Cl Br I and aromatic
 * b c n o p s), bracket atoms [isotope? symbol chirality? Hn? charge?
 * ^radicals? :map?], ring closures (digits and %nn), branches, bond symbols
 * - = # : and dot-separated components. Stereo marks (/ \ @) are accepted
 * and dropped; a note is appended to warnings when given.
 *
 * The ^n token inside brackets is an extension recording unpaired
 * electrons; it must agree with the parity of the atom's nonbonding
 * electrons.
 */
MolGraph parse_smiles(std::string_view text,
                      const PeriodicTable &table = PeriodicTable::standard(),
                      std::vector<std::string> *warnings = nullptr);

struct ReactionSmiles {
  MolGraph reactants;
  MolGraph products;
};

// "reactants>>products"; an agents field (a>b>c) is rejected.
ReactionSmiles
parse_reaction_smiles(std::string_view text,
                      const PeriodicTable &table = PeriodicTable::standard());

/**
 * Deterministic SMILES, independent of input atom order. Aromatic systems
 * are kekulized, re-perceived and written in lowercase; components are
 * sorted and joined with '.'. Hydrogens are written as counts.
 */
std::string canonical_smiles(const MolGraph &mol, bool keep_maps,
                             const PeriodicTable &table
                             = PeriodicTable::standard());

// Canonical SMILES of a SMILES string (maps stripped unless keep_maps).
std::string canonicalize(std::string_view smiles, bool keep_maps = false,
                         const PeriodicTable &table
                         = PeriodicTable::standard());

// Symmetry-refined canonical ranks (0-based, all distinct).
std::vector<int> canonical_ranks(const MolGraph &mol, bool use_maps);

// Hydrogen count the parser would infer for an unbracketed atom; -1 when no
// configured valence fits.
int default_implicit_hydrogens(const Element &elem, int bond_order_sum,
                               bool aromatic);

bool is_organic_subset(std::string_view symbol);

}  // namespace beflow

#endif  // BEFLOW_SMILES_H_
