//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <string>
#include <vector>

#include "beflow/aromaticity.h"

namespace beflow {
namespace {

constexpr long kSearchLimit = 2'000'000;

class PiMatcher {
public:
  PiMatcher(const MolGraph &mol, std::vector<bool> needs)
      : mol_(mol), needs_(std::move(needs)), match_(mol.num_atoms(), -1) {
    partners_.resize(mol.num_atoms());
    for (int i = 0; i < mol.num_atoms(); ++i) {
      if (!needs_[i])
        continue;
      for (int b: mol.incident(i)) {
        const Bond &bond = mol.bond(b);
        int j = bond.other(i);
        if (bond.order == BondOrder::kAromatic && needs_[j])
          partners_[i].push_back(j);
      }
      std::sort(partners_[i].begin(), partners_[i].end());
    }
  }

  bool solve() {
    if (++steps_ > kSearchLimit)
      throw KekulizationFailure("kekulization search limit exceeded");
    int i = -1;
    for (int k = 0; k < static_cast<int>(needs_.size()); ++k)
      if (needs_[k] && match_[k] < 0) {
        i = k;
        break;
      }
    if (i < 0)
      return true;
    for (int j: partners_[i]) {
      if (match_[j] >= 0)
        continue;
      match_[i] = j;
      match_[j] = i;
      if (feasible() && solve())
        return true;
      match_[i] = match_[j] = -1;
    }
    return false;
  }

  const std::vector<int> &matching() const { return match_; }

private:
  // Every unmatched atom still has a free partner.
  bool feasible() const {
    for (int k = 0; k < static_cast<int>(needs_.size()); ++k) {
      if (!needs_[k] || match_[k] >= 0)
        continue;
      bool any = std::any_of(partners_[k].begin(), partners_[k].end(),
                             [&](int j) { return match_[j] < 0; });
      if (!any)
        return false;
    }
    return true;
  }

  const MolGraph &mol_;
  std::vector<bool> needs_;
  std::vector<int> match_;
  std::vector<std::vector<int>> partners_;
  long steps_ = 0;
};

}  // namespace

MolGraph kekulize(const MolGraph &mol, const PeriodicTable &table) {
  const int n = mol.num_atoms();
  std::vector<bool> in_system(n, false);
  for (const Bond &b: mol.bonds())
    if (b.order == BondOrder::kAromatic)
      in_system[b.src] = in_system[b.dst] = true;

  std::vector<bool> needs(n, false);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    if (a.aromatic && !in_system[i])
      throw KekulizationFailure("aromatic atom " + std::to_string(i)
                                + " is not in an aromatic ring");
    if (!in_system[i])
      continue;
    const Element &e = table.at(a.atomic_number);
    int s = mol.bond_order_sum(i) + a.hydrogens + a.radical_electrons;
    auto allowed = table.allowed_valences(e, a.formal_charge);
    auto it = std::lower_bound(allowed.begin(), allowed.end(), s);
    if (it == allowed.end())
      throw KekulizationFailure("valence exceeded on aromatic atom "
                                + std::to_string(i));
    int deficit = *it - s;
    if (deficit > 1)
      throw KekulizationFailure("aromatic atom " + std::to_string(i)
                                + " lacks bonds for a Kekule structure");
    needs[i] = deficit == 1;
  }

  PiMatcher matcher(mol, needs);
  if (!matcher.solve())
    throw KekulizationFailure("no Kekule structure exists");

  MolGraph out = mol;
  const auto &match = matcher.matching();
  for (int b = 0; b < out.num_bonds(); ++b) {
    Bond &bond = out.bond(b);
    if (bond.order != BondOrder::kAromatic)
      continue;
    bond.order = match[bond.src] == bond.dst ? BondOrder::kDouble
                                             : BondOrder::kSingle;
  }
  for (int i = 0; i < n; ++i)
    out.atom(i).aromatic = false;
  return out;
}

}  // namespace beflow
