//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "beflow/aromaticity.h"
#include "beflow/smiles.h"

namespace beflow {
namespace {

using Key = std::vector<int>;

int dense_rank(const std::vector<Key> &keys, std::vector<int> &ranks) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  ranks.assign(n, 0);
  int r = 0;
  for (int k = 0; k < n; ++k) {
    if (k > 0 && keys[order[k]] != keys[order[k - 1]])
      ++r;
    ranks[order[k]] = r;
  }
  return n == 0 ? 0 : r + 1;
}

int refine(const MolGraph &mol, std::vector<int> &ranks, int classes) {
  const int n = mol.num_atoms();
  std::vector<Key> keys(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, int>> nb;
      for (int b: mol.incident(i)) {
        const Bond &bond = mol.bond(b);
        nb.emplace_back(ranks[bond.other(i)], static_cast<int>(bond.order));
      }
      std::sort(nb.begin(), nb.end());
      Key &k = keys[i];
      k.clear();
      k.push_back(ranks[i]);
      for (auto [r, o]: nb) {
        k.push_back(r);
        k.push_back(o);
      }
    }
    std::vector<int> next;
    int c = dense_rank(keys, next);
    ranks = std::move(next);
    if (c == classes)
      return c;
    classes = c;
  }
}

std::string charge_text(int q) {
  if (q == 0)
    return "";
  std::string s(1, q > 0 ? '+' : '-');
  if (std::abs(q) > 1)
    s += std::to_string(std::abs(q));
  return s;
}

class Writer {
public:
  Writer(const MolGraph &mol, const std::vector<int> &ranks, bool keep_maps,
         const PeriodicTable &table)
      : mol_(mol), ranks_(ranks), keep_maps_(keep_maps), table_(table),
        visited_(mol.num_atoms(), false), order_(mol.num_atoms(), -1),
        parent_bond_(mol.num_atoms(), -1), ring_seen_(mol.num_bonds(), false),
        children_(mol.num_atoms()), openings_(mol.num_atoms()),
        closings_(mol.num_atoms()) { }

  std::string write() {
    if (mol_.num_atoms() == 0)
      return "";
    int start = static_cast<int>(
        std::min_element(ranks_.begin(), ranks_.end()) - ranks_.begin());
    plan(start);
    std::string out;
    emit(start, out);
    return out;
  }

private:
  std::vector<int> sorted_neighbors(int u) const {
    std::vector<int> bonds = mol_.incident(u);
    std::sort(bonds.begin(), bonds.end(), [&](int a, int b) {
      return ranks_[mol_.bond(a).other(u)] < ranks_[mol_.bond(b).other(u)];
    });
    return bonds;
  }

  void plan(int start) {
    struct Frame {
      int atom;
      std::vector<int> bonds;
      std::size_t next = 0;
    };
    int counter = 0;
    visited_[start] = true;
    order_[start] = counter++;
    std::vector<Frame> stack;
    stack.push_back({ start, sorted_neighbors(start) });
    while (!stack.empty()) {
      Frame &f = stack.back();
      if (f.next == f.bonds.size()) {
        stack.pop_back();
        continue;
      }
      int b = f.bonds[f.next++];
      if (b == parent_bond_[f.atom])
        continue;
      int v = mol_.bond(b).other(f.atom);
      if (!visited_[v]) {
        visited_[v] = true;
        order_[v] = counter++;
        parent_bond_[v] = b;
        children_[f.atom].push_back(b);
        stack.push_back({ v, sorted_neighbors(v) });
      } else if (!ring_seen_[b]) {
        ring_seen_[b] = true;
        // v is an ancestor of f.atom and was written first.
        openings_[v].push_back(b);
        closings_[f.atom].push_back(b);
      }
    }
    // Openings in the order their closing partners appear.
    for (auto &list: openings_)
      std::sort(list.begin(), list.end(), [&](int a, int b) {
        return order_[closing_atom(a)] < order_[closing_atom(b)];
      });
  }

  int closing_atom(int b) const {
    const Bond &bond = mol_.bond(b);
    return order_[bond.src] > order_[bond.dst] ? bond.src : bond.dst;
  }

  std::string bond_text(int b) const {
    const Bond &bond = mol_.bond(b);
    switch (bond.order) {
    case BondOrder::kAromatic:
      return "";
    case BondOrder::kSingle:
      return mol_.atom(bond.src).aromatic && mol_.atom(bond.dst).aromatic
                 ? "-"
                 : "";
    case BondOrder::kDouble:
      return "=";
    case BondOrder::kTriple:
      return "#";
    }
    return "";
  }

  std::string atom_text(int i) const {
    const Atom &a = mol_.atom(i);
    const Element &e = table_.at(a.atomic_number);
    std::string symbol = e.symbol;
    if (a.aromatic)
      std::transform(symbol.begin(), symbol.end(), symbol.begin(),
                     [](unsigned char c) { return std::tolower(c); });

    const int map = keep_maps_ ? a.atom_map : 0;
    bool bare = is_organic_subset(e.symbol) && a.formal_charge == 0
                && a.isotope == 0 && a.radical_electrons == 0 && map == 0
                && default_implicit_hydrogens(e, mol_.bond_order_sum(i),
                                              a.aromatic)
                       == a.hydrogens;
    if (bare)
      return symbol;

    std::string s = "[";
    if (a.isotope > 0)
      s += std::to_string(a.isotope);
    s += symbol;
    if (a.hydrogens == 1)
      s += "H";
    else if (a.hydrogens > 1)
      s += "H" + std::to_string(a.hydrogens);
    s += charge_text(a.formal_charge);
    if (map > 0)
      s += ":" + std::to_string(map);
    s += "]";
    return s;
  }

  static std::string ring_label(int d) {
    return d < 10 ? std::to_string(d) : "%" + std::to_string(d);
  }

  int take_digit() {
    for (int d = 1;; ++d)
      if (used_digits_.insert(d).second)
        return d;
  }

  void emit(int u, std::string &out) {
    out += atom_text(u);
    for (int b: openings_[u]) {
      int d = take_digit();
      digit_of_[b] = d;
      out += bond_text(b) + ring_label(d);
    }
    std::vector<int> closing = closings_[u];
    std::sort(closing.begin(), closing.end(), [&](int a, int b) {
      return digit_of_.at(a) < digit_of_.at(b);
    });
    for (int b: closing) {
      int d = digit_of_.at(b);
      out += ring_label(d);
      used_digits_.erase(d);
    }
    const auto &kids = children_[u];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      int b = kids[k];
      int v = mol_.bond(b).other(u);
      bool branch = k + 1 < kids.size();
      if (branch)
        out += '(';
      out += bond_text(b);
      emit(v, out);
      if (branch)
        out += ')';
    }
  }

  const MolGraph &mol_;
  const std::vector<int> &ranks_;
  bool keep_maps_;
  const PeriodicTable &table_;

  std::vector<bool> visited_;
  std::vector<int> order_;
  std::vector<int> parent_bond_;
  std::vector<bool> ring_seen_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> openings_;
  std::vector<std::vector<int>> closings_;
  std::set<int> used_digits_;
  std::map<int, int> digit_of_;
};

}  // namespace

std::vector<int> canonical_ranks(const MolGraph &mol, bool use_maps) {
  const int n = mol.num_atoms();
  std::vector<Key> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    keys[i] = { a.atomic_number, a.isotope, a.formal_charge, a.hydrogens,
                mol.degree(i), a.aromatic ? 1 : 0, a.radical_electrons,
                use_maps ? a.atom_map : 0 };
  }
  std::vector<int> ranks;
  int classes = dense_rank(keys, ranks);
  classes = refine(mol, ranks, classes);
  while (classes < n) {
    // Break the lowest tie by promoting its lowest-index member.
    std::vector<int> count(classes, 0);
    for (int r: ranks)
      ++count[r];
    int tied = static_cast<int>(
        std::find_if(count.begin(), count.end(), [](int c) { return c > 1; })
        - count.begin());
    int chosen = -1;
    for (int i = 0; i < n; ++i)
      if (ranks[i] == tied) {
        chosen = i;
        break;
      }
    std::vector<Key> k(n);
    for (int i = 0; i < n; ++i)
      k[i] = { ranks[i], i == chosen || ranks[i] != tied ? 0 : 1 };
    classes = dense_rank(k, ranks);
    classes = refine(mol, ranks, classes);
  }
  return ranks;
}

std::string canonical_smiles(const MolGraph &input, bool keep_maps,
                             const PeriodicTable &table) {
  MolGraph mol = input;
  if (!keep_maps)
    for (int i = 0; i < mol.num_atoms(); ++i)
      mol.atom(i).atom_map = 0;
  if (mol.has_aromatic_bonds())
    mol = kekulize(mol, table);
  mol = mol.suppress_hydrogens(!keep_maps);
  mol = perceive_aromaticity(mol, table);

  std::vector<std::string> parts;
  for (const MolGraph &comp: mol.split_components()) {
    auto ranks = canonical_ranks(comp, keep_maps);
    parts.push_back(Writer(comp, ranks, keep_maps, table).write());
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0)
      out += '.';
    out += parts[i];
  }
  return out;
}

std::string canonicalize(std::string_view smiles, bool keep_maps,
                         const PeriodicTable &table) {
  return canonical_smiles(parse_smiles(smiles, table), keep_maps, table);
}

}  // namespace beflow
