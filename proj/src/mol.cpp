//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/mol.h"

#include <algorithm>
#include <numeric>

namespace beflow {

int MolGraph::add_atom(const Atom &atom) {
  atoms_.push_back(atom);
  adjacency_.emplace_back();
  return num_atoms() - 1;
}

int MolGraph::add_bond(int src, int dst, BondOrder order) {
  if (src == dst)
    throw std::invalid_argument("self-bond on atom " + std::to_string(src));
  if (src < 0 || dst < 0 || src >= num_atoms() || dst >= num_atoms())
    throw std::out_of_range("bond endpoint out of range");
  if (find_bond(src, dst) >= 0)
    throw std::invalid_argument("duplicate bond " + std::to_string(src) + "-"
                                + std::to_string(dst));
  bonds_.push_back({ src, dst, order });
  int b = num_bonds() - 1;
  adjacency_[src].push_back(b);
  adjacency_[dst].push_back(b);
  return b;
}

int MolGraph::find_bond(int a, int b) const {
  for (int bi: adjacency_[a])
    if (bonds_[bi].other(a) == b)
      return bi;
  return -1;
}

int MolGraph::bond_order_sum(int i) const {
  int sum = 0;
  for (int b: adjacency_[i])
    sum += valence_contribution(bonds_[b].order);
  return sum;
}

bool MolGraph::has_aromatic_bonds() const {
  return std::any_of(bonds_.begin(), bonds_.end(), [](const Bond &b) {
    return b.order == BondOrder::kAromatic;
  });
}

std::vector<int> MolGraph::component_ids() const {
  std::vector<int> comp(num_atoms(), -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < num_atoms(); ++s) {
    if (comp[s] >= 0)
      continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int b: adjacency_[u]) {
        int v = bonds_[b].other(u);
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

int MolGraph::num_components() const {
  auto comp = component_ids();
  return comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
}

MolGraph MolGraph::subgraph(const std::vector<int> &atom_ids) const {
  std::vector<int> remap(num_atoms(), -1);
  MolGraph out;
  for (int id: atom_ids)
    remap[id] = out.add_atom(atoms_[id]);
  for (const Bond &b: bonds_)
    if (remap[b.src] >= 0 && remap[b.dst] >= 0)
      out.add_bond(remap[b.src], remap[b.dst], b.order);
  return out;
}

std::vector<MolGraph> MolGraph::split_components() const {
  auto comp = component_ids();
  int n = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < num_atoms(); ++i)
    members[comp[i]].push_back(i);
  std::vector<MolGraph> out;
  out.reserve(n);
  for (const auto &m: members)
    out.push_back(subgraph(m));
  return out;
}

int MolGraph::append(const MolGraph &other) {
  int offset = num_atoms();
  for (const Atom &a: other.atoms_)
    add_atom(a);
  for (const Bond &b: other.bonds_)
    add_bond(b.src + offset, b.dst + offset, b.order);
  return offset;
}

MolGraph MolGraph::permuted(const std::vector<int> &perm) const {
  std::vector<int> inverse(num_atoms());
  for (int i = 0; i < num_atoms(); ++i)
    inverse[perm[i]] = i;
  MolGraph out;
  for (int i = 0; i < num_atoms(); ++i)
    out.add_atom(atoms_[inverse[i]]);
  for (const Bond &b: bonds_)
    out.add_bond(perm[b.src], perm[b.dst], b.order);
  return out;
}

MolGraph MolGraph::suppress_hydrogens(bool drop_mapped) const {
  std::vector<int> host(num_atoms(), -1);
  for (int i = 0; i < num_atoms(); ++i) {
    const Atom &a = atoms_[i];
    if (a.atomic_number != 1 || a.formal_charge != 0 || a.isotope != 0
        || a.radical_electrons != 0 || a.hydrogens != 0 || degree(i) != 1)
      continue;
    if (a.atom_map != 0 && !drop_mapped)
      continue;
    const Bond &b = bonds_[adjacency_[i][0]];
    int h = b.other(i);
    if (atoms_[h].atomic_number == 1 || b.order != BondOrder::kSingle)
      continue;
    host[i] = h;
  }

  std::vector<Atom> kept_atoms = atoms_;
  for (int i = 0; i < num_atoms(); ++i) {
    if (host[i] >= 0)
      ++kept_atoms[host[i]].hydrogens;
  }
  MolGraph out;
  std::vector<int> remap(num_atoms(), -1);
  for (int i = 0; i < num_atoms(); ++i)
    if (host[i] < 0)
      remap[i] = out.add_atom(kept_atoms[i]);
  for (const Bond &b: bonds_)
    if (remap[b.src] >= 0 && remap[b.dst] >= 0)
      out.add_bond(remap[b.src], remap[b.dst], b.order);
  return out;
}

int MolGraph::total_charge() const {
  return std::accumulate(atoms_.begin(), atoms_.end(), 0,
                         [](int s, const Atom &a) {
                           return s + a.formal_charge;
                         });
}

}  // namespace beflow
