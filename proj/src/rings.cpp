//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <deque>
#include <set>
#include <vector>

#include "beflow/aromaticity.h"

namespace beflow {

std::vector<bool> ring_bonds(const MolGraph &mol) {
  // Bridges (Tarjan); every non-bridge bond lies on a cycle.
  const int n = mol.num_atoms();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> in_ring(mol.num_bonds(), true);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0)
      continue;
    disc[root] = low[root] = timer++;
    stack.push_back({ root, -1, 0 });
    while (!stack.empty()) {
      Frame &f = stack.back();
      const auto &inc = mol.incident(f.atom);
      if (f.next < inc.size()) {
        int b = inc[f.next++];
        if (b == f.parent_bond)
          continue;
        int v = mol.bond(b).other(f.atom);
        if (disc[v] < 0) {
          disc[v] = low[v] = timer++;
          stack.push_back({ v, b, 0 });
        } else {
          low[f.atom] = std::min(low[f.atom], disc[v]);
        }
        continue;
      }
      Frame done = f;
      stack.pop_back();
      if (!stack.empty()) {
        int u = stack.back().atom;
        low[u] = std::min(low[u], low[done.atom]);
        if (low[done.atom] > disc[u])
          in_ring[done.parent_bond] = false;
      }
    }
  }
  return in_ring;
}

std::vector<std::vector<int>> smallest_cycles(const MolGraph &mol) {
  const auto in_ring = ring_bonds(mol);
  const int n = mol.num_atoms();
  std::vector<std::vector<int>> cycles;
  std::set<std::vector<int>> seen;

  for (int b = 0; b < mol.num_bonds(); ++b) {
    if (!in_ring[b])
      continue;
    const int src = mol.bond(b).src, dst = mol.bond(b).dst;
    // BFS from dst back to src without using bond b.
    std::vector<int> prev(n, -2);
    std::deque<int> queue { dst };
    prev[dst] = -1;
    while (!queue.empty() && prev[src] == -2) {
      int u = queue.front();
      queue.pop_front();
      std::vector<int> nbrs;
      for (int bi: mol.incident(u))
        if (bi != b && in_ring[bi])
          nbrs.push_back(mol.bond(bi).other(u));
      std::sort(nbrs.begin(), nbrs.end());
      for (int v: nbrs) {
        if (prev[v] != -2)
          continue;
        prev[v] = u;
        queue.push_back(v);
      }
    }
    if (prev[src] == -2)
      continue;
    std::vector<int> cycle;
    for (int v = src; v != -1; v = prev[v])
      cycle.push_back(v);
    std::vector<int> key = cycle;
    std::sort(key.begin(), key.end());
    if (seen.insert(key).second)
      cycles.push_back(std::move(cycle));
  }
  return cycles;
}

}  // namespace beflow
