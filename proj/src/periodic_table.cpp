//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/periodic_table.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace beflow {

PeriodicTable::PeriodicTable(std::vector<Element> elements)
    : elements_(std::move(elements)) {
  int max_z = 0;
  for (const Element &e: elements_)
    max_z = std::max(max_z, e.atomic_number);
  index_by_z_.assign(max_z + 1, -1);
  for (int i = 0; i < size(); ++i) {
    Element &e = elements_[i];
    if (e.atomic_number <= 0)
      throw std::invalid_argument("element " + e.symbol
                                  + ": atomic number must be positive");
    if (index_by_z_[e.atomic_number] >= 0)
      throw std::invalid_argument("duplicate element " + e.symbol);
    std::sort(e.allowed_valences.begin(), e.allowed_valences.end());
    index_by_z_[e.atomic_number] = i;
  }
}

const PeriodicTable &PeriodicTable::standard() {
  using VC = ValenceClass;
  static const PeriodicTable table({
      { "H", 1, 1, { 1 }, false, VC::kDuet },
      { "Li", 3, 1, { 0, 1 }, false, VC::kMetal },
      { "B", 5, 3, { 3 }, true, VC::kOctet },
      { "C", 6, 4, { 4 }, true, VC::kOctet },
      { "N", 7, 5, { 3 }, true, VC::kOctet },
      { "O", 8, 6, { 2 }, true, VC::kOctet },
      { "F", 9, 7, { 1 }, false, VC::kOctet },
      { "Na", 11, 1, { 0, 1 }, false, VC::kMetal },
      { "Mg", 12, 2, { 0, 2 }, false, VC::kMetal },
      { "Si", 14, 4, { 4 }, false, VC::kExpanded },
      { "P", 15, 5, { 3, 5 }, true, VC::kExpanded },
      { "S", 16, 6, { 2, 4, 6 }, true, VC::kExpanded },
      { "Cl", 17, 7, { 1 }, false, VC::kExpanded },
      { "K", 19, 1, { 0, 1 }, false, VC::kMetal },
      { "Zn", 30, 2, { 0, 2 }, false, VC::kMetal },
      { "Br", 35, 7, { 1 }, false, VC::kExpanded },
      { "Pd", 46, 10, { 0, 2, 4 }, false, VC::kMetal },
      { "Ag", 47, 1, { 0, 1 }, false, VC::kMetal },
      { "I", 53, 7, { 1, 3, 5 }, false, VC::kExpanded },
  });
  return table;
}

namespace {
ValenceClass parse_class(const std::string &s, int line) {
  if (s == "duet")
    return ValenceClass::kDuet;
  if (s == "octet")
    return ValenceClass::kOctet;
  if (s == "expanded")
    return ValenceClass::kExpanded;
  if (s == "metal")
    return ValenceClass::kMetal;
  throw std::runtime_error("element table line " + std::to_string(line)
                           + ": unknown valence class '" + s + "'");
}
}  // namespace

PeriodicTable PeriodicTable::parse(std::string_view text) {
  std::vector<Element> elements;
  std::istringstream in { std::string(text) };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream fields(line);
    Element e;
    std::string valences, aromatic, klass;
    if (!(fields >> e.symbol >> e.atomic_number >> e.valence_electrons
          >> valences >> aromatic >> klass))
      throw std::runtime_error("element table line " + std::to_string(lineno)
                               + ": expected 6 fields");
    std::istringstream vs(valences);
    for (std::string tok; std::getline(vs, tok, ',');)
      e.allowed_valences.push_back(std::stoi(tok));
    e.aromatic_capable = aromatic == "1";
    e.valence_class = parse_class(klass, lineno);
    elements.push_back(std::move(e));
  }
  return PeriodicTable(std::move(elements));
}

PeriodicTable PeriodicTable::load(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open element table " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const Element *PeriodicTable::find(std::string_view symbol) const {
  for (const Element &e: elements_)
    if (e.symbol == symbol)
      return &e;
  return nullptr;
}

const Element *PeriodicTable::find(int atomic_number) const {
  if (atomic_number <= 0
      || atomic_number >= static_cast<int>(index_by_z_.size()))
    return nullptr;
  int idx = index_by_z_[atomic_number];
  return idx < 0 ? nullptr : &elements_[idx];
}

const Element &PeriodicTable::at(int atomic_number) const {
  const Element *e = find(atomic_number);
  if (e == nullptr)
    throw std::out_of_range("element Z=" + std::to_string(atomic_number)
                            + " not in periodic table");
  return *e;
}

int PeriodicTable::index_of(int atomic_number) const {
  const Element *e = find(atomic_number);
  return e == nullptr ? -1 : static_cast<int>(e - elements_.data());
}

std::vector<int> PeriodicTable::allowed_valences(const Element &elem,
                                                 int charge) const {
  if (charge == 0 && elem.valence_class != ValenceClass::kMetal)
    return elem.allowed_valences;

  std::vector<int> out;
  if (elem.valence_class == ValenceClass::kMetal) {
    int top = (elem.allowed_valences.empty() ? 0 : elem.allowed_valences.back())
              + std::abs(charge);
    for (int v = 0; v <= top; ++v)
      out.push_back(v);
    return out;
  }

  const int e = elem.valence_electrons - charge;
  if (e < 0)
    return out;
  int primary;
  if (elem.valence_class == ValenceClass::kDuet)
    primary = e <= 1 ? e : 2 - e;
  else
    primary = e <= 4 ? e : 8 - e;
  if (primary < 0)
    return out;
  out.push_back(primary);
  if (elem.valence_class == ValenceClass::kExpanded)
    for (int v = primary + 2; v <= e; v += 2)
      out.push_back(v);
  return out;
}

int PeriodicTable::max_abs_charge(const Element &elem) {
  return elem.is_metal() ? 4 : 1;
}

}  // namespace beflow
