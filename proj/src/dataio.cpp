//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "beflow/dataio.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "beflow/aromaticity.h"
#include "beflow/flow.h"
#include "beflow/smiles.h"

namespace beflow {
namespace {

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos)
      break;
    start = tab + 1;
  }
  return out;
}

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \r\n");
  if (b == std::string::npos)
    return "";
  auto e = s.find_last_not_of(" \r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

CorpusLoad read_corpus(std::istream &in) {
  CorpusLoad out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (trim(line).empty() || line[0] == '#')
      continue;
    auto fields = split_tabs(line);
    auto skip = [&](const std::string &why) {
      out.diagnostics.push_back("line " + std::to_string(lineno) + ": " + why);
      ++out.skipped;
    };
    if (fields.size() < 3 || fields.size() > 4) {
      skip("expected 4 tab-separated fields, found "
           + std::to_string(fields.size()));
      continue;
    }
    StepRecord r;
    r.reaction_id = trim(fields[0]);
    r.rxn_smiles = trim(fields[2]);
    r.tag = fields.size() > 3 ? trim(fields[3]) : "";
    r.line = lineno;
    if (r.reaction_id.empty()) {
      skip("empty reaction id");
      continue;
    }
    try {
      std::size_t used = 0;
      r.step_index = std::stoi(fields[1], &used);
      if (trim(fields[1].substr(used)) != "")
        throw std::invalid_argument("trailing text");
    } catch (const std::exception &) {
      skip("step index '" + fields[1] + "' is not an integer");
      continue;
    }
    if (r.rxn_smiles.find(">>") == std::string::npos) {
      skip("reaction SMILES lacks '>>'");
      continue;
    }
    out.records.push_back(std::move(r));
  }

  std::map<std::string, int> first;
  for (const StepRecord &r: out.records)
    first.emplace(r.reaction_id, static_cast<int>(first.size()));
  std::stable_sort(out.records.begin(), out.records.end(),
                   [&](const StepRecord &a, const StepRecord &b) {
                     int fa = first[a.reaction_id], fb = first[b.reaction_id];
                     if (fa != fb)
                       return fa < fb;
                     return a.step_index < b.step_index;
                   });
  return out;
}

CorpusLoad load_corpus(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open corpus " + path);
  return read_corpus(in);
}

void write_corpus(std::ostream &out, const std::vector<StepRecord> &records) {
  out << "# reaction_id\tstep_index\trxn_smiles\ttag\n";
  for (const StepRecord &r: records)
    out << r.reaction_id << '\t' << r.step_index << '\t' << r.rxn_smiles
        << '\t' << r.tag << '\n';
}

const char *to_string(RejectReason reason) {
  switch (reason) {
  case RejectReason::kParse:
    return "parse";
  case RejectReason::kMapping:
    return "mapping";
  case RejectReason::kBEMatrix:
    return "be_matrix";
  case RejectReason::kElectronSum:
    return "electron_sum";
  case RejectReason::kChemistry:
    return "chemistry";
  case RejectReason::kKekulization:
    return "kekulization";
  case RejectReason::kPathwayIntegrity:
    return "pathway_integrity";
  }
  return "unknown";
}

namespace {

// Map -> atomic number; throws on duplicates or unmapped heavy atoms.
std::map<int, int> side_maps(const MolGraph &mol, const char *side) {
  std::map<int, int> maps;
  for (const Atom &a: mol.atoms()) {
    if (a.atom_map == 0) {
      if (a.atomic_number != 1)
        throw StepError(RejectReason::kMapping,
                        std::string("unmapped heavy atom on ") + side
                            + " side");
      continue;
    }
    if (!maps.emplace(a.atom_map, a.atomic_number).second)
      throw StepError(RejectReason::kMapping,
                      "duplicate atom map " + std::to_string(a.atom_map)
                          + " on " + side + " side");
  }
  return maps;
}

BEMatrix encode_side(const MolGraph &mol, const PeriodicTable &table) {
  try {
    return build_be(mol, 0, table);
  } catch (const KekulizationFailure &e) {
    throw StepError(RejectReason::kKekulization, e.what());
  } catch (const ValenceError &e) {
    throw StepError(RejectReason::kBEMatrix, e.what());
  } catch (const BEError &e) {
    throw StepError(RejectReason::kBEMatrix, e.what());
  }
}

}  // namespace

PreparedStep prepare_step(const StepRecord &record,
                          const PeriodicTable &table) {
  ReactionSmiles rxn;
  try {
    rxn = parse_reaction_smiles(record.rxn_smiles, table);
  } catch (const SmilesError &e) {
    throw StepError(RejectReason::kParse, e.what());
  } catch (const ValenceError &e) {
    throw StepError(RejectReason::kChemistry, e.what());
  }

  auto rmaps = side_maps(rxn.reactants, "reactant");
  auto pmaps = side_maps(rxn.products, "product");
  if (rmaps != pmaps)
    throw StepError(RejectReason::kMapping,
                    "atom maps are not a bijection between the two sides");

  PreparedStep out;
  out.record = record;
  out.reactant = encode_side(rxn.reactants, table);
  out.product = encode_side(rxn.products, table);
  if (out.reactant.atoms != out.product.atoms)
    throw StepError(RejectReason::kMapping,
                    "unmapped hydrogens change host between the two sides");

  for (const BEMatrix *be: { &out.reactant, &out.product }) {
    IntMatrix m = be->active();
    if ((m.array() < 0).any() || m != m.transpose())
      throw StepError(RejectReason::kBEMatrix,
                      "matrix is negative or asymmetric");
  }
  if (out.reactant.total() != out.product.total())
    throw StepError(RejectReason::kElectronSum,
                    "electron totals differ: "
                        + std::to_string(out.reactant.total()) + " vs "
                        + std::to_string(out.product.total()));

  for (const BEMatrix *be: { &out.reactant, &out.product }) {
    Reconstruction r = reconstruct(*be, table);
    if (!r.ok())
      throw StepError(RejectReason::kChemistry,
                      std::string(be == &out.reactant ? "reactant" : "product")
                          + ": " + r.detail);
    std::string smi = canonical_smiles(r.graph, false, table);
    (be == &out.reactant ? out.reactant_smiles : out.product_smiles) = smi;
  }
  return out;
}

CleanResult clean(const std::vector<StepRecord> &records,
                  const PeriodicTable &table) {
  CleanResult out;
  std::vector<std::string> order;
  std::map<std::string, std::vector<const StepRecord *>> groups;
  for (const StepRecord &r: records) {
    auto [it, fresh] = groups.try_emplace(r.reaction_id);
    if (fresh)
      order.push_back(r.reaction_id);
    it->second.push_back(&r);
  }
  for (const std::string &id: order) {
    const auto &steps = groups[id];
    std::vector<std::optional<StepError>> errors(steps.size());
    bool failed = false;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      try {
        prepare_step(*steps[k], table);
      } catch (const StepError &e) {
        errors[k] = e;
        failed = true;
      }
    }
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (!failed)
        out.accepted.push_back(*steps[k]);
      else if (errors[k])
        out.rejected.push_back({ *steps[k], errors[k]->reason(),
                                 errors[k]->what() });
      else
        out.rejected.push_back({ *steps[k], RejectReason::kPathwayIntegrity,
                                 "another step of reaction " + id
                                     + " was rejected" });
    }
  }
  return out;
}

void write_rejections(std::ostream &out,
                      const std::vector<Rejection> &rejected) {
  out << "# line\treaction_id\tstep_index\treason\tdetail\n";
  for (const Rejection &r: rejected)
    out << r.record.line << '\t' << r.record.reaction_id << '\t'
        << r.record.step_index << '\t' << to_string(r.reason) << '\t'
        << r.detail << '\n';
}

CorpusSplit split_corpus(const std::vector<StepRecord> &records,
                         const SplitRatios &ratios, std::uint64_t seed) {
  const double ratio[3] = { ratios.train, ratios.val, ratios.test };
  if (std::any_of(std::begin(ratio), std::end(ratio),
                  [](double r) { return r < 0; })
      || std::abs(ratio[0] + ratio[1] + ratio[2] - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must be nonnegative and sum to 1");

  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const StepRecord &r: records)
    if (seen.insert(r.reaction_id).second)
      ids.push_back(r.reaction_id);
  const int total = static_cast<int>(ids.size());
  const int parts = static_cast<int>(
      std::count_if(std::begin(ratio), std::end(ratio),
                    [](double r) { return r > 0; }));
  if (total < parts)
    throw std::invalid_argument("need at least " + std::to_string(parts)
                                + " reactions to split, found "
                                + std::to_string(total));

  Rng rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  int count[3];
  count[0] = static_cast<int>(std::lround(total * ratio[0]));
  count[1] = static_cast<int>(std::lround(total * ratio[1]));
  count[0] = std::min(count[0], total);
  count[1] = std::min(count[1], total - count[0]);
  count[2] = total - count[0] - count[1];
  if (ratio[2] == 0 && count[2] > 0) {
    count[0] += count[2];
    count[2] = 0;
  }
  // Nonempty ratios always receive at least one reaction.
  for (int p = 1; p < 3; ++p)
    if (ratio[p] > 0 && count[p] == 0) {
      int donor = count[0] > 1 ? 0 : (p == 1 ? 2 : 1);
      --count[donor];
      ++count[p];
    }

  std::map<std::string, int> part;
  for (int i = 0; i < total; ++i)
    part[ids[i]] = i < count[0] ? 0 : (i < count[0] + count[1] ? 1 : 2);
  CorpusSplit out;
  for (const StepRecord &r: records) {
    int p = part[r.reaction_id];
    (p == 0 ? out.train : p == 1 ? out.val : out.test).push_back(r);
  }
  return out;
}

namespace {

struct Formula {
  std::map<int, int> atoms;  // hydrogens included
  int charge = 0;
};

Formula formula(const MolGraph &mol) {
  Formula f;
  for (const Atom &a: mol.atoms()) {
    ++f.atoms[a.atomic_number];
    if (a.hydrogens > 0)
      f.atoms[1] += a.hydrogens;
    f.charge += a.formal_charge;
  }
  return f;
}

}  // namespace

PkaTable::PkaTable(std::vector<PkaEntry> entries)
    : entries_(std::move(entries)) { }

PkaTable PkaTable::parse(std::istream &in, const PeriodicTable &table) {
  std::vector<PkaEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#')
      continue;
    auto f = split_tabs(line);
    auto where = "pKa table line " + std::to_string(lineno);
    if (f.size() != 3)
      throw std::runtime_error(where + ": expected acid, base, pKa");
    MolGraph acid = parse_smiles(trim(f[0]), table);
    MolGraph base = parse_smiles(trim(f[1]), table);
    Formula fa = formula(acid), fb = formula(base);
    fb.atoms[1] += 1;
    if (fb.atoms[1] == 0)
      fb.atoms.erase(1);
    if (fa.atoms[1] == 0)
      fa.atoms.erase(1);
    if (fa.atoms != fb.atoms || fa.charge != fb.charge + 1)
      throw std::runtime_error(where
                               + ": base is not the acid minus one proton");
    PkaEntry e;
    e.acid = canonical_smiles(acid, false, table);
    e.base = canonical_smiles(base, false, table);
    try {
      e.pka = std::stod(f[2]);
    } catch (const std::exception &) {
      throw std::runtime_error(where + ": pKa '" + f[2] + "' is not a number");
    }
    entries.push_back(std::move(e));
  }
  return PkaTable(std::move(entries));
}

PkaTable PkaTable::load(const std::string &path, const PeriodicTable &table) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open pKa table " + path);
  return parse(in, table);
}

const PkaEntry *PkaTable::as_acid(const std::string &species) const {
  for (const PkaEntry &e: entries_)
    if (e.acid == species)
      return &e;
  return nullptr;
}

const PkaEntry *PkaTable::as_base(const std::string &species) const {
  for (const PkaEntry &e: entries_)
    if (e.base == species)
      return &e;
  return nullptr;
}

std::optional<Partner> select_partner(const std::vector<std::string> &pool,
                                      const PkaTable &pka, PartnerNeed need,
                                      double threshold) {
  for (const std::string &s: pool) {
    if (need == PartnerNeed::kAcid) {
      const PkaEntry *e = pka.as_acid(s);
      if (e && e->pka < threshold)
        return Partner { s, e->base, e->pka };
    } else {
      const PkaEntry *e = pka.as_base(s);
      if (e && e->pka > threshold)
        return Partner { s, e->acid, e->pka };
    }
  }
  return std::nullopt;
}

namespace {

std::set<int> maps_of(const MolGraph &mol) {
  std::set<int> out;
  for (const Atom &a: mol.atoms())
    if (a.atom_map > 0)
      out.insert(a.atom_map);
  return out;
}

std::string side_text(const std::string &rxn, bool products) {
  auto arrow = rxn.find(">>");
  return products ? rxn.substr(arrow + 2) : rxn.substr(0, arrow);
}

}  // namespace

std::vector<StepRecord> ensure_equivalents(const std::vector<StepRecord> &path,
                                           const std::string &species,
                                           int count,
                                           const PeriodicTable &table) {
  std::vector<StepRecord> out = path;
  const std::string target = canonicalize(species, false, table);
  int carried = 0;
  for (std::size_t k = 1; k < out.size() && carried < count; ++k) {
    ReactionSmiles prev = parse_reaction_smiles(out[k - 1].rxn_smiles, table);
    std::set<int> prev_maps = maps_of(prev.products);
    MolGraph reactants =
        parse_smiles(side_text(out[k].rxn_smiles, false), table);
    for (const MolGraph &comp: reactants.split_components()) {
      if (carried >= count)
        break;
      if (canonical_smiles(comp, false, table) != target)
        continue;
      std::set<int> maps = maps_of(comp);
      bool fresh = !maps.empty()
                   && std::none_of(maps.begin(), maps.end(), [&](int m) {
                        return prev_maps.count(m) > 0;
                      });
      if (!fresh)
        continue;
      const std::string copy = canonical_smiles(comp, true, table);
      for (std::size_t j = 0; j < k; ++j) {
        const std::string &rxn = out[j].rxn_smiles;
        out[j].rxn_smiles = side_text(rxn, false) + "." + copy + ">>"
                            + side_text(rxn, true) + "." + copy;
      }
      ++carried;
    }
  }
  for (const StepRecord &r: out)
    prepare_step(r, table);
  return out;
}

}  // namespace beflow
