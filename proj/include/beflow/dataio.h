//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_DATAIO_H_
#define BEFLOW_DATAIO_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beflow/be_matrix.h"
#include "beflow/periodic_table.h"

namespace beflow {

struct StepRecord {
  std::string reaction_id;
  int step_index = 0;
  std::string rxn_smiles;  // mapped reactants>>mapped products
  std::string tag;
  int line = 0;  // 1-based source line, 0 when built in memory
};

struct CorpusLoad {
  std::vector<StepRecord> records;
  std::vector<std::string> diagnostics;  // one per skipped line
  int skipped = 0;
};

/**
 * Tab-separated corpus: reaction_id, step_index, rxn_smiles, tag. Blank
 * lines and lines starting with '#' are ignored; malformed lines are
 * skipped with a diagnostic. Records are returned sorted by (reaction_id in
 * order of first appearance, step_index).
 */
CorpusLoad read_corpus(std::istream &in);
// Throws std::runtime_error when the file cannot be opened.
CorpusLoad load_corpus(const std::string &path);
void write_corpus(std::ostream &out, const std::vector<StepRecord> &records);

enum class RejectReason {
  kParse,
  kMapping,
  kBEMatrix,
  kElectronSum,
  kChemistry,
  kKekulization,
  kPathwayIntegrity,
};

const char *to_string(RejectReason reason);

class StepError: public std::runtime_error {
public:
  StepError(RejectReason reason, const std::string &what)
      : std::runtime_error(what), reason_(reason) { }

  RejectReason reason() const { return reason_; }

private:
  RejectReason reason_;
};

// A record decoded into aligned reactant and product matrices.
struct PreparedStep {
  StepRecord record;
  BEMatrix reactant;
  BEMatrix product;
  std::string reactant_smiles;  // canonical, maps stripped
  std::string product_smiles;
};

/**
 * Run every per-step check: parse; unique maps on each side with the same
 * map set on both sides and every heavy atom mapped; both sides encode to
 * valid matrices over the same atom list; equal electron totals; both sides
 * reconstruct to chemically valid species. Throws StepError.
 */
PreparedStep prepare_step(const StepRecord &record,
                          const PeriodicTable &table
                          = PeriodicTable::standard());

struct Rejection {
  StepRecord record;
  RejectReason reason;
  std::string detail;
};

struct CleanResult {
  std::vector<StepRecord> accepted;
  std::vector<Rejection> rejected;
};

// prepare_step on every record; a reaction with any failing step is
// rejected whole, its other steps tagged pathway_integrity.
CleanResult clean(const std::vector<StepRecord> &records,
                  const PeriodicTable &table = PeriodicTable::standard());

void write_rejections(std::ostream &out,
                      const std::vector<Rejection> &rejected);

struct SplitRatios {
  double train = 0.89;
  double val = 0.01;
  double test = 0.10;
};

struct CorpusSplit {
  std::vector<StepRecord> train;
  std::vector<StepRecord> val;
  std::vector<StepRecord> test;
};

/**
 * Split by reaction id. Reactions are shuffled under the seed; the first
 * round(R * train) go to train, the next round(R * val) to validation, the
 * rest to test. Throws std::invalid_argument when the ratios do not sum to
 * 1 or there are fewer reactions than nonempty partitions.
 */
CorpusSplit split_corpus(const std::vector<StepRecord> &records,
                         const SplitRatios &ratios, std::uint64_t seed);

struct PkaEntry {
  std::string acid;  // canonical SMILES
  std::string base;
  double pka = 0;
};

// Standardized pKa assigned to a carbonyl alpha proton.
inline constexpr double kAlphaProtonPka = 9.0;

class PkaTable {
public:
  PkaTable() = default;
  explicit PkaTable(std::vector<PkaEntry> entries);

  // TSV acid, base, pKa; '#' comments. Entries are canonicalized and each
  // base must equal its acid minus one proton.
  static PkaTable load(const std::string &path,
                       const PeriodicTable &table = PeriodicTable::standard());
  static PkaTable parse(std::istream &in,
                        const PeriodicTable &table = PeriodicTable::standard());

  const std::vector<PkaEntry> &entries() const { return entries_; }
  const PkaEntry *as_acid(const std::string &species) const;
  const PkaEntry *as_base(const std::string &species) const;

private:
  std::vector<PkaEntry> entries_;
};

enum class PartnerNeed { kAcid, kBase };

struct Partner {
  std::string species;
  std::string conjugate;
  double pka = 0;  // of the acid form
};

/**
 * First pool species (in pool order) able to serve: an acid whose pKa is
 * below threshold, or a base whose conjugate acid's pKa is above it.
 */
std::optional<Partner> select_partner(const std::vector<std::string> &pool,
                                      const PkaTable &pka, PartnerNeed need,
                                      double threshold);

/**
 * Carry fresh copies of a species back through a pathway. A copy is fresh
 * at step k when its atom maps do not occur in step k-1's products; up to
 * count such copies are added unchanged to both sides of every earlier
 * step, so each step can consume an equivalent that was present from the
 * start. Every revised step is re-checked with prepare_step; a failure
 * throws StepError.
 */
std::vector<StepRecord> ensure_equivalents(const std::vector<StepRecord> &path,
                                           const std::string &species,
                                           int count,
                                           const PeriodicTable &table
                                           = PeriodicTable::standard());

}  // namespace beflow

#endif  // BEFLOW_DATAIO_H_
