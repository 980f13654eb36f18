//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "beflow/dataio.h"
#include "beflow/smiles.h"

namespace {

using namespace beflow;

StepRecord rec(const std::string &id, int step, const std::string &rxn,
               const std::string &tag = "t") {
  StepRecord r;
  r.reaction_id = id;
  r.step_index = step;
  r.rxn_smiles = rxn;
  r.tag = tag;
  return r;
}

const char *kProtonTransfer = "[OH:1][H:3].[OH-:2]>>[OH-:1].[H:3][OH:2]";

std::string data_path(const char *name) {
  return std::string(BEFLOW_DATA_DIR) + "/" + name;
}

std::map<std::string, int> reaction_steps(const std::vector<StepRecord> &rs) {
  std::map<std::string, int> out;
  for (const StepRecord &r: rs)
    ++out[r.reaction_id];
  return out;
}

}  // namespace

TEST_CASE("reading corpora") {
  SUBCASE("empty input") {
    std::istringstream in("");
    CorpusLoad c = read_corpus(in);
    CHECK(c.records.empty());
    CHECK(c.skipped == 0);
  }
  SUBCASE("three well-formed lines") {
    std::istringstream in(std::string("# comment\n")
                          + "r1\t1\t" + kProtonTransfer + "\tpt\n\n"
                          + "r2\t2\tC>>C\tE\n"
                          + "r2\t1\tO>>O\tE\n");
    CorpusLoad c = read_corpus(in);
    REQUIRE(c.records.size() == 3);
    CHECK(c.records[0].reaction_id == "r1");
    CHECK(c.records[0].line == 2);
    CHECK(c.records[0].tag == "pt");
    CHECK(c.records[1].reaction_id == "r2");
    CHECK(c.records[1].step_index == 1);
    CHECK(c.records[2].step_index == 2);
  }
  SUBCASE("malformed lines are skipped with diagnostics") {
    std::istringstream in("r1\t1\tCO\tE\nr1\tx\tC>>C\tE\nr1\t1\nr2\t1\tC>>C\tE\n");
    CorpusLoad c = read_corpus(in);
    CHECK(c.records.size() == 1);
    CHECK(c.skipped == 3);
    REQUIRE(c.diagnostics.size() == 3);
    CHECK(c.diagnostics[0].find("line 1") != std::string::npos);
  }
  SUBCASE("write and read back") {
    std::vector<StepRecord> rs { rec("a", 1, kProtonTransfer, "pt"),
                                 rec("a", 2, "O>>O", "E") };
    std::ostringstream out;
    write_corpus(out, rs);
    std::istringstream in(out.str());
    CorpusLoad c = read_corpus(in);
    REQUIRE(c.records.size() == 2);
    CHECK(c.records[1].rxn_smiles == "O>>O");
  }
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.tsv"), std::runtime_error);
}

TEST_CASE("step preparation") {
  PreparedStep s = prepare_step(rec("a", 1, kProtonTransfer));
  CHECK(s.reactant.atoms == s.product.atoms);
  CHECK(s.reactant_smiles == canonicalize("O.[OH-]"));
  CHECK(s.product_smiles == canonicalize("O.[OH-]"));
  CHECK(s.reactant.total() == s.product.total());

  auto reason = [](const std::string &rxn) {
    try {
      prepare_step(rec("x", 1, rxn));
    } catch (const StepError &e) {
      return std::string(to_string(e.reason()));
    }
    return std::string("accepted");
  };
  CHECK(reason("[CH3:1][Br:1].[OH-:3]>>[CH3:1][OH:3].[Br-:1]") == "mapping");
  CHECK(reason("[CH3:1][Br:2].[OH-:3]>>[CH3:1][OH:3].[Br-:4]") == "mapping");
  CHECK(reason("[CH3:1]Br.[OH-:3]>>[CH3:1][OH:3].[Br-]") == "mapping");
  CHECK(reason("[CH3:1][Br:2].[OH-:3]>>[CH3:1][OH:3].[Br:2]") == "electron_sum");
  CHECK(reason("[CH3:1][Br:2].[OH-:3]>>[CH3:1][OH:3].[Br-:2]") == "accepted");
  CHECK(reason("[CH3:1][Br:2]>>[CH3:1(") == "parse");
  CHECK(reason("[cH:1]1[cH:2][cH:3][cH:4][cH:5]1>>[cH:1]1[cH:2][cH:3][cH:4][cH:5]1")
        == "kekulization");
}

TEST_CASE("cleaning drops whole pathways") {
  std::vector<StepRecord> rs {
    rec("good", 1, kProtonTransfer),
    rec("good", 2, "[OH-:1].[H:3][OH:2]>>[OH-:1].[H:3][OH:2]", "E"),
    rec("bad", 1, "[CH3:1][Br:2].[OH-:3]>>[CH3:1][OH:3].[Br-:2]"),
    rec("bad", 2, "[CH3:1][OH:3].[Br-:2]>>[CH3:1][OH:3].[Br-:2]"),
    rec("bad", 3, "[cH:1]1[cH:2][cH:3][cH:4][cH:5]1>>[cH:1]1[cH:2][cH:3][cH:4][cH:5]1"),
    rec("bad", 4, "[CH3:1][OH:3].[Br-:2]>>[CH3:1][OH:3].[Br-:2]"),
    rec("dup", 1, "[CH3:1][Br:1].[OH-:3]>>[CH3:1][OH:3].[Br-:1]"),
  };
  CleanResult c = clean(rs);
  CHECK(c.accepted.size() == 2);
  CHECK(c.rejected.size() == 5);
  std::map<std::string, std::vector<std::string>> reasons;
  for (const Rejection &r: c.rejected)
    reasons[r.record.reaction_id].push_back(to_string(r.reason));
  CHECK(reasons["bad"]
        == std::vector<std::string> { "pathway_integrity", "pathway_integrity",
                                      "kekulization", "pathway_integrity" });
  CHECK(reasons["dup"] == std::vector<std::string> { "mapping" });

  CleanResult again = clean(c.accepted);
  CHECK(again.accepted.size() == c.accepted.size());
  CHECK(again.rejected.empty());

  std::ostringstream out;
  write_rejections(out, c.rejected);
  CHECK(out.str().find("kekulization") != std::string::npos);
}

TEST_CASE("bundled toy corpus is fully accepted") {
  CorpusLoad load = load_corpus(data_path("toy_corpus.tsv"));
  CHECK(load.skipped == 0);
  CHECK(load.records.size() >= 200);
  CleanResult c = clean(load.records);
  CHECK(c.rejected.empty());
  CHECK(c.accepted.size() == load.records.size());
}

TEST_CASE("splits by reaction") {
  std::vector<StepRecord> rs;
  for (int i = 0; i < 100; ++i)
    for (int s = 1; s <= 1 + i % 3; ++s)
      rs.push_back(rec("r" + std::to_string(i), s, kProtonTransfer));

  CorpusSplit a = split_corpus(rs, { 0.89, 0.01, 0.10 }, 42);
  CHECK(reaction_steps(a.train).size() == 89);
  CHECK(reaction_steps(a.val).size() == 1);
  CHECK(reaction_steps(a.test).size() == 10);
  CHECK(a.train.size() + a.val.size() + a.test.size() == rs.size());

  std::set<std::string> seen;
  for (const auto *part: { &a.train, &a.val, &a.test })
    for (const auto &[id, n]: reaction_steps(*part)) {
      CHECK(seen.insert(id).second);
      CHECK(n == 1 + std::stoi(id.substr(1)) % 3);
    }

  CorpusSplit b = split_corpus(rs, { 0.89, 0.01, 0.10 }, 42);
  CHECK(reaction_steps(b.test) == reaction_steps(a.test));
  CorpusSplit c = split_corpus(rs, { 0.89, 0.01, 0.10 }, 43);
  CHECK(reaction_steps(c.test) != reaction_steps(a.test));

  CHECK_THROWS_AS(split_corpus({ rs[0] }, { 0.89, 0.01, 0.10 }, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(split_corpus(rs, { 0.5, 0.1, 0.1 }, 1), std::invalid_argument);
}

TEST_CASE("bundled pKa table") {
  PkaTable t = PkaTable::load(data_path("pka_table.tsv"));
  CHECK(t.entries().size() >= 20);
  const PkaEntry *acetic = t.as_acid(canonicalize("CC(=O)O"));
  REQUIRE(acetic);
  CHECK(acetic->pka == 4.76);
  CHECK(acetic->base == canonicalize("CC(=O)[O-]"));
  const PkaEntry *water = t.as_acid(canonicalize("O"));
  REQUIRE(water);
  CHECK(water->pka == 15.7);
  CHECK(t.as_base(canonicalize("[OH-]")) == water);

  std::istringstream bad("CC(=O)O\tCC(=O)O\t4.76\n");
  CHECK_THROWS_AS(PkaTable::parse(bad), std::runtime_error);
  std::istringstream nan("O\t[OH-]\tabc\n");
  CHECK_THROWS_AS(PkaTable::parse(nan), std::runtime_error);
}

TEST_CASE("partner selection") {
  PkaTable t = PkaTable::load(data_path("pka_table.tsv"));
  const std::string acetic = canonicalize("CC(=O)O"), water = canonicalize("O");
  auto p = select_partner({ acetic }, t, PartnerNeed::kAcid, kAlphaProtonPka);
  REQUIRE(p);
  CHECK(p->species == acetic);
  CHECK(p->conjugate == canonicalize("CC(=O)[O-]"));
  CHECK(p->pka == 4.76);
  CHECK_FALSE(select_partner({ water }, t, PartnerNeed::kAcid, kAlphaProtonPka));
  CHECK_FALSE(select_partner({}, t, PartnerNeed::kAcid, kAlphaProtonPka));

  // Pool order wins over strength.
  const std::string hcl = canonicalize("Cl");
  auto first = select_partner({ water, acetic, hcl }, t, PartnerNeed::kAcid, 9);
  REQUIRE(first);
  CHECK(first->species == acetic);

  const std::string hydroxide = canonicalize("[OH-]");
  const std::string acetate = canonicalize("CC(=O)[O-]");
  auto base = select_partner({ acetate, hydroxide }, t, PartnerNeed::kBase, 9);
  REQUIRE(base);
  CHECK(base->species == hydroxide);
  CHECK(base->conjugate == water);
}

TEST_CASE("carrying equivalents back through a pathway") {
  std::vector<StepRecord> path {
    rec("eq", 1,
        "[Cl:3][H:4].[Br:5][H:6].[OH-:10]>>[Cl-:3].[H:4][OH:10].[Br:5][H:6]"),
    rec("eq", 2,
        "[Cl-:3].[H:4][OH:10].[Br:5][H:6].[OH-:20]"
        ">>[Cl-:3].[H:4][OH:10].[Br-:5].[H:6][OH:20]"),
  };
  // Step 2's hydroxide appears from nowhere, so cleaning accepts each step
  // but the pathway does not chain.
  CHECK(clean(path).rejected.empty());

  std::vector<StepRecord> revised = ensure_equivalents(path, "[OH-]", 1);
  REQUIRE(revised.size() == 2);
  CHECK(revised[1].rxn_smiles == path[1].rxn_smiles);
  PreparedStep s1 = prepare_step(revised[0]), s2 = prepare_step(revised[1]);
  CHECK(s1.reactant.size() == prepare_step(path[0]).reactant.size() + 2);
  CHECK(s1.product_smiles == s2.reactant_smiles);
  // Hydroxide adds 6 lone electrons plus 2 x 2 for the O-H cell pair.
  CHECK(s1.reactant.total() == prepare_step(path[0]).reactant.total() + 10);
  CHECK(clean(revised).rejected.empty());

  CHECK(ensure_equivalents(path, "[Na+]", 1)[0].rxn_smiles == path[0].rxn_smiles);
  CHECK(ensure_equivalents(path, "[OH-]", 0)[0].rxn_smiles == path[0].rxn_smiles);
}
