//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beflow/smiles.h"

namespace beflow {

SmilesError::SmilesError(const std::string &msg, std::size_t offset)
    : std::runtime_error(msg + " at offset " + std::to_string(offset)),
      offset_(offset), message_(msg) { }

bool is_organic_subset(std::string_view symbol) {
  for (std::string_view s: { "B", "C", "N", "O", "P", "S", "F", "Cl", "Br",
                             "I" })
    if (s == symbol)
      return true;
  return false;
}

int default_implicit_hydrogens(const Element &elem, int bond_order_sum,
                               bool aromatic) {
  for (int v: elem.allowed_valences) {
    if (v < bond_order_sum)
      continue;
    if (!aromatic)
      return v - bond_order_sum;
    return v - bond_order_sum >= 1 ? v - bond_order_sum - 1 : 0;
  }
  return -1;
}

namespace {

struct RingOpening {
  int atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

struct AtomExtra {
  std::size_t offset;
  bool radical_given = false;
};

class Parser {
public:
  Parser(std::string_view text, const PeriodicTable &table,
         std::vector<std::string> *warnings)
      : text_(text), table_(table), warnings_(warnings) { }

  MolGraph run() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(') {
        if (prev_ < 0)
          fail("branch without a preceding atom");
        if (pending_)
          fail("bond symbol before branch");
        branches_.push_back({ prev_, pos_ });
        ++pos_;
      } else if (c == ')') {
        if (branches_.empty())
          fail("unmatched ')'");
        if (pending_)
          fail("dangling bond symbol");
        prev_ = branches_.back().first;
        branches_.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending_)
          fail("dangling bond symbol");
        if (!branches_.empty())
          fail("'.' inside a branch");
        prev_ = -1;
        ++pos_;
      } else if (is_bond_char(c)) {
        if (pending_)
          fail("consecutive bond symbols");
        pending_ = read_bond();
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ring_closure();
      } else if (c == '[') {
        add_atom(read_bracket_atom());
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '*') {
        add_atom(read_organic_atom());
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
    if (pending_)
      fail("dangling bond symbol");
    if (!branches_.empty())
      throw SmilesError("unclosed branch", branches_.back().second);
    if (!rings_.empty())
      throw SmilesError("unclosed ring " + std::to_string(rings_.begin()->first),
                        rings_.begin()->second.offset);
    finalize();
    return std::move(mol_);
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw SmilesError(msg, pos_);
  }

  void warn(const std::string &msg) {
    if (warnings_ != nullptr)
      warnings_->push_back(msg + " at offset " + std::to_string(pos_));
  }

  static bool is_bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '/'
           || c == '\\' || c == '$';
  }

  BondOrder read_bond() {
    char c = text_[pos_];
    BondOrder order = BondOrder::kSingle;
    switch (c) {
    case '-':
      break;
    case '=':
      order = BondOrder::kDouble;
      break;
    case '#':
      order = BondOrder::kTriple;
      break;
    case ':':
      order = BondOrder::kAromatic;
      break;
    case '/':
    case '\\':
      warn("directional bond ignored");
      break;
    default:
      fail("quadruple bonds are not supported");
    }
    ++pos_;
    return order;
  }

  const Element &lookup(std::string_view symbol, std::size_t at) const {
    const Element *e = table_.find(symbol);
    if (e == nullptr)
      throw SmilesError("unknown element '" + std::string(symbol) + "'", at);
    return *e;
  }

  Atom read_organic_atom() {
    std::size_t start = pos_;
    char c = text_[pos_];
    if (c == '*')
      fail("wildcard atoms are not supported");
    Atom atom;
    std::string symbol;
    if (std::islower(static_cast<unsigned char>(c))) {
      symbol = std::string(1, static_cast<char>(std::toupper(c)));
      if (symbol != "B" && symbol != "C" && symbol != "N" && symbol != "O"
          && symbol != "P" && symbol != "S")
        fail(std::string("unknown aromatic atom '") + c + "'");
      atom.aromatic = true;
      ++pos_;
    } else {
      if (pos_ + 1 < text_.size()
          && ((c == 'C' && text_[pos_ + 1] == 'l')
              || (c == 'B' && text_[pos_ + 1] == 'r'))) {
        symbol = std::string(text_.substr(pos_, 2));
        pos_ += 2;
      } else {
        symbol = std::string(1, c);
        ++pos_;
      }
      if (!is_organic_subset(symbol))
        throw SmilesError("element '" + symbol + "' must be bracketed", start);
    }
    const Element &e = lookup(symbol, start);
    if (atom.aromatic && !e.aromatic_capable)
      throw SmilesError("element '" + symbol + "' cannot be aromatic", start);
    atom.atomic_number = e.atomic_number;
    extras_.push_back({ start });
    return atom;
  }

  int read_int() {
    int v = 0;
    bool any = false;
    while (pos_ < text_.size()
           && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      any = true;
      ++pos_;
      if (v > 1000000)
        fail("number too large");
    }
    return any ? v : -1;
  }

  Atom read_bracket_atom() {
    std::size_t start = pos_;
    ++pos_;  // '['
    Atom atom;
    atom.bracket = true;
    AtomExtra extra { start };

    int iso = read_int();
    if (iso >= 0)
      atom.isotope = iso;

    if (pos_ >= text_.size())
      fail("unterminated bracket atom");
    std::size_t sym_at = pos_;
    std::string symbol;
    char c = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      atom.aromatic = true;
      if (pos_ + 1 < text_.size()
          && (text_.substr(pos_, 2) == "se" || text_.substr(pos_, 2) == "as")) {
        symbol = std::string(1, static_cast<char>(std::toupper(c)))
                 + text_[pos_ + 1];
        pos_ += 2;
      } else {
        symbol = std::string(1, static_cast<char>(std::toupper(c)));
        ++pos_;
      }
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      if (pos_ + 1 < text_.size()
          && std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        std::string two(text_.substr(pos_, 2));
        if (table_.find(two) != nullptr) {
          symbol = two;
          pos_ += 2;
        }
      }
      if (symbol.empty()) {
        symbol = std::string(1, c);
        ++pos_;
      }
    } else if (c == '*') {
      fail("wildcard atoms are not supported");
    } else {
      fail("expected element symbol");
    }
    const Element &e = lookup(symbol, sym_at);
    if (atom.aromatic && !e.aromatic_capable)
      throw SmilesError("element '" + symbol + "' cannot be aromatic", sym_at);
    atom.atomic_number = e.atomic_number;

    if (pos_ < text_.size() && text_[pos_] == '@') {
      warn("chirality ignored");
      while (pos_ < text_.size() && text_[pos_] == '@')
        ++pos_;
      while (pos_ < text_.size()
             && (std::isupper(static_cast<unsigned char>(text_[pos_]))
                 || std::isdigit(static_cast<unsigned char>(text_[pos_])))
             && text_[pos_] != 'H')
        ++pos_;
    }

    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      int h = read_int();
      atom.hydrogens = h < 0 ? 1 : h;
    }

    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      char sign = text_[pos_];
      int mag = 0;
      while (pos_ < text_.size() && text_[pos_] == sign) {
        ++mag;
        ++pos_;
      }
      int n = read_int();
      if (n >= 0) {
        if (mag != 1)
          fail("malformed charge");
        mag = n;
      }
      if (mag > 8)
        fail("charge out of range");
      atom.formal_charge = sign == '+' ? mag : -mag;
    }

    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      int r = read_int();
      if (r < 0)
        fail("expected radical count after '^'");
      atom.radical_electrons = r;
      extra.radical_given = true;
    }

    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      int m = read_int();
      if (m < 0)
        fail("expected atom map number");
      if (m == 0)
        fail("atom map 0 is reserved for unmapped atoms");
      atom.atom_map = m;
    }

    if (pos_ >= text_.size() || text_[pos_] != ']')
      fail("expected ']'");
    ++pos_;
    extras_.push_back(extra);
    return atom;
  }

  BondOrder implicit_order(int a, int b) const {
    return mol_.atom(a).aromatic && mol_.atom(b).aromatic
               ? BondOrder::kAromatic
               : BondOrder::kSingle;
  }

  void add_atom(const Atom &atom) {
    int idx = mol_.add_atom(atom);
    if (prev_ >= 0) {
      BondOrder order = pending_ ? *pending_ : implicit_order(prev_, idx);
      mol_.add_bond(prev_, idx, order);
    } else if (pending_) {
      fail("bond symbol without a preceding atom");
    }
    pending_.reset();
    prev_ = idx;
  }

  void ring_closure() {
    std::size_t start = pos_;
    int num;
    if (text_[pos_] == '%') {
      ++pos_;
      if (pos_ + 1 >= text_.size()
          || !std::isdigit(static_cast<unsigned char>(text_[pos_]))
          || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))
        fail("expected two digits after '%'");
      num = (text_[pos_] - '0') * 10 + (text_[pos_ + 1] - '0');
      pos_ += 2;
    } else {
      num = text_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0)
      throw SmilesError("ring closure without an atom", start);

    auto it = rings_.find(num);
    if (it == rings_.end()) {
      rings_[num] = { prev_, pending_, start };
      pending_.reset();
      return;
    }
    RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == prev_)
      throw SmilesError("ring closure to the same atom", start);
    std::optional<BondOrder> order = open.order;
    if (pending_) {
      if (order && *order != *pending_)
        throw SmilesError("conflicting ring closure bond symbols", start);
      order = pending_;
    }
    pending_.reset();
    if (mol_.find_bond(open.atom, prev_) >= 0)
      throw SmilesError("ring closure duplicates an existing bond", start);
    mol_.add_bond(open.atom, prev_,
                  order ? *order : implicit_order(open.atom, prev_));
  }

  void finalize() {
    for (int i = 0; i < mol_.num_atoms(); ++i) {
      Atom &atom = mol_.atom(i);
      const Element &e = table_.at(atom.atomic_number);
      const std::size_t at = extras_[i].offset;
      int s = mol_.bond_order_sum(i);

      if (!atom.bracket) {
        int h = default_implicit_hydrogens(e, s, atom.aromatic);
        if (h < 0)
          throw SmilesError("valence of " + e.symbol + " exceeded", at);
        atom.hydrogens = h;
        continue;
      }

      s += atom.hydrogens;
      auto allowed = table_.allowed_valences(e, atom.formal_charge);
      if (allowed.empty() || s > allowed.back())
        throw SmilesError("valence of " + e.symbol + " exceeded", at);

      int lone = e.valence_electrons - atom.formal_charge - s;
      if (atom.aromatic) {
        if (atom.radical_electrons != 0)
          throw SmilesError("radicals on aromatic atoms are not supported",
                            at);
        continue;
      }
      if (lone < 0)
        throw SmilesError("not enough electrons on " + e.symbol, at);
      if (extras_[i].radical_given) {
        if (atom.radical_electrons > lone
            || (lone - atom.radical_electrons) % 2 != 0)
          throw SmilesError("radical count inconsistent with electron count",
                            at);
      } else {
        atom.radical_electrons = lone % 2;
      }
    }
  }

  std::string_view text_;
  const PeriodicTable &table_;
  std::vector<std::string> *warnings_;

  std::size_t pos_ = 0;
  MolGraph mol_;
  std::vector<AtomExtra> extras_;
  int prev_ = -1;
  std::optional<BondOrder> pending_;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::map<int, RingOpening> rings_;
};

}  // namespace

MolGraph parse_smiles(std::string_view text, const PeriodicTable &table,
                      std::vector<std::string> *warnings) {
  return Parser(text, table, warnings).run();
}

ReactionSmiles parse_reaction_smiles(std::string_view text,
                                     const PeriodicTable &table) {
  std::size_t arrow = text.find(">>");
  if (arrow == std::string_view::npos) {
    std::size_t gt = text.find('>');
    throw SmilesError(gt == std::string_view::npos
                          ? "missing '>>' in reaction"
                          : "agents field is not supported",
                      gt == std::string_view::npos ? text.size() : gt);
  }
  if (text.find('>', arrow + 2) != std::string_view::npos)
    throw SmilesError("more than one '>>' in reaction",
                      text.find('>', arrow + 2));
  ReactionSmiles rxn;
  try {
    rxn.reactants = parse_smiles(text.substr(0, arrow), table);
  } catch (const SmilesError &e) {
    throw SmilesError("reactants: " + e.message(), e.offset());
  }
  try {
    rxn.products = parse_smiles(text.substr(arrow + 2), table);
  } catch (const SmilesError &e) {
    throw SmilesError("products: " + e.message(), e.offset() + arrow + 2);
  }
  return rxn;
}

}  // namespace beflow
