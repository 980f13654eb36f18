//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_PERIODIC_TABLE_H_
#define BEFLOW_PERIODIC_TABLE_H_

#include <string>
#include <string_view>
#include <vector>

namespace beflow {

/**
 * How an element's valence is judged. Duet and octet elements are held to a
 * strict electron ceiling (2 or 8); expanded elements may take the
 * hypervalent forms listed in their valence table; metals are only required
 * to keep a nonnegative lone-pair count.
 */
enum class ValenceClass {
  kDuet,
  kOctet,
  kExpanded,
  kMetal,
};

struct Element {
  std::string symbol;
  int atomic_number = 0;
  int valence_electrons = 0;
  std::vector<int> allowed_valences;  // neutral atom, ascending
  bool aromatic_capable = false;
  ValenceClass valence_class = ValenceClass::kOctet;

  bool is_hydrogen() const { return atomic_number == 1; }
  bool is_metal() const { return valence_class == ValenceClass::kMetal; }
};

class PeriodicTable {
public:
  PeriodicTable() = default;
  explicit PeriodicTable(std::vector<Element> elements);

  // H, Li, B, C, N, O, F, Na, Mg, Si, P, S, Cl, K, Zn, Br, Pd, Ag, I
  static const PeriodicTable &standard();

  // Tab-separated: symbol, Z, valence electrons, comma-separated valences,
  // aromatic flag (0/1), class (duet|octet|expanded|metal). '#' starts a
  // comment line.
  static PeriodicTable load(const std::string &path);
  static PeriodicTable parse(std::string_view text);

  const Element *find(std::string_view symbol) const;
  const Element *find(int atomic_number) const;
  const Element &at(int atomic_number) const;

  // Position of the element in table order; the model's one-hot index.
  int index_of(int atomic_number) const;

  const std::vector<Element> &elements() const { return elements_; }
  int size() const { return static_cast<int>(elements_.size()); }

  /**
   * Valences permitted for an atom of this element carrying the given formal
   * charge. Neutral atoms use the configured list. Charged main-group atoms
   * follow the isoelectronic rule: with e = valence electrons - charge the
   * primary valence is e (e <= 4) or 8 - e (2 - e for hydrogen), and
   * expanded-class elements additionally allow primary + 2k up to e.
   * Metals return 0..max(configured) + |charge|.
   */
  std::vector<int> allowed_valences(const Element &elem, int charge) const;

  // Largest |formal charge| a reconstructed atom may carry.
  static int max_abs_charge(const Element &elem);

private:
  std::vector<Element> elements_;
  std::vector<int> index_by_z_;
};

}  // namespace beflow

#endif  // BEFLOW_PERIODIC_TABLE_H_
