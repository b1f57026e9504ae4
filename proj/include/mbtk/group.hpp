#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mbtk/perm.hpp"

namespace mbtk {

using ElemId = int;

class GroupTooLarge : public std::runtime_error {
 public:
  explicit GroupTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// Finite permutation group with cached structure. Elements are identified by
// dense ids; id 0 is always the identity. All caches are populated eagerly in
// the constructor, so a constructed FiniteGroup is immutable and safe to
// share across threads.
class FiniteGroup {
 public:
  static constexpr long kDefaultOrderBound = 100000;
  static constexpr long kDefaultNormalEnumBound = 2000;

  FiniteGroup(int degree, std::vector<Perm> generators,
              long order_bound = kDefaultOrderBound);

  int degree() const { return degree_; }
  long order() const { return static_cast<long>(elements_.size()); }
  const std::vector<Perm>& elements() const { return elements_; }
  const std::vector<Perm>& generators() const { return generators_; }
  const std::vector<ElemId>& generator_ids() const { return generator_ids_; }

  ElemId id_of(const Perm& p) const;
  const Perm& perm(ElemId e) const { return elements_[e]; }

  ElemId mul(ElemId a, ElemId b) const;
  ElemId inv(ElemId a) const { return inverse_[a]; }
  ElemId pow(ElemId a, long e) const;
  int element_order(ElemId a) const { return element_order_[a]; }
  int exponent() const { return exponent_; }
  bool is_abelian() const { return abelian_; }
  bool is_transitive() const;

  // n - #cycles of the underlying permutation.
  int index_of(ElemId a) const;

  // --- conjugacy structure ---
  int class_count() const { return static_cast<int>(classes_.size()); }
  const std::vector<std::vector<ElemId>>& conjugacy_classes() const {
    return classes_;
  }
  int class_of(ElemId e) const { return class_of_[e]; }
  ElemId class_rep(int c) const { return classes_[c].front(); }

  // --- abelianization ---
  // Invariant factors d_1 | d_2 | ... of G^ab; empty for the trivial group.
  const std::vector<long>& ab_invariants() const { return ab_invariants_; }
  long ab_order() const;
  const std::vector<ElemId>& commutator_subgroup() const {
    return commutator_subgroup_;
  }

  // --- subgroup machinery ---
  // Closure of a subset, as a sorted id list (identity always included).
  std::vector<ElemId> subgroup_closure(const std::vector<ElemId>& seed) const;

  // All normal subgroups, as sorted id lists, |G| <= bound required.
  // Computed as joins of normal closures of conjugacy classes.
  std::vector<std::vector<ElemId>> normal_subgroups(
      long bound = kDefaultNormalEnumBound) const;

  // All subgroups; intended for small |G| only (pairs machinery, Moebius).
  std::vector<std::vector<ElemId>> all_subgroups(long bound = 64) const;

  // Closure of a closed subgroup mask extended by one element; |G| <= 64.
  uint64_t mask_closure(uint64_t closed_mask, ElemId extra) const;

  // BFS provenance from the closure: element e = word_from(e) * gen(word_gen(e)),
  // with word_from(0) = -1. Lets a candidate generator assignment be extended
  // to the whole group in one pass.
  ElemId word_from(ElemId e) const { return word_from_[e]; }
  int word_gen(ElemId e) const { return word_gen_[e]; }

 private:
  void close_elements(long order_bound);
  void build_conjugacy();
  void build_abelianization();

  int degree_ = 0;
  std::vector<Perm> generators_;
  std::vector<ElemId> generator_ids_;
  std::vector<Perm> elements_;
  std::unordered_map<Perm, ElemId, PermHash> index_;
  std::vector<ElemId> inverse_;
  std::vector<int> element_order_;
  std::vector<uint16_t> mul_table_;  // only when order <= kMulTableLimit
  static constexpr long kMulTableLimit = 1024;
  int exponent_ = 1;
  bool abelian_ = true;

  std::vector<ElemId> word_from_;
  std::vector<int> word_gen_;

  std::vector<std::vector<ElemId>> classes_;
  std::vector<int> class_of_;

  std::vector<long> ab_invariants_;
  std::vector<ElemId> commutator_subgroup_;
};

// Direct product acting on the disjoint union of the two domains.
FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);

// Image subgroup id-set membership helper: sorted-vector lookup.
bool contains_id(const std::vector<ElemId>& sorted_ids, ElemId e);

}  // namespace mbtk
