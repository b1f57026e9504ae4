#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mbtk/group.hpp"

namespace mbtk {

// Image of the cyclotomic character: a subgroup U of (Z/e)^x acting on G by
// g -> g^a. Over Q this is all of (Z/e)^x.
class CyclotomicAction {
 public:
  // Full (Z/e)^x, the base-field-Q case.
  static CyclotomicAction full(int exponent);
  // Subgroup generated by the given units mod e.
  static CyclotomicAction from_generators(int exponent,
                                          const std::vector<long>& gens);

  int exponent() const { return e_; }
  const std::vector<long>& units() const { return units_; }

 private:
  CyclotomicAction(int e, std::vector<long> units)
      : e_(e), units_(std::move(units)) {}
  int e_ = 1;
  std::vector<long> units_;  // sorted, closed under multiplication mod e
};

// K-conjugacy classes: orbits of conjugacy classes under g -> g^a for a in U.
// Returned as lists of conjugacy-class indices plus per-element lookup.
struct KClasses {
  std::vector<std::vector<int>> classes;  // each entry: conj-class indices
  std::vector<int> kclass_of_element;     // |G| entries
  std::vector<int> kclass_of_class;       // class_count entries
};

KClasses k_classes(const FiniteGroup& g, const CyclotomicAction& act);

// Weight function w : G -> Z_{>=0}, tabulated per element.
class WeightFunction {
 public:
  enum class Kind { Index, RamifiedPrimes, Custom };

  static WeightFunction index_weight(const FiniteGroup& g);
  static WeightFunction ramified_primes(const FiniteGroup& g);
  static WeightFunction custom(const FiniteGroup& g, std::vector<int> values);

  Kind kind() const { return kind_; }
  int operator()(ElemId e) const { return values_[e]; }
  const std::vector<int>& values() const { return values_; }

  // Wild-place rows carry their own discriminant exponent; the index weight
  // uses it, other weights are evaluated on the inertia generator.
  bool uses_wild_table_exponent() const { return kind_ == Kind::Index; }

 private:
  WeightFunction(Kind k, std::vector<int> v)
      : kind_(k), values_(std::move(v)) {}
  Kind kind_;
  std::vector<int> values_;
};

struct WeightViolation {
  ElemId a = 0;
  ElemId b = 0;
  std::string reason;
};

// Checks w(1) = 0 and constancy on K-conjugacy classes. Returns the first
// violating pair if any; never throws.
std::optional<WeightViolation> validate_weight(const FiniteGroup& g,
                                               const CyclotomicAction& act,
                                               const WeightFunction& w);

struct MalleAB {
  int a = 0;                       // minimal weight of a nonidentity element
  int b = 0;                       // number of minimal-weight K-classes
  std::vector<int> minimal_kclasses;  // indices into KClasses::classes
};

MalleAB malle_ab(const FiniteGroup& g, const CyclotomicAction& act,
                 const WeightFunction& w);

// True iff the minimal-weight elements generate G.
bool min_weight_gen_check(const FiniteGroup& g, const WeightFunction& w);

// beta = min over proper normal subgroups N containing at least one
// minimal-weight element of #{minimal-weight K-classes disjoint from N}.
// Empty optional: no proper normal subgroup contains a minimal-weight
// element (the minimum would range over an empty set).
struct BetaResult {
  std::optional<int> beta;
  long normal_subgroups_checked = 0;
  long qualifying_subgroups = 0;
};

BetaResult beta_invariant(const FiniteGroup& g, const CyclotomicAction& act,
                          const WeightFunction& w,
                          long bound = FiniteGroup::kDefaultNormalEnumBound);

// |G^ab[m]| via invariant factors: prod_i gcd(d_i, m).
long ab_torsion_order(const FiniteGroup& g, long m);

}  // namespace mbtk
