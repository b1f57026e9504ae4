#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbtk/group.hpp"
#include "mbtk/invariants.hpp"
#include "mbtk/rational.hpp"

namespace mbtk {

enum class PlaceKind { Real, Complex, Finite };

struct Place {
  PlaceKind kind = PlaceKind::Finite;
  long p = 0;     // residue characteristic (finite places)
  long q = 0;     // residue field size (finite places)
  std::string label;

  static Place real() { return Place{PlaceKind::Real, 0, 0, "oo"}; }
  static Place complex() { return Place{PlaceKind::Complex, 0, 0, "oo_c"}; }
  static Place finite(long p, long q = 0) {
    return Place{PlaceKind::Finite, p, q == 0 ? p : q, std::to_string(p)};
  }

  bool archimedean() const { return kind != PlaceKind::Finite; }
  long norm() const { return archimedean() ? 1 : q; }
  bool operator==(const Place& o) const {
    return kind == o.kind && p == o.p && q == o.q;
  }
  bool operator<(const Place& o) const {
    if (archimedean() != o.archimedean()) return archimedean();
    if (norm() != o.norm()) return norm() < o.norm();
    return static_cast<int>(kind) < static_cast<int>(o.kind);
  }
};

// The built-in place stream for Q: one real place, then the rational primes
// in increasing order.
std::vector<Place> rational_places(long norm_limit);
std::vector<long> primes_up_to(long limit);

// One homomorphism G_{K_v} -> G, recorded through the images of the abstract
// generators of the local Galois group:
//   real place:      one generator (complex conjugation)
//   finite tame:     (Frobenius sigma, tame inertia generator tau),
//                    sigma tau sigma^-1 = tau^q
//   wild (from table): m generators as declared by the table
struct LocalHom {
  std::vector<ElemId> gen_images;
  ElemId inertia_gen = 0;   // generator of the inertia image; 0 if unramified
  int disc_exponent = 0;    // table value at wild places, ind-weight at tame
  ElemId torsion_image = 0; // image of the local |mu(K)|-torsion unit
  bool unramified = true;
  bool wild = false;
};

class WildDataMissing : public std::runtime_error {
 public:
  WildDataMissing(long p, const std::string& group)
      : std::runtime_error("wild data required for p=" + std::to_string(p) +
                           ", group " + group),
        p(p) {}
  long p;
};

// Wild-table rows for one (place, group) pair. Generator images refer to the
// target group by cycle notation in the file format; in memory they are ids.
struct WildTable {
  long p = 0;
  long q = 0;
  std::string group_spec;
  int generator_count = 0;
  // which generators span inertia (indices into gen_images)
  std::vector<int> inertia_generators;
  // abelian block data: order of each abstract generator in the
  // exponent-e local abelianization, and the torsion element written in
  // generator coordinates (used by the abelian engine)
  std::vector<long> generator_orders;
  std::vector<long> torsion_coordinates;
  std::vector<LocalHom> rows;
};

// Parses + validates a versioned wild-table JSON file against the group.
WildTable load_wild_table(const std::string& path, const FiniteGroup& g);
WildTable wild_table_from_json(const std::string& json_text, const FiniteGroup& g);

// Bundled tables: (p=2, C2) and (p=3, C3). The group argument must be the
// matching cyclic group.
WildTable bundled_wild_table_c2_at_2(const FiniteGroup& c2);
WildTable bundled_wild_table_c3_at_3(const FiniteGroup& c3);

// Keyed on residue characteristic.
using WildTableSet = std::map<long, WildTable>;

struct LocalHomSet {
  Place place;
  std::vector<LocalHom> homs;
  bool tame = false;
  bool from_table = false;
  // abelian block data (see WildTable); for tame places the generators are
  // (sigma, tau) with orders (e, gcd(q-1, e))
  std::vector<long> generator_orders;
  std::vector<int> inertia_generators;
  std::vector<long> torsion_coordinates;

  long unramified_count() const;
};

// Complete enumeration of Hom(G_{K_v}, G). Wild finite places (p | |G|)
// require a table. The weight function fixes tame disc exponents (w of the
// inertia generator). mu = |mu(K)| fixes the torsion column; at tame places
// the local mu-torsion is generated by tau^((q-1)/gcd(mu, q-1)), at wild
// places the column comes from the table.
LocalHomSet local_hom_set(const FiniteGroup& g, const Place& v,
                          const WeightFunction& w,
                          const WildTableSet* wild = nullptr, long mu = 2);

// Exponent of a hom under a weight function: 0 when unramified; the table's
// discriminant exponent at wild places when the weight is the index weight,
// w(inertia generator) otherwise.
int local_exponent(const LocalHom& h, const WeightFunction& w);

// ---- local conditions ----

// Default rules applied at every non-overridden place.
enum class SigmaRule {
  All,             // trivial condition, all homs allowed
  UnramifiedOnly,  // exactly the |G| unramified homs (admissible)
  SplitOnly,       // only the trivial hom (non-admissible)
  NoSplit,         // all homs except the trivial one (non-admissible)
};

struct SigmaOverride {
  long p = 0;            // finite place; -1 targets the real place
  SigmaRule rule = SigmaRule::All;
  std::vector<int> explicit_rows;  // alternative: explicit row indices
  bool use_explicit_rows = false;
};

struct LocalConditions {
  SigmaRule default_rule = SigmaRule::All;
  // optional residue-class restriction of the default rule: the rule applies
  // to finite places with q % modulus in classes, everywhere else All
  long residue_modulus = 0;
  std::vector<long> residue_classes;
  std::vector<SigmaOverride> overrides;

  bool default_rule_applies(const Place& v) const;
  const SigmaOverride* override_for(const Place& v) const;
  // Allowed row indices into the enumerated hom set at v.
  std::vector<int> allowed_rows(const LocalHomSet& set) const;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<long> exceptional_places;  // finitely many overridden places
  std::string reason;
};

// Admissible iff the default rule keeps all unramified homs; overrides are
// finitely many and only flagged.
AdmissibilityReport admissibility_check(const LocalConditions& sigma,
                                        const FiniteGroup& g);

// Euler factor at v: coefficient of t^k is #{allowed homs with exponent k}/|G|.
// Archimedean places give the constant polynomial |Sigma_v|/|G|.
std::vector<Rat> euler_factor(const FiniteGroup& g, const LocalHomSet& set,
                              const std::vector<int>& allowed_rows,
                              const WeightFunction& w);

}  // namespace mbtk
