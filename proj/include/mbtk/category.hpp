#pragma once

#include <optional>
#include <vector>

#include "mbtk/local.hpp"
#include "mbtk/series.hpp"

namespace mbtk {

// One place worth of local data attached to an object: the chosen hom plus
// which generator slots span inertia.
struct PlaceData {
  Place place;
  LocalHom hom;
  std::vector<int> inertia_generators;
};

// A finite group with finite local data: (G, S, phi).
struct FiniteLocalObject {
  const FiniteGroup* group = nullptr;
  std::vector<PlaceData> data;  // one entry per place of S, duplicate-free

  void validate() const;
  int finite_place_count() const;
  bool data_jointly_surjective() const;
};

FiniteLocalObject make_object(const FiniteGroup& g,
                              const std::vector<std::pair<Place, int>>& rows,
                              const WeightFunction& w,
                              const WildTableSet* wild = nullptr, long mu = 2);

// |G^ab[mu]|^-1 |G|^(-|S u P_oo| + 1), exact.
Rat moment_closed_form(const FiniteLocalObject& obj,
                       const BaseFieldProfile& base);

// All homomorphisms source -> target as full element-image tables.
std::vector<std::vector<ElemId>> enumerate_homs(const FiniteGroup& source,
                                                const FiniteGroup& target);

// Number of epimorphisms source -> target in the category: surjective group
// homomorphisms with pi phi_p = psi_p on the target's places and
// pi phi_p(I_p) = 1 at the source's remaining places.
long epi_count_finite(const FiniteLocalObject& source,
                      const FiniteLocalObject& target);

struct EpiProductResult {
  bool exists = false;        // universal-property decision
  bool d_is_full = false;     // the generated subgroup equals G1 x G2
  std::vector<ElemId> d;      // sorted ids in the product group
  long product_order = 0;
};

// The product group of a pair, with coordinate projections resolved.
class ProductAnalysis {
 public:
  ProductAnalysis(const FiniteGroup& g1, const FiniteGroup& g2);
  const FiniteGroup& product() const { return prod_; }
  ElemId pair_id(ElemId a, ElemId b) const;
  ElemId proj1(ElemId e) const { return proj1_[e]; }
  ElemId proj2(ElemId e) const { return proj2_[e]; }

 private:
  const FiniteGroup& g1_;
  const FiniteGroup& g2_;
  FiniteGroup prod_;
  std::vector<ElemId> proj1_, proj2_;
};

// Epi-product decision for objects over the same S. Computes
// D = <(phi_1 x phi_2)(G_{K_p}) : p in S> and decides existence: the
// epi-product exists iff no proper subgroup M with D <= M <= G1 x G2 has
// surjective projections onto both factors. D = G1 x G2 is the sufficient
// condition from the generated-subgroup criterion and is reported alongside.
EpiProductResult epi_product_exists(const FiniteLocalObject& a,
                                    const FiniteLocalObject& b);

// Independent check by direct universal-property enumeration over candidate
// test objects (all subgroups of the product carrying corestricted data).
bool epi_product_oracle(const FiniteLocalObject& a, const FiniteLocalObject& b);

struct E2MReport {
  bool in_e2m = false;
  bool epi_product = false;
  bool moments_multiplicative = false;
  // diagnosis for pairs outside E(2,M): which of the classification's two
  // failure modes hold for D
  bool projection_failure = false;  // rho_i(D) != G_i for some i
  bool inclusion_failure = false;   // iota_j(G_j) not within D for both j
  Rat moment_product{0};
  Rat moment_of_product{0};
};

E2MReport e2m_membership(const FiniteLocalObject& a, const FiniteLocalObject& b,
                         const BaseFieldProfile& base);

}  // namespace mbtk
