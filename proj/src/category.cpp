#include "mbtk/category.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mbtk {

void FiniteLocalObject::validate() const {
  if (!group) throw std::invalid_argument("object without group");
  std::set<Place> seen;
  for (const auto& pd : data) {
    if (!seen.insert(pd.place).second)
      throw std::invalid_argument("duplicate place in object");
    for (ElemId e : pd.hom.gen_images)
      if (e < 0 || e >= group->order())
        throw std::invalid_argument("hom image outside the group");
  }
}

int FiniteLocalObject::finite_place_count() const {
  int n = 0;
  for (const auto& pd : data) n += pd.place.archimedean() ? 0 : 1;
  return n;
}

bool FiniteLocalObject::data_jointly_surjective() const {
  std::vector<ElemId> seed;
  for (const auto& pd : data)
    for (ElemId e : pd.hom.gen_images) seed.push_back(e);
  return static_cast<long>(group->subgroup_closure(seed).size()) ==
         group->order();
}

FiniteLocalObject make_object(const FiniteGroup& g,
                              const std::vector<std::pair<Place, int>>& rows,
                              const WeightFunction& w, const WildTableSet* wild,
                              long mu) {
  FiniteLocalObject obj;
  obj.group = &g;
  for (const auto& [place, row] : rows) {
    LocalHomSet set = local_hom_set(g, place, w, wild, mu);
    if (row < 0 || row >= static_cast<int>(set.homs.size()))
      throw std::invalid_argument("hom row out of range at " + place.label);
    PlaceData pd;
    pd.place = place;
    pd.hom = set.homs[row];
    pd.inertia_generators = set.inertia_generators;
    obj.data.push_back(std::move(pd));
  }
  obj.validate();
  return obj;
}

Rat moment_closed_form(const FiniteLocalObject& obj,
                       const BaseFieldProfile& base) {
  const FiniteGroup& g = *obj.group;
  long s_union = obj.finite_place_count() + base.infinite_places();
  Rat m = make_rat(1, ab_torsion_order(g, base.mu));
  for (long i = 0; i + 1 < s_union; ++i) m /= g.order();
  return m;
}

std::vector<std::vector<ElemId>> enumerate_homs(const FiniteGroup& source,
                                                const FiniteGroup& target) {
  const size_t k = source.generators().size();
  const long n = source.order();
  std::vector<std::vector<ElemId>> homs;
  std::vector<ElemId> assign(k, 0);
  std::vector<ElemId> image(n);
  while (true) {
    // extend the generator assignment along BFS words
    image[0] = 0;
    bool ok = true;
    for (ElemId e = 1; e < n; ++e)
      image[e] = target.mul(image[source.word_from(e)], assign[source.word_gen(e)]);
    // verify it is a homomorphism: image(x g) = image(x) image(g)
    for (ElemId x = 0; x < n && ok; ++x)
      for (size_t gi = 0; gi < k; ++gi) {
        ElemId xg = source.mul(x, source.generator_ids()[gi]);
        if (image[xg] != target.mul(image[x], assign[gi])) {
          ok = false;
          break;
        }
      }
    if (ok) homs.push_back(image);
    // next assignment
    size_t pos = 0;
    while (pos < k) {
      if (++assign[pos] < target.order()) break;
      assign[pos] = 0;
      ++pos;
    }
    if (pos == k) break;
  }
  return homs;
}

long epi_count_finite(const FiniteLocalObject& source,
                      const FiniteLocalObject& target) {
  source.validate();
  target.validate();
  const FiniteGroup& gs = *source.group;
  const FiniteGroup& gt = *target.group;
  if (gs.order() > 4096)
    throw GroupTooLarge("epi_count_finite brute force bound exceeded");

  // target places must be a subset of source places (S' <= S)
  std::map<Place, const PlaceData*> source_at;
  for (const auto& pd : source.data) source_at[pd.place] = &pd;
  for (const auto& pd : target.data)
    if (!source_at.count(pd.place)) return 0;

  std::set<Place> in_target;
  for (const auto& pd : target.data) in_target.insert(pd.place);

  long count = 0;
  for (const auto& image : enumerate_homs(gs, gt)) {
    // surjectivity
    std::set<ElemId> im(image.begin(), image.end());
    if (static_cast<long>(im.size()) != gt.order()) continue;
    bool ok = true;
    for (const auto& pd : target.data) {
      const PlaceData* spd = source_at[pd.place];
      if (spd->hom.gen_images.size() != pd.hom.gen_images.size()) {
        ok = false;
        break;
      }
      for (size_t i = 0; i < pd.hom.gen_images.size() && ok; ++i)
        if (image[spd->hom.gen_images[i]] != pd.hom.gen_images[i]) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;
    // inertia killed at source places outside the target's S'
    for (const auto& pd : source.data) {
      if (in_target.count(pd.place)) continue;
      for (int i : pd.inertia_generators)
        if (image[pd.hom.gen_images[i]] != 0) {
          ok = false;
          break;
        }
      if (!ok) break;
    }
    if (ok) ++count;
  }
  return count;
}

ProductAnalysis::ProductAnalysis(const FiniteGroup& g1, const FiniteGroup& g2)
    : g1_(g1), g2_(g2), prod_(direct_product(g1, g2)) {
  proj1_.resize(prod_.order());
  proj2_.resize(prod_.order());
  const int d1 = g1.degree();
  const int d2 = g2.degree();
  for (ElemId e = 0; e < prod_.order(); ++e) {
    const Perm& p = prod_.perm(e);
    std::vector<int> a(d1), b(d2);
    for (int i = 0; i < d1; ++i) a[i] = p(i);
    for (int i = 0; i < d2; ++i) b[i] = p(d1 + i) - d1;
    proj1_[e] = g1.id_of(Perm(std::move(a)));
    proj2_[e] = g2.id_of(Perm(std::move(b)));
  }
}

ElemId ProductAnalysis::pair_id(ElemId a, ElemId b) const {
  const Perm& pa = g1_.perm(a);
  const Perm& pb = g2_.perm(b);
  const int d1 = g1_.degree();
  std::vector<int> img(d1 + g2_.degree());
  for (int i = 0; i < d1; ++i) img[i] = pa(i);
  for (int i = 0; i < g2_.degree(); ++i) img[d1 + i] = d1 + pb(i);
  return prod_.id_of(Perm(std::move(img)));
}

namespace {

void check_same_places(const FiniteLocalObject& a, const FiniteLocalObject& b) {
  std::set<Place> sa, sb;
  for (const auto& pd : a.data) sa.insert(pd.place);
  for (const auto& pd : b.data) sb.insert(pd.place);
  if (sa != sb)
    throw std::invalid_argument("pair must carry local data at the same S");
}

std::vector<ElemId> generated_d(const ProductAnalysis& pa,
                                const FiniteLocalObject& a,
                                const FiniteLocalObject& b) {
  std::map<Place, const PlaceData*> b_at;
  for (const auto& pd : b.data) b_at[pd.place] = &pd;
  std::vector<ElemId> seed;
  for (const auto& pd : a.data) {
    const PlaceData* qd = b_at.at(pd.place);
    if (pd.hom.gen_images.size() != qd->hom.gen_images.size())
      throw std::invalid_argument("local data arity mismatch at a shared place");
    for (size_t i = 0; i < pd.hom.gen_images.size(); ++i)
      seed.push_back(pa.pair_id(pd.hom.gen_images[i], qd->hom.gen_images[i]));
  }
  return pa.product().subgroup_closure(seed);
}

bool projections_full(const ProductAnalysis& pa, const std::vector<ElemId>& sub,
                      long n1, long n2) {
  std::set<ElemId> p1, p2;
  for (ElemId e : sub) {
    p1.insert(pa.proj1(e));
    p2.insert(pa.proj2(e));
  }
  return static_cast<long>(p1.size()) == n1 && static_cast<long>(p2.size()) == n2;
}

}  // namespace

EpiProductResult epi_product_exists(const FiniteLocalObject& a,
                                    const FiniteLocalObject& b) {
  a.validate();
  b.validate();
  check_same_places(a, b);
  ProductAnalysis pa(*a.group, *b.group);
  const FiniteGroup& prod = pa.product();
  EpiProductResult res;
  res.product_order = prod.order();
  res.d = generated_d(pa, a, b);
  res.d_is_full = static_cast<long>(res.d.size()) == prod.order();
  if (res.d_is_full) {
    res.exists = true;
    return res;
  }
  res.exists = true;
  if (prod.order() <= 64) {
    // mask BFS over the supergroups of D, stopping at the first proper one
    // with surjective projections
    auto full_projections = [&](uint64_t mask) {
      std::set<ElemId> p1, p2;
      for (ElemId e = 0; e < prod.order(); ++e)
        if (mask >> e & 1) {
          p1.insert(pa.proj1(e));
          p2.insert(pa.proj2(e));
        }
      return static_cast<long>(p1.size()) == a.group->order() &&
             static_cast<long>(p2.size()) == b.group->order();
    };
    uint64_t d_mask = 0;
    for (ElemId e : res.d) d_mask |= uint64_t{1} << e;
    const uint64_t full_mask =
        prod.order() == 64 ? ~uint64_t{0} : (uint64_t{1} << prod.order()) - 1;
    std::set<uint64_t> seen{d_mask};
    std::vector<uint64_t> work{d_mask};
    while (!work.empty()) {
      uint64_t cur = work.back();
      work.pop_back();
      if (cur != full_mask && full_projections(cur)) {
        res.exists = false;
        break;
      }
      if (cur == full_mask) continue;
      for (ElemId e = 1; e < prod.order(); ++e) {
        if (cur >> e & 1) continue;
        uint64_t bigger = prod.mask_closure(cur, e);
        if (seen.insert(bigger).second) work.push_back(bigger);
      }
    }
    return res;
  }
  // general path
  std::set<std::vector<ElemId>> seen;
  std::vector<std::vector<ElemId>> work{res.d};
  seen.insert(res.d);
  while (!work.empty()) {
    std::vector<ElemId> cur = std::move(work.back());
    work.pop_back();
    if (static_cast<long>(cur.size()) < prod.order() &&
        projections_full(pa, cur, a.group->order(), b.group->order())) {
      res.exists = false;
      break;
    }
    if (static_cast<long>(cur.size()) == prod.order()) continue;
    for (ElemId e = 1; e < prod.order(); ++e) {
      if (contains_id(cur, e)) continue;
      std::vector<ElemId> seed(cur);
      seed.push_back(e);
      auto bigger = prod.subgroup_closure(seed);
      if (seen.insert(bigger).second) work.push_back(bigger);
    }
  }
  return res;
}

bool epi_product_oracle(const FiniteLocalObject& a, const FiniteLocalObject& b) {
  a.validate();
  b.validate();
  check_same_places(a, b);
  ProductAnalysis pa(*a.group, *b.group);
  const FiniteGroup& prod = pa.product();
  auto d = generated_d(pa, a, b);
  // candidate test objects: subgroups H of G1 x G2 whose corestricted data is
  // defined (D <= H) and whose structure maps are epimorphisms (surjective
  // projections); the universal morphism is the inclusion, an epimorphism
  // only for H = G1 x G2
  for (const auto& h : prod.all_subgroups(4096)) {
    if (static_cast<long>(h.size()) == prod.order()) continue;
    if (!std::includes(h.begin(), h.end(), d.begin(), d.end())) continue;
    if (projections_full(pa, h, a.group->order(), b.group->order())) return false;
  }
  return true;
}

E2MReport e2m_membership(const FiniteLocalObject& a, const FiniteLocalObject& b,
                         const BaseFieldProfile& base) {
  check_same_places(a, b);
  E2MReport rep;
  auto epi = epi_product_exists(a, b);
  rep.epi_product = epi.exists;

  // moment multiplicativity, verified from the closed form
  ProductAnalysis pa(*a.group, *b.group);
  FiniteLocalObject prod_obj;
  prod_obj.group = &pa.product();
  std::map<Place, const PlaceData*> b_at;
  for (const auto& pd : b.data) b_at[pd.place] = &pd;
  for (const auto& pd : a.data) {
    const PlaceData* qd = b_at.at(pd.place);
    PlaceData joint;
    joint.place = pd.place;
    joint.inertia_generators = pd.inertia_generators;
    for (size_t i = 0; i < pd.hom.gen_images.size(); ++i)
      joint.hom.gen_images.push_back(
          pa.pair_id(pd.hom.gen_images[i], qd->hom.gen_images[i]));
    prod_obj.data.push_back(std::move(joint));
  }
  rep.moment_of_product = moment_closed_form(prod_obj, base);
  rep.moment_product =
      moment_closed_form(a, base) * moment_closed_form(b, base);
  rep.moments_multiplicative = rep.moment_of_product == rep.moment_product;
  rep.in_e2m = rep.epi_product && rep.moments_multiplicative;

  if (!rep.in_e2m) {
    const FiniteGroup& prod = pa.product();
    std::set<ElemId> p1, p2;
    for (ElemId e : epi.d) {
      p1.insert(pa.proj1(e));
      p2.insert(pa.proj2(e));
    }
    rep.projection_failure =
        static_cast<long>(p1.size()) != a.group->order() ||
        static_cast<long>(p2.size()) != b.group->order();
    bool incl1 = true, incl2 = true;
    for (ElemId x = 0; x < a.group->order(); ++x)
      if (!contains_id(epi.d, pa.pair_id(x, 0))) {
        incl1 = false;
        break;
      }
    for (ElemId y = 0; y < b.group->order(); ++y)
      if (!contains_id(epi.d, pa.pair_id(0, y))) {
        incl2 = false;
        break;
      }
    rep.inclusion_failure = !incl1 && !incl2;
    (void)prod;
  }
  return rep;
}

}  // namespace mbtk
