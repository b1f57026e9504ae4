#include "mbtk/invariants.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace mbtk {

CyclotomicAction CyclotomicAction::full(int exponent) {
  std::vector<long> units;
  for (long a = 1; a <= exponent; ++a)
    if (std::gcd(a, static_cast<long>(exponent)) == 1) units.push_back(a % exponent);
  if (exponent == 1) units = {0};  // the unit 1 mod 1
  return CyclotomicAction(exponent, std::move(units));
}

CyclotomicAction CyclotomicAction::from_generators(int exponent,
                                                   const std::vector<long>& gens) {
  const long e = exponent;
  for (long g : gens)
    if (std::gcd(((g % e) + e) % e, e) != 1)
      throw std::invalid_argument("cyclotomic generator not a unit mod e");
  std::set<long> closure{1 % e};
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<long> cur(closure.begin(), closure.end());
    for (long a : cur)
      for (long g : gens) {
        long v = (a * (((g % e) + e) % e)) % e;
        if (closure.insert(v).second) changed = true;
      }
  }
  return CyclotomicAction(exponent, std::vector<long>(closure.begin(), closure.end()));
}

KClasses k_classes(const FiniteGroup& g, const CyclotomicAction& act) {
  if (act.exponent() != g.exponent())
    throw std::invalid_argument("cyclotomic action exponent " +
                                std::to_string(act.exponent()) +
                                " does not match exp(G) = " +
                                std::to_string(g.exponent()));
  const int nc = g.class_count();
  // union-find over conjugacy classes under class(rep) -> class(rep^a)
  std::vector<int> parent(nc);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int c = 0; c < nc; ++c) {
    ElemId rep = g.class_rep(c);
    for (long a : act.units()) {
      int d = g.class_of(g.pow(rep, a));
      int rc = find(c), rd = find(d);
      if (rc != rd) parent[std::max(rc, rd)] = std::min(rc, rd);
    }
  }
  KClasses out;
  std::vector<int> root_index(nc, -1);
  out.kclass_of_class.resize(nc);
  for (int c = 0; c < nc; ++c) {
    int r = find(c);
    if (root_index[r] < 0) {
      root_index[r] = static_cast<int>(out.classes.size());
      out.classes.emplace_back();
    }
    out.kclass_of_class[c] = root_index[r];
    out.classes[root_index[r]].push_back(c);
  }
  out.kclass_of_element.resize(g.order());
  for (ElemId e = 0; e < g.order(); ++e)
    out.kclass_of_element[e] = out.kclass_of_class[g.class_of(e)];
  return out;
}

WeightFunction WeightFunction::index_weight(const FiniteGroup& g) {
  if (!g.is_transitive())
    throw std::invalid_argument(
        "index weight requires a transitive permutation action");
  std::vector<int> v(g.order());
  for (ElemId e = 0; e < g.order(); ++e) v[e] = g.index_of(e);
  return WeightFunction(Kind::Index, std::move(v));
}

WeightFunction WeightFunction::ramified_primes(const FiniteGroup& g) {
  std::vector<int> v(g.order(), 1);
  v[0] = 0;
  return WeightFunction(Kind::RamifiedPrimes, std::move(v));
}

WeightFunction WeightFunction::custom(const FiniteGroup& g,
                                      std::vector<int> values) {
  if (static_cast<long>(values.size()) != g.order())
    throw std::invalid_argument("custom weight table size mismatch");
  return WeightFunction(Kind::Custom, std::move(values));
}

std::optional<WeightViolation> validate_weight(const FiniteGroup& g,
                                               const CyclotomicAction& act,
                                               const WeightFunction& w) {
  if (w(0) != 0)
    return WeightViolation{0, 0, "w(identity) must be 0"};
  for (ElemId e = 0; e < g.order(); ++e)
    if (w(e) < 0) return WeightViolation{e, e, "negative weight"};
  auto kc = k_classes(g, act);
  for (size_t k = 0; k < kc.classes.size(); ++k) {
    ElemId first = g.class_rep(kc.classes[k].front());
    for (int c : kc.classes[k])
      for (ElemId e : g.conjugacy_classes()[c])
        if (w(e) != w(first))
          return WeightViolation{first, e,
                                 "weight not constant on a K-conjugacy class"};
  }
  return std::nullopt;
}

MalleAB malle_ab(const FiniteGroup& g, const CyclotomicAction& act,
                 const WeightFunction& w) {
  if (g.order() <= 1)
    throw std::invalid_argument("Malle invariants undefined for the trivial group");
  if (auto bad = validate_weight(g, act, w))
    throw std::invalid_argument("invalid weight function: " + bad->reason);
  MalleAB out;
  out.a = -1;
  for (ElemId e = 1; e < g.order(); ++e)
    if (out.a < 0 || w(e) < out.a) out.a = w(e);
  auto kc = k_classes(g, act);
  for (size_t k = 0; k < kc.classes.size(); ++k) {
    ElemId rep = g.class_rep(kc.classes[k].front());
    if (rep != 0 && w(rep) == out.a)
      out.minimal_kclasses.push_back(static_cast<int>(k));
  }
  out.b = static_cast<int>(out.minimal_kclasses.size());
  return out;
}

bool min_weight_gen_check(const FiniteGroup& g, const WeightFunction& w) {
  if (g.order() <= 1) return true;
  int a = -1;
  for (ElemId e = 1; e < g.order(); ++e)
    if (a < 0 || w(e) < a) a = w(e);
  std::vector<ElemId> seed;
  for (ElemId e = 1; e < g.order(); ++e)
    if (w(e) == a) seed.push_back(e);
  return static_cast<long>(g.subgroup_closure(seed).size()) == g.order();
}

BetaResult beta_invariant(const FiniteGroup& g, const CyclotomicAction& act,
                          const WeightFunction& w, long bound) {
  auto ab = malle_ab(g, act, w);
  auto kc = k_classes(g, act);
  BetaResult out;
  auto normals = g.normal_subgroups(bound);
  for (const auto& n : normals) {
    if (static_cast<long>(n.size()) == g.order()) continue;  // proper only
    ++out.normal_subgroups_checked;
    bool has_min = false;
    for (ElemId e : n)
      if (e != 0 && w(e) == ab.a) {
        has_min = true;
        break;
      }
    if (!has_min) continue;
    ++out.qualifying_subgroups;
    int outside = 0;
    for (int k : ab.minimal_kclasses) {
      ElemId rep = g.class_rep(kc.classes[k].front());
      if (!contains_id(n, rep)) ++outside;
    }
    if (!out.beta || outside < *out.beta) out.beta = outside;
  }
  return out;
}

long ab_torsion_order(const FiniteGroup& g, long m) {
  if (m <= 0) throw std::invalid_argument("torsion order needs m > 0");
  long t = 1;
  for (long d : g.ab_invariants()) t *= std::gcd(d, m);
  return t;
}

}  // namespace mbtk
