#include "mbtk/series.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace mbtk {

SeriesContext::SeriesContext(const FiniteGroup& g, WeightFunction w,
                             LocalConditions sigma, BaseFieldProfile base,
                             WildTableSet wild)
    : g_(&g),
      w_(std::move(w)),
      sigma_(std::move(sigma)),
      base_(base),
      wild_(std::move(wild)) {
  ab_torsion_ = ab_torsion_order(g, base_.mu);
}

LocalHomSet SeriesContext::hom_set_at(const Place& v) const {
  // An unramified-only override at a wild place needs no table: the |G|
  // unramified homs are canonical.
  if (!v.archimedean() && g_->order() % v.p == 0 &&
      wild_.find(v.p) == wild_.end()) {
    if (const SigmaOverride* o = sigma_.override_for(v);
        o && !o->use_explicit_rows && o->rule == SigmaRule::UnramifiedOnly) {
      LocalHomSet set;
      set.place = v;
      set.from_table = false;
      for (ElemId x = 0; x < g_->order(); ++x)
        set.homs.push_back(LocalHom{{x, 0}, 0, 0, 0, true, false});
      set.generator_orders = {g_->exponent(), 1};
      set.inertia_generators = {1};
      set.torsion_coordinates = {0, 0};
      return set;
    }
  }
  return local_hom_set(*g_, v, w_, &wild_, base_.mu);
}

const std::vector<Rat>& SeriesContext::factor_at(const Place& v) const {
  if (v.archimedean())
    throw std::logic_error("factor_at is for finite places");
  const long e = g_->exponent();
  const long mod = std::lcm(e, std::max(sigma_.residue_modulus, 1L));
  const bool cacheable =
      sigma_.override_for(v) == nullptr && g_->order() % v.p != 0;
  auto& cache = cacheable ? tame_factor_cache_ : special_factor_cache_;
  const long key = cacheable ? v.q % mod : v.p;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  LocalHomSet set = hom_set_at(v);
  auto rows = sigma_.allowed_rows(set);
  auto coeffs = euler_factor(*g_, set, rows, w_);
  return cache.emplace(key, std::move(coeffs)).first->second;
}

Rat SeriesContext::moment_prefactor() const {
  return make_rat(g_->order(), ab_torsion_);
}

long SeriesContext::archimedean_sigma_product() const {
  long prod = 1;
  for (int i = 0; i < base_.real_places; ++i) {
    LocalHomSet set = hom_set_at(Place::real());
    prod *= static_cast<long>(sigma_.allowed_rows(set).size());
  }
  for (int i = 0; i < base_.complex_places; ++i) {
    LocalHomSet set = hom_set_at(Place::complex());
    prod *= static_cast<long>(sigma_.allowed_rows(set).size());
  }
  return prod;
}

Rat SeriesContext::archimedean_multiplier() const {
  Rat m(archimedean_sigma_product(), 1);
  for (int i = 0; i < base_.infinite_places(); ++i) m /= g_->order();
  return m;
}

namespace {

struct FactorTerms {
  Rat constant;                       // coefficient of t^0
  std::vector<std::pair<int, Rat>> ramified;  // (exponent k >= 1, coefficient)
};

FactorTerms split_factor(const std::vector<Rat>& coeffs) {
  FactorTerms f;
  f.constant = coeffs.empty() ? Rat(0) : coeffs[0];
  for (size_t k = 1; k < coeffs.size(); ++k)
    if (coeffs[k] != 0) f.ramified.emplace_back(static_cast<int>(k), coeffs[k]);
  return f;
}

void require_admissible(const SeriesContext& ctx) {
  auto rep = admissibility_check(ctx.sigma(), ctx.group());
  if (!rep.admissible) throw NonAdmissibleSigma(rep.reason);
}

void require_wild_tables(const SeriesContext& ctx, long X) {
  for (long p : primes_up_to(std::min<long>(X, ctx.group().order()))) {
    if (ctx.group().order() % p != 0 || p > X) continue;
    // probes for a usable hom set; throws WildDataMissing if absent
    (void)ctx.hom_set_at(Place::finite(p));
  }
}

// Serial reference: in-place descending convolution per place. With constant
// term 1 only the multiples of q can change, so the walk is restricted to
// them; a constant term below 1 (an overriding condition set) forces the
// full-range pass.
void sieve_place_serial(std::vector<Rat>& a, long q, const FactorTerms& f) {
  const long X = static_cast<long>(a.size()) - 1;
  const bool scale = f.constant != 1;
  if (!scale) {
    for (long t = X / q; t >= 1; --t) {
      const long n = t * q;
      Rat v = a[n];
      for (const auto& [k, c] : f.ramified) {
        long qk = 1;
        bool overflow = false;
        for (int i = 0; i < k; ++i) {
          if (qk > X / q) {
            overflow = true;
            break;
          }
          qk *= q;
        }
        if (overflow || qk > n || n % qk != 0) continue;
        v += c * a[n / qk];
      }
      a[n] = std::move(v);
    }
    return;
  }
  for (long n = X; n >= 1; --n) {
    Rat v = f.constant * a[n];
    for (const auto& [k, c] : f.ramified) {
      long qk = 1;
      bool overflow = false;
      for (int i = 0; i < k; ++i) {
        if (qk > X / q) {
          overflow = true;
          break;
        }
        qk *= q;
      }
      if (overflow || qk > n || n % qk != 0) continue;
      v += c * a[n / qk];
    }
    a[n] = std::move(v);
  }
}

// OpenMP kernel in two phases. Small primes (and overridden places with a
// constant term below 1) go one at a time with the chain iterations shared
// across threads. Primes above sqrt(X) with constant term 1 have pairwise
// disjoint target sets {m q : m <= X/q} whose source entries a[m], m < q,
// are never targets, so the whole batch runs in a single parallel loop.
void sieve_all_places_parallel(std::vector<Rat>& a,
                               const std::vector<std::pair<long, FactorTerms>>& factors) {
  const long X = static_cast<long>(a.size()) - 1;
  long sqrt_x = 1;
  while ((sqrt_x + 1) * (sqrt_x + 1) <= X) ++sqrt_x;

  std::vector<const std::pair<long, FactorTerms>*> small, large;
  for (const auto& qf : factors) {
    if (qf.first > X) {
      if (qf.second.constant != 1) small.push_back(&qf);
      continue;
    }
    (qf.first <= sqrt_x || qf.second.constant != 1 ? small : large)
        .push_back(&qf);
  }

#pragma omp parallel
  {
    std::vector<long> chain;
    for (const auto* qf : small) {
      const auto& [q, f] = *qf;
      const bool scale = f.constant != 1;
      if (q > X) {
#pragma omp for schedule(static)
        for (long n = 1; n <= X; ++n) a[n] *= f.constant;
        continue;
      }
      const long m_limit = scale ? X : X / q;
#pragma omp for schedule(static)
      for (long m = 1; m <= m_limit; ++m) {
        if (m % q == 0) continue;
        chain.clear();
        for (long n = m; n <= X; n *= q) {
          chain.push_back(n);
          if (n > X / q) break;
        }
        //走 down the chain in place: entries below the write index are old
        for (size_t j = chain.size(); j-- > 0;) {
          if (j == 0 && !scale) break;
          Rat& v = a[chain[j]];
          if (scale) v *= f.constant;
          for (const auto& [k, c] : f.ramified)
            if (static_cast<size_t>(k) <= j) v += c * a[chain[j - k]];
        }
      }
    }
#pragma omp for schedule(dynamic, 16)
    for (size_t i = 0; i < large.size(); ++i) {
      const auto& [q, f] = *large[i];
      const Rat* c1 = nullptr;
      for (const auto& [k, c] : f.ramified)
        if (k == 1) c1 = &c;
      if (!c1) continue;  // q^2 > X, higher exponents cannot land
      for (long m = 1; m <= X / q; ++m)
        if (a[m] != 0) a[m * q] += *c1 * a[m];
    }
  }
}

}  // namespace

std::vector<Rat> dirichlet_coeffs(const SeriesContext& ctx, long X,
                                  bool parallel) {
  require_admissible(ctx);
  require_wild_tables(ctx, X);
  std::vector<Rat> a(X + 1, Rat(0));
  if (X >= 1) a[1] = 1;
  std::vector<std::pair<long, FactorTerms>> factors;
  for (long p : primes_up_to(X)) {
    FactorTerms f = split_factor(ctx.factor_at(Place::finite(p)));
    if (f.ramified.empty() && f.constant == 1) continue;
    factors.emplace_back(p, std::move(f));
  }
  if (parallel) {
    sieve_all_places_parallel(a, factors);
  } else {
    for (const auto& [p, f] : factors) sieve_place_serial(a, p, f);
  }
  return a;
}

std::vector<Rat> dirichlet_coeffs_oracle(const SeriesContext& ctx, long X) {
  require_admissible(ctx);
  require_wild_tables(ctx, X);
  // collect ramified contributions per place of norm <= X
  struct PlaceTerms {
    long q;
    std::vector<std::pair<long, Rat>> options;  // (q^k, coefficient)
  };
  std::vector<PlaceTerms> places;
  for (long p : primes_up_to(X)) {
    const auto& coeffs = ctx.factor_at(Place::finite(p));
    FactorTerms f = split_factor(coeffs);
    if (f.constant != 1)
      throw std::logic_error(
          "coefficient oracle requires constant term 1 at every place");
    if (f.ramified.empty()) continue;
    PlaceTerms t;
    t.q = p;
    for (const auto& [k, c] : f.ramified) {
      double contrib = std::pow(static_cast<double>(p), k);
      if (contrib <= static_cast<double>(X) + 0.5)
        t.options.emplace_back(static_cast<long>(std::llround(contrib)), c);
    }
    if (!t.options.empty()) places.push_back(std::move(t));
  }
  std::vector<Rat> a(X + 1, Rat(0));
  a[1] = 1;
  // depth-first over "choose a subset of places, one ramified option each"
  std::function<void(size_t, long, const Rat&)> descend =
      [&](size_t i, long n, const Rat& weight) {
        for (size_t j = i; j < places.size(); ++j) {
          for (const auto& [qk, c] : places[j].options) {
            if (qk > X / n) continue;
            Rat w = weight * c;
            a[n * qk] += w;
            descend(j + 1, n * qk, w);
          }
        }
      };
  descend(0, 1, Rat(1));
  return a;
}

Rat partial_sum(const SeriesContext& ctx, const std::vector<Rat>& coeffs,
                long X) {
  if (X + 1 > static_cast<long>(coeffs.size()))
    throw std::invalid_argument("partial_sum: X beyond sieved range");
  Rat s(0);
  for (long n = 1; n <= X; ++n) s += coeffs[n];
  return ctx.moment_prefactor() * ctx.archimedean_multiplier() * s;
}

Prediction predict(const SeriesContext& ctx, long p_max) {
  require_admissible(ctx);
  require_wild_tables(ctx, p_max);
  for (const auto& o : ctx.sigma().overrides)
    if (o.p > p_max)
      throw std::invalid_argument(
          "prediction requires every overridden place below p_max");
  if (ctx.sigma().default_rule != SigmaRule::All &&
      !(ctx.sigma().residue_modulus > 0 && ctx.sigma().residue_classes.empty()))
    throw std::invalid_argument(
        "prediction requires trivial local conditions at all but finitely "
        "many places");
  const FiniteGroup& g = ctx.group();
  auto act = CyclotomicAction::full(g.exponent());
  auto ab = malle_ab(g, act, ctx.weight());
  Prediction pred;
  pred.a = ab.a;
  pred.b = ab.b;
  pred.minimal_kclasses = ab.minimal_kclasses;
  pred.p_max = p_max;

  const BaseFieldProfile& bf = ctx.base();
  double lead = std::pow(bf.zeta_residue, ab.b);
  double fact = 1.0;
  for (int i = 2; i < ab.b; ++i) fact *= i;  // (b-1)!
  lead /= std::pow(static_cast<double>(ab.a), ab.b - 1) * fact *
          static_cast<double>(ctx.torsion_order()) *
          std::pow(static_cast<double>(g.order()), bf.unit_rank);
  lead *= static_cast<double>(ctx.archimedean_sigma_product());

  double log_product = 0.0;
  for (long p : primes_up_to(p_max)) {
    const auto& coeffs = ctx.factor_at(Place::finite(p));
    double local = 0.0;
    const double pinv = 1.0 / static_cast<double>(p);
    for (size_t k = 0; k < coeffs.size(); ++k)
      local += to_double(coeffs[k]) *
               std::pow(pinv, static_cast<double>(k) / ab.a);
    log_product += ab.b * std::log1p(-pinv) + std::log(local);
  }
  pred.c = lead * std::exp(log_product);
  pred.c_residue_lowered = pred.c / bf.zeta_residue;
  pred.printed_forms_agree =
      std::abs(pred.c - pred.c_residue_lowered) <=
      1e-12 * std::max(std::abs(pred.c), 1.0);

  // Tail of the regularized product beyond p_max. Write, for p = r mod L,
  //   f_p = (1 - 1/p)^b (1 + A_r(p)),  A_r(p) = sum_k c_{r,k} p^{-k/a},
  // so log f_p = (c_{r,a} - b)/p + R_p. The remainder satisfies
  //   |R_p| <= T p^{-1-1/a} + (T^2 + b) p^{-2} / (2 (1 - m/P))
  // with T = max_r sum_k c_{r,k} and m = max(T, 1): the k > a part of A_r
  // is at most T p^{-1-1/a}, and the quadratic remainders of log(1+A) and
  // b log(1-1/p) are bounded by the p^{-2} term. Summed by integral
  // comparison. The 1/p part cancels exactly when c_{r,a} = b for every
  // class; otherwise it is only equidistribution-conditional and reported
  // separately.
  const long L =
      std::lcm(static_cast<long>(g.exponent()),
               std::max(ctx.sigma().residue_modulus, 1L));
  auto is_prime = [](long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  };
  bool constant_coeff = true;
  double max_coeff_dev = 0.0;
  double max_total = 0.0;
  for (long r = 0; r < L; ++r) {
    if (std::gcd(r, L) != 1) continue;
    long q = r;
    while (q < 2 || !is_prime(q) || g.order() % q == 0) q += L;
    LocalHomSet set = ctx.hom_set_at(Place::finite(q, q));
    auto rows = ctx.sigma().allowed_rows(set);
    auto coeffs = euler_factor(g, set, rows, ctx.weight());
    double lin = 0.0, total = 0.0;
    for (size_t k = 1; k < coeffs.size(); ++k) {
      total += to_double(coeffs[k]);
      if (static_cast<int>(k) == ab.a) lin = to_double(coeffs[k]);
    }
    if (std::abs(lin - ab.b) > 1e-12) constant_coeff = false;
    max_coeff_dev = std::max(max_coeff_dev, std::abs(lin - ab.b));
    max_total = std::max(max_total, total);
  }
  const double P = static_cast<double>(p_max);
  const double delta = 1.0 / ab.a;
  const double guard = 1.0 - std::max(max_total, 1.0) / P;
  const double quad = (max_total * max_total + ab.b) / (2.0 * std::max(guard, 0.5));
  pred.tail.rigorous =
      max_total * std::pow(P, -delta) / delta + quad / P;
  pred.tail.residue_constant = constant_coeff;
  pred.tail.conditional =
      constant_coeff ? 0.0 : 4.0 * max_coeff_dev / std::log(P);
  return pred;
}

std::vector<TauberianRow> tauberian_table(const SeriesContext& ctx,
                                          const Prediction& pred,
                                          const std::vector<Rat>& coeffs,
                                          const std::vector<long>& checkpoints) {
  std::vector<TauberianRow> rows;
  for (long x : checkpoints) {
    TauberianRow row;
    row.x = x;
    Rat exact = partial_sum(ctx, coeffs, x);
    row.partial = to_double(exact);
    row.partial_exact = to_string(exact);
    row.predicted = pred.c * std::pow(static_cast<double>(x), 1.0 / pred.a) *
                    std::pow(std::log(static_cast<double>(x)), pred.b - 1);
    row.ratio = row.predicted != 0.0 ? row.partial / row.predicted : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<DecayRow> decay_probe(const SeriesContext& ctx,
                                  const std::vector<long>& checkpoints) {
  auto rep = admissibility_check(ctx.sigma(), ctx.group());
  if (rep.admissible)
    throw std::invalid_argument(
        "decay_probe requires non-admissible local conditions");
  // Every factor here has denominator |G|, and the constant terms stay
  // below 1 at infinitely many places, so the array is kept as integer
  // numerators over a single running power of |G|.
  const long n_g = ctx.group().order();
  std::vector<DecayRow> rows;
  for (long X : checkpoints) {
    std::vector<Int> u(X + 1, Int(0));
    u[1] = 1;
    long places_used = 0;
    for (long p : primes_up_to(X)) {
      const auto& coeffs = ctx.factor_at(Place::finite(p));
      std::vector<std::pair<int, Int>> terms;  // (exponent, count)
      Int c0(0);
      for (size_t k = 0; k < coeffs.size(); ++k) {
        Rat scaled = coeffs[k] * n_g;
        if (scaled.get_den() != 1)
          throw std::logic_error("euler factor not |G|-integral");
        if (k == 0)
          c0 = scaled.get_num();
        else if (scaled != 0)
          terms.emplace_back(static_cast<int>(k), scaled.get_num());
      }
      ++places_used;
      for (long n = X; n >= 1; --n) {
        Int v = c0 * u[n];
        for (const auto& [k, c] : terms) {
          long qk = 1;
          bool over = false;
          for (int i = 0; i < k; ++i) {
            if (qk > X / p) {
              over = true;
              break;
            }
            qk *= p;
          }
          if (over || qk > n || n % qk != 0) continue;
          v += c * u[n / qk];
        }
        u[n] = std::move(v);
      }
    }
    Int total(0);
    for (long n = 1; n <= X; ++n) total += u[n];
    Rat value(total, pow_int(Int(n_g), static_cast<unsigned>(places_used)));
    value.canonicalize();
    value *= ctx.moment_prefactor() * ctx.archimedean_multiplier();
    DecayRow row;
    row.x = X;
    row.normalized_sum = to_double(value);
    row.exact = to_string(value);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mbtk
