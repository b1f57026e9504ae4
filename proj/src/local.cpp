#include "mbtk/local.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace mbtk {

std::vector<long> primes_up_to(long limit) {
  std::vector<long> out;
  if (limit < 2) return out;
  std::vector<char> sieve(limit + 1, 1);
  sieve[0] = sieve[1] = 0;
  for (long i = 2; i * i <= limit; ++i)
    if (sieve[i])
      for (long j = i * i; j <= limit; j += i) sieve[j] = 0;
  for (long i = 2; i <= limit; ++i)
    if (sieve[i]) out.push_back(i);
  return out;
}

std::vector<Place> rational_places(long norm_limit) {
  std::vector<Place> out{Place::real()};
  for (long p : primes_up_to(norm_limit)) out.push_back(Place::finite(p));
  return out;
}

long LocalHomSet::unramified_count() const {
  long n = 0;
  for (const auto& h : homs) n += h.unramified ? 1 : 0;
  return n;
}

namespace {

LocalHomSet archimedean_homs(const FiniteGroup& g, const Place& v, long mu) {
  LocalHomSet set;
  set.place = v;
  if (v.kind == PlaceKind::Complex) {
    set.homs.push_back(LocalHom{{0}, 0, 0, 0, true, false});
    set.generator_orders = {1};
    set.inertia_generators = {};
    set.torsion_coordinates = {0};
    return set;
  }
  // real place: homs <-> elements of order dividing 2; mu(R) = {1,-1}, so
  // for even mu the torsion unit maps to complex conjugation itself
  const bool torsion_hits = (mu % 2 == 0);
  for (ElemId e = 0; e < g.order(); ++e) {
    if (g.mul(e, e) != 0) continue;
    LocalHom h;
    h.gen_images = {e};
    h.inertia_gen = e;
    h.disc_exponent = 0;
    h.torsion_image = torsion_hits ? e : 0;
    h.unramified = (e == 0);
    set.homs.push_back(std::move(h));
  }
  long c2 = std::gcd(2L, static_cast<long>(g.exponent()));
  set.generator_orders = {c2};
  set.inertia_generators = {0};
  set.torsion_coordinates = {(torsion_hits && c2 == 2) ? 1L : 0L};
  return set;
}

LocalHomSet tame_homs(const FiniteGroup& g, const Place& v,
                      const WeightFunction& w, long mu) {
  LocalHomSet set;
  set.place = v;
  set.tame = true;
  const long q = v.q;
  // the local mu-torsion is generated by zeta^((q-1)/gt) with
  // gt = gcd(mu, q-1); under tame reciprocity it lands on tau^((q-1)/gt)
  const long gt = std::gcd(mu, q - 1);
  const long texp = (q - 1) / std::max(gt, 1L);
  // pairs (x, y) with x y x^-1 = y^q; hom: Frobenius -> x, tame gen -> y
  for (ElemId x = 0; x < g.order(); ++x)
    for (ElemId y = 0; y < g.order(); ++y) {
      if (g.mul(g.mul(x, y), g.inv(x)) != g.pow(y, q)) continue;
      LocalHom h;
      h.gen_images = {x, y};
      h.inertia_gen = y;
      h.unramified = (y == 0);
      h.disc_exponent = h.unramified ? 0 : w(y);
      h.torsion_image = g.pow(y, texp);
      set.homs.push_back(std::move(h));
    }
  const long e = g.exponent();
  const long d = std::gcd(q - 1, e);
  set.generator_orders = {e, d};
  set.inertia_generators = {1};
  set.torsion_coordinates = {0, d > 0 ? texp % d : 0};
  return set;
}

void validate_table_rows(const WildTable& t, const FiniteGroup& g) {
  long unram = 0;
  for (const auto& h : t.rows) {
    if (static_cast<int>(h.gen_images.size()) != t.generator_count)
      throw std::invalid_argument("wild table row arity mismatch");
    bool inertia_trivial = true;
    for (int i : t.inertia_generators)
      if (h.gen_images[i] != 0) inertia_trivial = false;
    if (inertia_trivial != h.unramified)
      throw std::invalid_argument(
          "wild table row unramified flag contradicts inertia images");
    if (h.unramified != (h.disc_exponent == 0))
      throw std::invalid_argument(
          "wild table violates: disc exponent 0 iff unramified");
    if (h.unramified != (h.inertia_gen == 0))
      throw std::invalid_argument(
          "wild table violates: trivial inertia generator iff unramified");
    unram += h.unramified ? 1 : 0;
  }
  if (unram != g.order())
    throw std::invalid_argument(
        "wild table must contain exactly |G| unramified rows, got " +
        std::to_string(unram));
  // rows must be pairwise distinct as generator-image tuples
  auto rows = t.rows;
  std::sort(rows.begin(), rows.end(), [](const LocalHom& a, const LocalHom& b) {
    return a.gen_images < b.gen_images;
  });
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].gen_images == rows[i - 1].gen_images)
      throw std::invalid_argument("wild table contains duplicate rows");
}

}  // namespace

WildTable wild_table_from_json(const std::string& json_text,
                               const FiniteGroup& g) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (!j.contains("format_version"))
    throw std::invalid_argument("wild table file missing format_version");
  if (j.at("format_version").get<int>() != 1)
    throw std::invalid_argument("unsupported wild table format_version");
  WildTable t;
  t.p = j.at("p").get<long>();
  t.q = j.value("q", t.p);
  t.group_spec = j.at("group").get<std::string>();
  t.generator_count = j.at("generator_count").get<int>();
  t.inertia_generators = j.at("inertia_generators").get<std::vector<int>>();
  t.generator_orders = j.at("generator_orders").get<std::vector<long>>();
  t.torsion_coordinates = j.at("torsion_coordinates").get<std::vector<long>>();
  if (!j.value("torsion_column", true))
    throw std::invalid_argument("wild table must carry a torsion column");
  for (const auto& row : j.at("rows")) {
    LocalHom h;
    for (const auto& cyc : row.at("generator_images"))
      h.gen_images.push_back(g.id_of(parse_cycles(cyc.get<std::string>(), g.degree())));
    h.inertia_gen = g.id_of(parse_cycles(row.at("inertia_generator").get<std::string>(), g.degree()));
    h.disc_exponent = row.at("disc_exponent").get<int>();
    h.torsion_image = g.id_of(parse_cycles(row.at("torsion_image").get<std::string>(), g.degree()));
    h.unramified = (h.inertia_gen == 0) && h.disc_exponent == 0;
    h.wild = true;
    t.rows.push_back(std::move(h));
  }
  validate_table_rows(t, g);
  return t;
}

WildTable load_wild_table(const std::string& path, const FiniteGroup& g) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open wild table: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return wild_table_from_json(buf.str(), g);
}

WildTable bundled_wild_table_c2_at_2(const FiniteGroup& c2) {
  if (c2.order() != 2)
    throw std::invalid_argument("bundled table targets C2");
  const ElemId s = 1;  // the involution
  WildTable t;
  t.p = 2;
  t.q = 2;
  t.group_spec = "C2";
  t.generator_count = 3;
  // generators: classes of 2, -1, 5 in Q_2^x mod squares
  t.inertia_generators = {1, 2};
  t.generator_orders = {2, 2, 2};
  t.torsion_coordinates = {0, 1, 0};
  // The eight quadratic classes d of Q_2^x, as characters chi_d = (d, .)_2 on
  // the generators (2, -1, 5). Disc exponents: 0 for d in {1,5}, 2 for the
  // odd classes d = 3,7 mod 8, 3 for the even classes. Torsion image is
  // chi_d(-1). Rows are built from Hilbert symbols rather than transcribed.
  auto eps = [](long u) { return ((u - 1) / 2) % 2 != 0; };     // u odd
  auto omega = [](long u) { return ((u * u - 1) / 8) % 2 != 0; };  // u odd
  auto hilbert2 = [&](long a, long b) {
    // (a, b)_2 for a, b in Z_2-units times powers of 2; a = 2^al * u,
    // b = 2^be * v with u, v odd
    int al = 0, be = 0;
    long u = a, v = b;
    while (u % 2 == 0) {
      u /= 2;
      ++al;
    }
    while (v % 2 == 0) {
      v /= 2;
      ++be;
    }
    bool val = (eps(u) && eps(v));
    if (be % 2) val ^= omega(u);
    if (al % 2) val ^= omega(v);
    return val;  // true = -1
  };
  const std::vector<long> classes = {1, 5, -1, -5, 2, -2, 10, -10};
  auto nu_of = [](long d) {
    long u = d;
    int twos = 0;
    while (u % 2 == 0) {
      u /= 2;
      ++twos;
    }
    if (twos % 2 == 1) return 3;          // even class: e.g. Q_2(sqrt(2d'))
    long m8 = ((u % 8) + 8) % 8;
    if (m8 == 1) return 0;                // trivial class
    if (m8 == 5) return 0;                // unramified quadratic
    return 2;                             // u = 3, 7 mod 8
  };
  t.rows.clear();
  for (long d : classes) {
    LocalHom h;
    ElemId on2 = hilbert2(d, 2) ? s : 0;
    ElemId onm1 = hilbert2(d, -1) ? s : 0;
    ElemId on5 = hilbert2(d, 5) ? s : 0;
    h.gen_images = {on2, onm1, on5};
    h.disc_exponent = nu_of(d);
    h.unramified = (onm1 == 0 && on5 == 0);
    h.inertia_gen = h.unramified ? 0 : s;
    h.torsion_image = onm1;
    h.wild = true;
    t.rows.push_back(std::move(h));
  }
  validate_table_rows(t, c2);
  return t;
}

WildTable bundled_wild_table_c3_at_3(const FiniteGroup& c3) {
  if (c3.order() != 3)
    throw std::invalid_argument("bundled table targets C3");
  WildTable t;
  t.p = 3;
  t.q = 3;
  t.group_spec = "C3";
  t.generator_count = 2;
  // generators: class of 3 (uniformizer) and of 4 (principal unit) in
  // Q_3^x mod cubes; -1 is a cube, so the 2-torsion column is trivial
  t.inertia_generators = {1};
  t.generator_orders = {3, 3};
  t.torsion_coordinates = {0, 0};
  for (ElemId x = 0; x < 3; ++x)
    for (ElemId y = 0; y < 3; ++y) {
      LocalHom h;
      h.gen_images = {x, y};
      h.unramified = (y == 0);
      h.inertia_gen = y;
      h.disc_exponent = h.unramified ? 0 : 4;
      h.torsion_image = 0;
      h.wild = true;
      t.rows.push_back(std::move(h));
    }
  validate_table_rows(t, c3);
  return t;
}

LocalHomSet local_hom_set(const FiniteGroup& g, const Place& v,
                          const WeightFunction& w, const WildTableSet* wild,
                          long mu) {
  if (v.archimedean()) return archimedean_homs(g, v, mu);
  if (g.order() % v.p == 0) {
    if (wild) {
      auto it = wild->find(v.p);
      if (it != wild->end()) {
        LocalHomSet set;
        set.place = v;
        set.from_table = true;
        set.homs = it->second.rows;
        set.generator_orders = it->second.generator_orders;
        set.inertia_generators = it->second.inertia_generators;
        set.torsion_coordinates = it->second.torsion_coordinates;
        return set;
      }
    }
    throw WildDataMissing(v.p, "order " + std::to_string(g.order()));
  }
  return tame_homs(g, v, w, mu);
}

int local_exponent(const LocalHom& h, const WeightFunction& w) {
  if (h.unramified) return 0;
  if (h.wild && w.uses_wild_table_exponent()) return h.disc_exponent;
  return w(h.inertia_gen);
}

bool LocalConditions::default_rule_applies(const Place& v) const {
  if (default_rule == SigmaRule::All) return true;
  if (residue_modulus <= 0) return true;
  if (v.archimedean()) return false;
  long r = v.q % residue_modulus;
  return std::find(residue_classes.begin(), residue_classes.end(), r) !=
         residue_classes.end();
}

const SigmaOverride* LocalConditions::override_for(const Place& v) const {
  for (const auto& o : overrides) {
    if (v.archimedean() && o.p == -1) return &o;
    if (!v.archimedean() && o.p == v.p) return &o;
  }
  return nullptr;
}

namespace {

std::vector<int> rows_for_rule(const LocalHomSet& set, SigmaRule rule) {
  std::vector<int> rows;
  for (size_t i = 0; i < set.homs.size(); ++i) {
    const LocalHom& h = set.homs[i];
    bool keep = false;
    switch (rule) {
      case SigmaRule::All:
        keep = true;
        break;
      case SigmaRule::UnramifiedOnly:
        keep = h.unramified;
        break;
      case SigmaRule::SplitOnly: {
        keep = true;
        for (ElemId e : h.gen_images) keep = keep && (e == 0);
        break;
      }
      case SigmaRule::NoSplit: {
        bool trivial = true;
        for (ElemId e : h.gen_images) trivial = trivial && (e == 0);
        keep = !trivial;
        break;
      }
    }
    if (keep) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

}  // namespace

std::vector<int> LocalConditions::allowed_rows(const LocalHomSet& set) const {
  if (const SigmaOverride* o = override_for(set.place)) {
    if (o->use_explicit_rows) {
      for (int r : o->explicit_rows)
        if (r < 0 || r >= static_cast<int>(set.homs.size()))
          throw std::invalid_argument("sigma override row out of range");
      return o->explicit_rows;
    }
    return rows_for_rule(set, o->rule);
  }
  if (!default_rule_applies(set.place)) return rows_for_rule(set, SigmaRule::All);
  return rows_for_rule(set, default_rule);
}

AdmissibilityReport admissibility_check(const LocalConditions& sigma,
                                        const FiniteGroup& g) {
  (void)g;
  AdmissibilityReport rep;
  for (const auto& o : sigma.overrides)
    if (o.p >= 0) rep.exceptional_places.push_back(o.p);
  std::sort(rep.exceptional_places.begin(), rep.exceptional_places.end());
  switch (sigma.default_rule) {
    case SigmaRule::All:
    case SigmaRule::UnramifiedOnly:
      rep.admissible = true;
      break;
    case SigmaRule::SplitOnly:
      rep.admissible = false;
      rep.reason =
          "default rule keeps only the totally split homomorphism, dropping "
          "unramified homs at infinitely many places";
      break;
    case SigmaRule::NoSplit:
      rep.admissible = false;
      rep.reason =
          "default rule drops the totally split homomorphism at infinitely "
          "many places";
      break;
  }
  // a residue filter with no matching classes would make the rule vacuous
  if (!rep.admissible && sigma.residue_modulus > 0 && sigma.residue_classes.empty())
    rep.admissible = true;
  return rep;
}

std::vector<Rat> euler_factor(const FiniteGroup& g, const LocalHomSet& set,
                              const std::vector<int>& allowed_rows,
                              const WeightFunction& w) {
  if (set.place.archimedean()) {
    return {make_rat(static_cast<long>(allowed_rows.size()), g.order())};
  }
  int max_e = 0;
  for (int r : allowed_rows)
    max_e = std::max(max_e, local_exponent(set.homs[r], w));
  std::vector<long> counts(max_e + 1, 0);
  for (int r : allowed_rows) ++counts[local_exponent(set.homs[r], w)];
  std::vector<Rat> coeffs(max_e + 1);
  for (int k = 0; k <= max_e; ++k) coeffs[k] = make_rat(counts[k], g.order());
  return coeffs;
}

}  // namespace mbtk
