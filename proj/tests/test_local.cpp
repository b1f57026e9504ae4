#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "mbtk/group_spec.hpp"
#include "mbtk/local.hpp"

using namespace mbtk;

namespace {

std::multiset<int> exponent_multiset(const LocalHomSet& set,
                                     const WeightFunction& w) {
  std::multiset<int> out;
  for (const auto& h : set.homs) out.insert(local_exponent(h, w));
  return out;
}

}  // namespace

TEST_CASE("archimedean hom sets") {
  FiniteGroup c2 = parse_group_spec("C2");
  auto w = WeightFunction::index_weight(c2);
  auto real = local_hom_set(c2, Place::real(), w);
  CHECK(real.homs.size() == 2);  // identity and the involution
  auto cplx = local_hom_set(c2, Place::complex(), w);
  CHECK(cplx.homs.size() == 1);

  FiniteGroup s3 = parse_group_spec("S3");
  auto ws3 = WeightFunction::index_weight(s3);
  CHECK(local_hom_set(s3, Place::real(), ws3).homs.size() == 4);

  FiniteGroup c3 = parse_group_spec("C3");
  CHECK(local_hom_set(c3, Place::real(), WeightFunction::index_weight(c3))
            .homs.size() == 1);
}

TEST_CASE("tame enumeration matches the spec examples") {
  FiniteGroup c2 = parse_group_spec("C2");
  auto w2 = WeightFunction::index_weight(c2);
  auto set = local_hom_set(c2, Place::finite(3), w2);
  CHECK(set.homs.size() == 4);
  CHECK(exponent_multiset(set, w2) == std::multiset<int>{0, 0, 1, 1});

  FiniteGroup s3 = parse_group_spec("S3");
  auto ws3 = WeightFunction::index_weight(s3);
  auto set7 = local_hom_set(s3, Place::finite(7), ws3);
  CHECK(set7.homs.size() == 18);
  CHECK(exponent_multiset(set7, ws3) ==
        std::multiset<int>{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2});

  FiniteGroup c3 = parse_group_spec("C3");
  auto w3 = WeightFunction::index_weight(c3);
  auto set5 = local_hom_set(c3, Place::finite(5), w3);
  CHECK(set5.homs.size() == 3);
  CHECK(set5.unramified_count() == 3);
}

TEST_CASE("unramified count equals |G| at finite places") {
  for (const char* spec : {"C2", "C3", "S3", "D4", "C2xC2", "Q8"}) {
    FiniteGroup g = parse_group_spec(spec);
    auto w = g.is_transitive() ? WeightFunction::index_weight(g)
                               : WeightFunction::ramified_primes(g);
    for (long p : {11L, 13L, 17L, 19L, 23L}) {
      if (g.order() % p == 0) continue;
      auto set = local_hom_set(g, Place::finite(p), w);
      CAPTURE(spec);
      CAPTURE(p);
      CHECK(set.unramified_count() == g.order());
    }
  }
}

TEST_CASE("tame hom count depends only on q mod exp(G)") {
  for (const char* spec : {"S3", "C3", "D4", "C5"}) {
    FiniteGroup g = parse_group_spec(spec);
    auto w = WeightFunction::ramified_primes(g);
    std::map<long, std::set<size_t>> by_residue;
    for (long p : primes_up_to(200)) {
      if (g.order() % p == 0) continue;
      auto set = local_hom_set(g, Place::finite(p), w);
      by_residue[p % g.exponent()].insert(set.homs.size());
    }
    CAPTURE(spec);
    for (const auto& [r, sizes] : by_residue) CHECK(sizes.size() == 1);
  }
}

TEST_CASE("conjugation acts on the tame hom set") {
  FiniteGroup s3 = parse_group_spec("S3");
  auto w = WeightFunction::index_weight(s3);
  auto set = local_hom_set(s3, Place::finite(7), w);
  std::set<std::vector<ElemId>> images;
  for (const auto& h : set.homs) images.insert(h.gen_images);
  for (const auto& h : set.homs)
    for (ElemId z = 0; z < s3.order(); ++z) {
      std::vector<ElemId> conj{
          s3.mul(s3.mul(z, h.gen_images[0]), s3.inv(z)),
          s3.mul(s3.mul(z, h.gen_images[1]), s3.inv(z))};
      CHECK(images.count(conj) == 1);
    }
}

TEST_CASE("torsion image at tame places over Q") {
  FiniteGroup c2 = parse_group_spec("C2");
  auto w = WeightFunction::index_weight(c2);
  // p = 1 mod 4: (q-1)/2 even, torsion image trivial on every hom
  for (long p : {5L, 13L, 17L}) {
    auto set = local_hom_set(c2, Place::finite(p), w);
    for (const auto& h : set.homs) CHECK(h.torsion_image == 0);
  }
  // p = 3 mod 4: ramified homs carry the inertia generator
  for (long p : {3L, 7L, 11L, 19L}) {
    auto set = local_hom_set(c2, Place::finite(p), w);
    for (const auto& h : set.homs)
      CHECK(h.torsion_image == (h.unramified ? 0 : h.inertia_gen));
  }
}

TEST_CASE("local exponent rules") {
  FiniteGroup s3 = parse_group_spec("S3");
  auto wind = WeightFunction::index_weight(s3);
  auto wram = WeightFunction::ramified_primes(s3);
  auto set = local_hom_set(s3, Place::finite(7), wind);
  for (const auto& h : set.homs) {
    if (h.unramified) {
      CHECK(local_exponent(h, wind) == 0);
      CHECK(local_exponent(h, wram) == 0);
    } else if (s3.index_of(h.inertia_gen) == 1) {
      CHECK(local_exponent(h, wind) == 1);
      CHECK(local_exponent(h, wram) == 1);
    }
  }
}

TEST_CASE("wild data required error names the place") {
  FiniteGroup c2 = parse_group_spec("C2");
  auto w = WeightFunction::index_weight(c2);
  try {
    local_hom_set(c2, Place::finite(2), w);
    FAIL("expected WildDataMissing");
  } catch (const WildDataMissing& e) {
    CHECK(e.p == 2);
  }
}

TEST_CASE("bundled wild tables validate and have the right exponents") {
  FiniteGroup c2 = parse_group_spec("C2");
  auto t2 = bundled_wild_table_c2_at_2(c2);
  CHECK(t2.rows.size() == 8);
  std::multiset<int> nus;
  for (const auto& h : t2.rows) nus.insert(h.disc_exponent);
  CHECK(nus == std::multiset<int>{0, 0, 2, 2, 3, 3, 3, 3});
  // torsion column: exactly the chi(-1) coordinate; four nontrivial entries
  int nontrivial = 0;
  for (const auto& h : t2.rows) {
    CHECK(h.torsion_image == h.gen_images[1]);
    nontrivial += h.torsion_image != 0;
  }
  CHECK(nontrivial == 4);

  FiniteGroup c3 = parse_group_spec("C3");
  auto t3 = bundled_wild_table_c3_at_3(c3);
  CHECK(t3.rows.size() == 9);
  std::multiset<int> nus3;
  for (const auto& h : t3.rows) nus3.insert(h.disc_exponent);
  CHECK(nus3 == std::multiset<int>{0, 0, 0, 4, 4, 4, 4, 4, 4});
  for (const auto& h : t3.rows) CHECK(h.torsion_image == 0);
}

TEST_CASE("wild table file loader") {
  FiniteGroup c2 = parse_group_spec("C2");
  auto loaded = load_wild_table(std::string(MBTK_SOURCE_DIR) + "/data/wild_c2_p2.json", c2);
  auto bundled = bundled_wild_table_c2_at_2(c2);
  REQUIRE(loaded.rows.size() == bundled.rows.size());
  std::set<std::vector<ElemId>> a, b;
  for (const auto& h : loaded.rows) a.insert(h.gen_images);
  for (const auto& h : bundled.rows) b.insert(h.gen_images);
  CHECK(a == b);
  for (const auto& hl : loaded.rows)
    for (const auto& hb : bundled.rows)
      if (hl.gen_images == hb.gen_images) {
        CHECK(hl.disc_exponent == hb.disc_exponent);
        CHECK(hl.torsion_image == hb.torsion_image);
      }

  FiniteGroup c3 = parse_group_spec("C3");
  auto loaded3 = load_wild_table(std::string(MBTK_SOURCE_DIR) + "/data/wild_c3_p3.json", c3);
  CHECK(loaded3.rows.size() == 9);

  // unversioned files are refused
  CHECK_THROWS_WITH_AS(
      wild_table_from_json("{\"p\": 2, \"rows\": []}", c2),
      "wild table file missing format_version", std::invalid_argument);

  // invariant violations are refused: wrong unramified count
  std::string bad = R"json({
    "format_version": 1, "p": 2, "group": "C2", "generator_count": 1,
    "inertia_generators": [0], "generator_orders": [2],
    "torsion_coordinates": [0], "torsion_column": true,
    "rows": [
      {"generator_images": ["()"], "inertia_generator": "()",
       "disc_exponent": 0, "torsion_image": "()"}
    ]})json";
  CHECK_THROWS(wild_table_from_json(bad, c2));

  // nu = 0 must be equivalent to unramified
  std::string bad2 = R"json({
    "format_version": 1, "p": 2, "group": "C2", "generator_count": 1,
    "inertia_generators": [0], "generator_orders": [2],
    "torsion_coordinates": [0], "torsion_column": true,
    "rows": [
      {"generator_images": ["()"], "inertia_generator": "()",
       "disc_exponent": 0, "torsion_image": "()"},
      {"generator_images": ["(1 2)"], "inertia_generator": "(1 2)",
       "disc_exponent": 0, "torsion_image": "()"}
    ]})json";
  CHECK_THROWS(wild_table_from_json(bad2, c2));
}

TEST_CASE("euler factors") {
  FiniteGroup c2 = parse_group_spec("C2");
  auto w = WeightFunction::index_weight(c2);
  LocalConditions trivial;
  auto set3 = local_hom_set(c2, Place::finite(3), w);
  auto f = euler_factor(c2, set3, trivial.allowed_rows(set3), w);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == 1);
  CHECK(f[1] == 1);  // (1/2)(2 + 2t) = 1 + t

  FiniteGroup s3 = parse_group_spec("S3");
  auto ws3 = WeightFunction::index_weight(s3);
  auto set7 = local_hom_set(s3, Place::finite(7), ws3);
  auto f7 = euler_factor(s3, set7, trivial.allowed_rows(set7), ws3);
  REQUIRE(f7.size() == 3);
  CHECK(f7[0] == 1);
  CHECK(f7[1] == 1);
  CHECK(f7[2] == 1);

  // unramified homs only: the constant factor 1
  LocalConditions ur;
  ur.overrides.push_back(SigmaOverride{7, SigmaRule::UnramifiedOnly, {}, false});
  auto fur = euler_factor(s3, set7, ur.allowed_rows(set7), ws3);
  REQUIRE(fur.size() == 1);
  CHECK(fur[0] == 1);

  // empty condition set: the zero polynomial
  auto fz = euler_factor(s3, set7, {}, ws3);
  REQUIRE(fz.size() == 1);
  CHECK(fz[0] == 0);

  // factor at t = 1 equals (#homs)/|G|; constant term 1 for trivial sigma
  Rat at1(0);
  for (const auto& c : f7) at1 += c;
  CHECK(at1 == make_rat(18, 6));
}

TEST_CASE("admissibility reports") {
  FiniteGroup c2 = parse_group_spec("C2");
  LocalConditions trivial;
  CHECK(admissibility_check(trivial, c2).admissible);

  LocalConditions with_overrides;
  with_overrides.overrides = {SigmaOverride{2, SigmaRule::UnramifiedOnly, {}, false},
                              SigmaOverride{5, SigmaRule::SplitOnly, {}, false},
                              SigmaOverride{11, SigmaRule::NoSplit, {}, false}};
  auto rep = admissibility_check(with_overrides, c2);
  CHECK(rep.admissible);
  CHECK(rep.exceptional_places == std::vector<long>{2, 5, 11});

  LocalConditions split_only;
  split_only.default_rule = SigmaRule::SplitOnly;
  CHECK_FALSE(admissibility_check(split_only, c2).admissible);

  LocalConditions no_split;
  no_split.default_rule = SigmaRule::NoSplit;
  CHECK_FALSE(admissibility_check(no_split, c2).admissible);

  LocalConditions unram_default;
  unram_default.default_rule = SigmaRule::UnramifiedOnly;
  CHECK(admissibility_check(unram_default, c2).admissible);
}

TEST_CASE("rational place stream") {
  auto places = rational_places(20);
  REQUIRE(places.size() == 9);  // oo + 2,3,5,7,11,13,17,19
  CHECK(places[0].archimedean());
  CHECK(places[1].norm() == 2);
  CHECK(places.back().norm() == 19);
}
