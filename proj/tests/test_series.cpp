#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include <algorithm>

#include "mbtk/group_spec.hpp"
#include "mbtk/report.hpp"
#include "mbtk/series.hpp"

using namespace mbtk;

namespace {

SeriesContext c2_disc_unram_at_2() {
  static FiniteGroup c2 = parse_group_spec("C2");
  LocalConditions sigma;
  sigma.overrides.push_back(SigmaOverride{2, SigmaRule::UnramifiedOnly, {}, false});
  return SeriesContext(c2, WeightFunction::index_weight(c2), sigma,
                       BaseFieldProfile{});
}

SeriesContext c2_ramified_primes() {
  static FiniteGroup c2 = parse_group_spec("C2");
  WildTableSet wild;
  wild.emplace(2, bundled_wild_table_c2_at_2(c2));
  return SeriesContext(c2, WeightFunction::ramified_primes(c2),
                       LocalConditions{}, BaseFieldProfile{}, std::move(wild));
}

SeriesContext c3_disc() {
  static FiniteGroup c3 = parse_group_spec("C3");
  WildTableSet wild;
  wild.emplace(3, bundled_wild_table_c3_at_3(c3));
  return SeriesContext(c3, WeightFunction::index_weight(c3),
                       LocalConditions{}, BaseFieldProfile{}, std::move(wild));
}

bool squarefree(long n) {
  for (long d = 2; d * d <= n; ++d)
    if (n % (d * d) == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("C2 with unramified-only condition at 2: odd squarefree indicator") {
  auto ctx = c2_disc_unram_at_2();
  auto a = dirichlet_coeffs(ctx, 500);
  CHECK(a[1] == 1);
  for (long n = 2; n <= 500; ++n) {
    CAPTURE(n);
    CHECK(a[n] == ((n % 2 == 1 && squarefree(n)) ? 1 : 0));
  }
}

TEST_CASE("C3 coefficients with the bundled wild table") {
  auto ctx = c3_disc();
  auto a = dirichlet_coeffs(ctx, 200);
  CHECK(a[1] == 1);
  CHECK(a[49] == 2);   // six ramified homs at 7 over |G| = 3
  CHECK(a[81] == 2);   // six ramified homs at 3 over |G| = 3, exponent 4
  CHECK(a[169] == 2);  // 13 = 1 mod 3
  CHECK(a[121] == 0);  // 11 = 2 mod 3 admits no ramified hom
  for (long n : {2L, 3L, 4L, 5L, 7L, 9L, 25L, 50L})
    CHECK(a[n] == 0);
}

TEST_CASE("sieve equals pattern-enumeration oracle up to 2000") {
  for (auto make : {&c2_disc_unram_at_2, &c2_ramified_primes, &c3_disc}) {
    auto ctx = make();
    auto sieved = dirichlet_coeffs(ctx, 2000);
    auto oracle = dirichlet_coeffs_oracle(ctx, 2000);
    REQUIRE(sieved.size() == oracle.size());
    for (long n = 1; n <= 2000; ++n) {
      CAPTURE(n);
      CHECK(sieved[n] == oracle[n]);
    }
  }
}

TEST_CASE("serial and parallel sieve kernels agree exactly") {
  for (auto make : {&c2_ramified_primes, &c3_disc}) {
    auto ctx = make();
    auto serial = dirichlet_coeffs(ctx, 3000, /*parallel=*/false);
    auto parallel = dirichlet_coeffs(ctx, 3000, /*parallel=*/true);
    REQUIRE(serial.size() == parallel.size());
    for (size_t n = 1; n < serial.size(); ++n) CHECK(serial[n] == parallel[n]);
  }
}

TEST_CASE("multiplicativity of coefficients") {
  auto ctx = c3_disc();
  auto a = dirichlet_coeffs(ctx, 10000);
  for (long m = 2; m <= 100; ++m)
    for (long n = m + 1; m * n <= 10000; ++n) {
      if (std::gcd(m, n) != 1) continue;
      CAPTURE(m);
      CAPTURE(n);
      CHECK(a[m * n] == a[m] * a[n]);
    }
}

TEST_CASE("truncation consistency: factors beyond X never matter") {
  auto ctx = c2_ramified_primes();
  auto a = dirichlet_coeffs(ctx, 300);
  // re-sieve with a larger bound and truncate
  auto b = dirichlet_coeffs(ctx, 900);
  for (long n = 1; n <= 300; ++n) CHECK(a[n] == b[n]);
}

TEST_CASE("moment prefactors") {
  FiniteGroup s3 = parse_group_spec("S3");
  SeriesContext ctx_s3(s3, WeightFunction::index_weight(s3), LocalConditions{},
                       BaseFieldProfile{});
  CHECK(ctx_s3.moment_prefactor() == 3);  // 6 / |C2[2]|

  auto ctx_c3 = c3_disc();
  CHECK(ctx_c3.moment_prefactor() == 3);  // 3 / 1

  // X = 1: prefactor times a_1
  auto a = dirichlet_coeffs(ctx_c3, 1);
  CHECK(partial_sum(ctx_c3, a, 1) ==
        ctx_c3.moment_prefactor() * ctx_c3.archimedean_multiplier());
}

TEST_CASE("leading constant for C2 with the ramified-primes ordering") {
  // Independent evaluation: the regularized product telescopes to
  // (5/4) prod_{p odd} (1 - p^-2) = (5/4)(8/pi^2), and the prefactor is
  // (1/2) |Sigma_oo| = 1, so c = 10/pi^2.
  const double expected = 10.0 / (M_PI * M_PI);
  auto ctx = c2_ramified_primes();
  auto pred = predict(ctx, 200000);
  CHECK(pred.a == 1);
  CHECK(pred.b == 1);
  CHECK(pred.tail.residue_constant);
  CHECK(pred.tail.conditional == 0.0);
  CHECK(std::abs(pred.c - expected) < 5e-5);
  CHECK(std::abs(std::log(pred.c) - std::log(expected)) <= pred.tail.rigorous);
  CHECK(pred.printed_forms_agree);
}

TEST_CASE("leading constant for C2 discriminant counting") {
  // odd squarefree density: c = 4/pi^2
  const double expected = 4.0 / (M_PI * M_PI);
  auto ctx = c2_disc_unram_at_2();
  auto pred = predict(ctx, 200000);
  CHECK(pred.a == 1);
  CHECK(pred.b == 1);
  CHECK(std::abs(pred.c - expected) < 5e-5);
}

TEST_CASE("unit rank divides the constant by |G|") {
  FiniteGroup c3 = parse_group_spec("C3");
  WildTableSet wild;
  wild.emplace(3, bundled_wild_table_c3_at_3(c3));
  BaseFieldProfile rank0;
  BaseFieldProfile rank1 = rank0;
  rank1.unit_rank = 1;
  SeriesContext a(c3, WeightFunction::index_weight(c3), LocalConditions{},
                  rank0, wild);
  SeriesContext b(c3, WeightFunction::index_weight(c3), LocalConditions{},
                  rank1, wild);
  auto pa = predict(a, 5000);
  auto pb = predict(b, 5000);
  CHECK(pb.c == doctest::Approx(pa.c / 3.0).epsilon(1e-12));
}

TEST_CASE("prediction stability under p_max and place order") {
  auto ctx = c3_disc();
  auto p1 = predict(ctx, 20000);
  auto p2 = predict(ctx, 80000);
  // C3 has unequal residue classes (k_r = 2 vs 0), so only the conditional
  // component covers the 1/p oscillation
  CHECK_FALSE(p1.tail.residue_constant);
  double bound = p1.tail.rigorous + p1.tail.conditional + p2.tail.rigorous +
                 p2.tail.conditional;
  CHECK(std::abs(std::log(p1.c) - std::log(p2.c)) <= bound);
}

TEST_CASE("tauberian table shapes") {
  auto ctx = c2_disc_unram_at_2();
  auto a = dirichlet_coeffs(ctx, 20000);
  auto pred = predict(ctx, 100000);
  auto table = tauberian_table(ctx, pred, a, {100, 1000, 10000, 20000});
  REQUIRE(table.size() == 4);
  // b = 1: predicted column is c * X exactly (no log factor)
  for (const auto& row : table)
    CHECK(row.predicted == doctest::Approx(pred.c * row.x).epsilon(1e-12));
  // ratio drifts toward 1
  CHECK(std::abs(table.back().ratio - 1.0) < 0.02);
  CHECK(std::abs(table.back().ratio - 1.0) <=
        std::abs(table.front().ratio - 1.0) + 1e-9);

  // X below the first ramified norm: partial sum = prefactor * a_1
  auto tiny = tauberian_table(ctx, pred, a, {2});
  CHECK(tiny[0].partial ==
        to_double(ctx.moment_prefactor() * ctx.archimedean_multiplier()));
}

TEST_CASE("decay probe on a non-admissible family") {
  FiniteGroup c2 = parse_group_spec("C2");
  WildTableSet wild;
  wild.emplace(2, bundled_wild_table_c2_at_2(c2));
  LocalConditions no_split;
  no_split.default_rule = SigmaRule::NoSplit;
  SeriesContext restricted(c2, WeightFunction::index_weight(c2), no_split,
                           BaseFieldProfile{}, wild);
  auto rows = decay_probe(restricted, {10, 100, 1000});
  REQUIRE(rows.size() == 3);
  // X below all odd norms: only the place 2 factor contributes
  CHECK(rows[0].normalized_sum > 0.0);
  // doubling X decreases the normalized sum
  auto more = decay_probe(restricted, {200, 400, 800});
  CHECK(more[1].normalized_sum < more[0].normalized_sum);
  CHECK(more[2].normalized_sum < more[1].normalized_sum);

  // admissible conditions are rejected
  SeriesContext fine(c2, WeightFunction::index_weight(c2), LocalConditions{},
                     BaseFieldProfile{}, wild);
  CHECK_THROWS(decay_probe(fine, {10}));

  // the sieve rejects non-admissible conditions
  CHECK_THROWS_AS(dirichlet_coeffs(restricted, 50), NonAdmissibleSigma);
}

TEST_CASE("missing wild table reported by the sieve") {
  FiniteGroup c2 = parse_group_spec("C2");
  SeriesContext ctx(c2, WeightFunction::index_weight(c2), LocalConditions{},
                    BaseFieldProfile{});
  CHECK_THROWS_AS(dirichlet_coeffs(ctx, 100), WildDataMissing);
}

TEST_CASE("csv emitters") {
  auto ctx = c2_disc_unram_at_2();
  auto a = dirichlet_coeffs(ctx, 100);
  auto pred = predict(ctx, 10000);
  auto table = tauberian_table(ctx, pred, a, {10, 100});
  std::string csv = tauberian_csv(table);
  CHECK(csv.rfind("x,partial_sum,partial_sum_exact,predicted,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  std::string ccsv = coefficients_csv(a, 100);
  CHECK(ccsv.rfind("n,a_n\n", 0) == 0);
}
