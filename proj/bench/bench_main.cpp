// Timing comparison between the serial reference kernels and the OpenMP
// kernels: the coefficient sieve and the Monte Carlo sample runner.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "mbtk/group_spec.hpp"
#include "mbtk/model.hpp"
#include "mbtk/series.hpp"

using namespace mbtk;

namespace {

double seconds(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
      .count();
}

void bench_sieve(long x) {
  FiniteGroup c2 = parse_group_spec("C2");
  WildTableSet wild;
  wild.emplace(2, bundled_wild_table_c2_at_2(c2));
  SeriesContext ctx(c2, WeightFunction::index_weight(c2), LocalConditions{},
                    BaseFieldProfile{}, wild);

  auto t0 = std::chrono::steady_clock::now();
  auto serial = dirichlet_coeffs(ctx, x, /*parallel=*/false);
  double ts = seconds(t0);

  t0 = std::chrono::steady_clock::now();
  auto parallel = dirichlet_coeffs(ctx, x, /*parallel=*/true);
  double tp = seconds(t0);

  bool equal = serial == parallel;
  std::printf("sieve X=%ld: serial %.3fs, openmp %.3fs (x%.2f), equal=%s\n", x,
              ts, tp, ts / tp, equal ? "yes" : "NO");
}

void bench_runner(long samples) {
  FiniteGroup c3 = parse_group_spec("C3");
  WildTableSet wild;
  wild.emplace(3, bundled_wild_table_c3_at_3(c3));
  ModelOptions opt;
  opt.engine = EngineKind::Generic;
  auto profile = ModelProfile::build(
      c3, {Place::real(), Place::finite(2), Place::finite(3), Place::finite(5),
           Place::finite(7)},
      LocalConditions{}, WeightFunction::index_weight(c3), BaseFieldProfile{},
      wild, opt);
  long target = -1;
  for (long t = 0; t < profile.frame_size(); ++t)
    if (profile.tuple_surjective(t)) {
      target = t;
      break;
    }
  auto rows = profile.tuple_rows(target);
  rows.resize(2);  // complete unramified over {3, 5, 7}: 243 candidates

  int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  auto t0 = std::chrono::steady_clock::now();
  auto serial = moment_experiment(profile, rows, rows.size(),
                                  SampleMode::Structural, samples, 99);
  double ts = seconds(t0);

  omp_set_num_threads(max_threads);
  t0 = std::chrono::steady_clock::now();
  auto parallel = moment_experiment(profile, rows, rows.size(),
                                    SampleMode::Structural, samples, 99);
  double tp = seconds(t0);

  bool equal = serial.empirical_mean == parallel.empirical_mean;
  std::printf(
      "runner samples=%ld: 1 thread %.3fs, %d threads %.3fs (x%.2f), "
      "identical=%s\n",
      samples, ts, max_threads, tp, ts / tp, equal ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  long x = argc > 1 ? std::atol(argv[1]) : 1000000;
  long samples = argc > 2 ? std::atol(argv[2]) : 20000;
  std::printf("threads available: %d\n", omp_get_max_threads());
  bench_sieve(x);
  bench_runner(samples);
  return 0;
}
