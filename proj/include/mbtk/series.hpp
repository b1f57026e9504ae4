#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbtk/local.hpp"

namespace mbtk {

struct BaseFieldProfile {
  long mu = 2;          // |mu(K)|
  int unit_rank = 0;    // rk O_K^x = |P_oo| - 1
  int real_places = 1;
  int complex_places = 0;
  double zeta_residue = 1.0;  // Res_{s=1} zeta_K

  int infinite_places() const { return real_places + complex_places; }
};

class NonAdmissibleSigma : public std::runtime_error {
 public:
  explicit NonAdmissibleSigma(const std::string& why)
      : std::runtime_error("local conditions are not admissible: " + why) {}
};

// Everything a counting problem needs: group, weight, conditions, base
// field, place stream, wild tables. Immutable after construction; the
// coefficient sieve and the constant evaluation hang off it.
class SeriesContext {
 public:
  SeriesContext(const FiniteGroup& g, WeightFunction w, LocalConditions sigma,
                BaseFieldProfile base, WildTableSet wild = {});

  const FiniteGroup& group() const { return *g_; }
  const WeightFunction& weight() const { return w_; }
  const LocalConditions& sigma() const { return sigma_; }
  const BaseFieldProfile& base() const { return base_; }
  const WildTableSet& wild_tables() const { return wild_; }

  // Euler factor coefficients at a finite place (cached per residue class).
  const std::vector<Rat>& factor_at(const Place& v) const;
  LocalHomSet hom_set_at(const Place& v) const;

  // prefactor |G| / |G^ab[mu]| and the archimedean multiplier
  Rat moment_prefactor() const;
  Rat archimedean_multiplier() const;
  long archimedean_sigma_product() const;  // prod over p | oo of |Sigma_p|

  long torsion_order() const { return ab_torsion_; }

 private:
  const FiniteGroup* g_;
  WeightFunction w_;
  LocalConditions sigma_;
  BaseFieldProfile base_;
  WildTableSet wild_;
  long ab_torsion_ = 1;
  mutable std::map<long, std::vector<Rat>> tame_factor_cache_;
  mutable std::map<long, std::vector<Rat>> special_factor_cache_;  // by p
};

// Dirichlet coefficients a_1..a_X of the finite part of the MB series,
// indexable as coeffs[n] (coeffs[0] unused). Requires admissible Sigma and
// wild tables for every p | |G| with p <= X. `parallel` switches between the
// serial reference convolution and the OpenMP chain kernel; both produce
// identical exact arrays.
std::vector<Rat> dirichlet_coeffs(const SeriesContext& ctx, long X,
                                  bool parallel = true);

// Independent oracle: direct enumeration over ramification assignments.
// Only valid when every Euler factor has constant term 1 (asserted).
std::vector<Rat> dirichlet_coeffs_oracle(const SeriesContext& ctx, long X);

// (|G|/|G^ab[mu]|) * archimedean multiplier * sum_{n<=X} a_n
Rat partial_sum(const SeriesContext& ctx, const std::vector<Rat>& coeffs,
                long X);

struct TailBound {
  double rigorous = 0.0;       // bound on |log tail| from the 1/p^(1+1/a) part
  double conditional = 0.0;    // oscillating 1/p part, equidistribution-based
  bool residue_constant = true;  // 1/p coefficient equal across residue classes
};

struct Prediction {
  int a = 0;
  int b = 0;
  double c = 0.0;
  // alternate normalization carrying one lower power of the zeta residue;
  // both conventions circulate and agree over Q
  double c_residue_lowered = 0.0;
  bool printed_forms_agree = true;
  long p_max = 0;
  TailBound tail;
  std::vector<int> minimal_kclasses;
};

// Leading-constant bundle: a, b from the group, c as the regularized Euler
// product truncated at p_max with a tail report.
Prediction predict(const SeriesContext& ctx, long p_max = 1000000);

struct TauberianRow {
  long x = 0;
  double partial = 0.0;      // A(X)
  std::string partial_exact;
  double predicted = 0.0;    // c X^(1/a) (log X)^(b-1)
  double ratio = 0.0;
};

std::vector<TauberianRow> tauberian_table(const SeriesContext& ctx,
                                          const Prediction& pred,
                                          const std::vector<Rat>& coeffs,
                                          const std::vector<long>& checkpoints);

struct DecayRow {
  long x = 0;
  double normalized_sum = 0.0;  // prefactor * sum of restricted coefficients
  std::string exact;
};

// Partial sums of the restricted count for a non-admissible Sigma, at the
// given checkpoints. Rejects admissible conditions.
std::vector<DecayRow> decay_probe(const SeriesContext& ctx,
                                  const std::vector<long>& checkpoints);

}  // namespace mbtk
