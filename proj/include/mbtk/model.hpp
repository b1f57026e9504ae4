#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mbtk/category.hpp"
#include "mbtk/local.hpp"
#include "mbtk/rng.hpp"
#include "mbtk/series.hpp"

namespace mbtk {

enum class EngineKind { Abelian, Generic };
enum class SampleMode { NoTorsion, Structural };

struct WalkParams {
  int rack = 0;      // 0 = auto: max(10, 2 * generator count)
  long burnin = 0;   // 0 = auto: 200 * rack
  int stride = 20;   // walk steps per draw
};

struct ModelOptions {
  EngineKind engine = EngineKind::Generic;
  long frame_cap = 1000000;
  long enumeration_cap = 10000;
  WalkParams walk;
};

class FrameTooLarge : public std::runtime_error {
 public:
  FrameTooLarge(long size, long cap)
      : std::runtime_error("joint frame needs " + std::to_string(size) +
                           " tuples, cap is " + std::to_string(cap)),
        size(size), cap(cap) {}
  long size, cap;
};

// Per-place data of a profile: full hom enumeration plus the Sigma filter.
struct PlaceBlock {
  Place place;
  LocalHomSet homs;
  std::vector<int> allowed;              // row indices
  std::vector<int> allowed_slot;         // row -> position in allowed, or -1

  // abelian block view
  std::vector<long> gen_orders;
  std::vector<int> inertia_gens;
  std::vector<long> torsion_coords;
};

// An inertia assignment at one place: the images of the inertia generators,
// its weight exponent, and how many allowed rows carry it.
struct InertiaClass {
  std::vector<ElemId> images;
  int exponent = 0;
  long row_count = 0;
  bool trivial = false;
};

class ModelProfile {
 public:
  static ModelProfile build(const FiniteGroup& g, std::vector<Place> s,
                            const LocalConditions& sigma,
                            const WeightFunction& w,
                            const BaseFieldProfile& base,
                            const WildTableSet& wild, const ModelOptions& opt);

  const FiniteGroup& group() const { return *g_; }
  const std::vector<PlaceBlock>& blocks() const { return blocks_; }
  const BaseFieldProfile& base() const { return base_; }
  const WeightFunction& weight() const { return *w_; }
  const ModelOptions& options() const { return opt_; }
  EngineKind engine() const { return opt_.engine; }
  int relation_count() const;  // |S| - 1 plain relations

  long frame_size() const { return frame_size_; }
  // rows of frame tuple t, one allowed-row index per place
  std::vector<int> tuple_rows(long t) const;
  std::optional<long> tuple_index(const std::vector<int>& rows) const;

  bool tuple_surjective(long t) const;
  // invariant of a tuple, clamped to bound+1 when it exceeds the bound
  long tuple_invariant(long t, long bound) const;

  // smallest ramified invariant of a place outside S in the ambient stream;
  // X must stay below it
  long representable_bound(long stream_limit) const;

  // per-place inertia classes over the allowed rows
  const std::vector<std::vector<InertiaClass>>& inertia_classes() const {
    return inertia_classes_;
  }

 private:
  const FiniteGroup* g_ = nullptr;
  std::optional<WeightFunction> w_;
  LocalConditions sigma_;
  BaseFieldProfile base_;
  WildTableSet wild_;
  ModelOptions opt_;
  std::vector<PlaceBlock> blocks_;
  long frame_size_ = 0;
  std::vector<long> strides_;
  std::vector<std::vector<InertiaClass>> inertia_classes_;
  mutable std::vector<signed char> surjective_cache_;
};

// ---- generic engine ----

// Joint evaluation subgroup E <= G^Phi, as explicit vectors when
// enumerable. Vectors hold one element id per frame tuple.
class JointFrame {
 public:
  explicit JointFrame(const ModelProfile& profile);

  const ModelProfile& profile() const { return *profile_; }
  const std::vector<std::vector<uint8_t>>& generator_vectors() const {
    return gen_vectors_;
  }
  const std::vector<std::vector<uint8_t>>& torsion_vectors() const {
    return torsion_vectors_;
  }

  // enumerations; empty optional when the cap is exceeded
  const std::optional<std::vector<std::vector<uint8_t>>>& plain_group() const {
    return e_enum_;
  }
  const std::optional<std::vector<std::vector<uint8_t>>>& torsion_group() const {
    return t_enum_;
  }

  // uniform draw via the enumeration; throws past the cap
  std::vector<uint8_t> draw_plain(Rng& rng) const;
  std::vector<uint8_t> draw_torsion(Rng& rng) const;

  // exact per-coordinate survival data (enumeration route)
  Rat exact_kill_probability_plain(long tuple) const;
  Rat exact_kill_probability_torsion(long tuple) const;

 private:
  const ModelProfile* profile_;
  std::vector<std::vector<uint8_t>> gen_vectors_;
  std::vector<std::vector<uint8_t>> torsion_vectors_;
  std::optional<std::vector<std::vector<uint8_t>>> e_enum_;
  std::optional<std::vector<std::vector<uint8_t>>> t_enum_;
};

// Product-replacement walk on the generator vectors, with an accumulator.
// Burn-in happens once at construction; draw() advances `stride` steps.
class PlainWalker {
 public:
  PlainWalker(const JointFrame& frame, Rng rng);
  std::vector<uint8_t> draw();

 private:
  void step();
  const JointFrame* frame_;
  Rng rng_;
  int stride_;
  std::vector<std::vector<uint8_t>> rack_;
  std::vector<uint8_t> acc_;
};

// Lazy symmetric walk on <[E,E], torsion lifts>: steps are freshly
// conjugated commutators of the generator vectors and torsion-lift vectors.
class TorsionWalker {
 public:
  TorsionWalker(const JointFrame& frame, Rng rng);
  std::vector<uint8_t> draw();

 private:
  void step();
  const JointFrame* frame_;
  Rng rng_;
  int stride_;
  std::vector<std::vector<uint8_t>> rack_;
  std::vector<std::vector<uint8_t>> live_torsion_;
  std::vector<uint8_t> state_;
};

// One sampled tuple of relations, able to evaluate each relation at a frame
// tuple. Generic mode stores full vectors; abelian mode stores block
// coefficients.
struct RelationBundle {
  SampleMode mode = SampleMode::NoTorsion;
  EngineKind engine = EngineKind::Generic;
  uint64_t seed = 0;
  long sample_index = 0;

  // generic: [relation][frame tuple]
  std::vector<std::vector<uint8_t>> vectors;
  std::vector<uint8_t> torsion_vector;

  // abelian: [relation][place][generator] coefficients; torsion multiplier
  // per place
  std::vector<std::vector<std::vector<long>>> coefficients;
  std::vector<long> torsion_multiplier;

  ElemId eval(const ModelProfile& profile, int relation,
              const std::vector<int>& rows) const;
  ElemId eval_torsion(const ModelProfile& profile,
                      const std::vector<int>& rows) const;
  bool kills_tuple(const ModelProfile& profile, long tuple) const;
};

// Draw one relation bundle. Abelian engines sample block coefficients with
// per-(relation, place) derived streams; generic engines draw from E (by
// enumeration below the cap, product replacement otherwise).
RelationBundle sample_group(const ModelProfile& profile, const JointFrame* frame,
                            SampleMode mode, uint64_t seed, long sample_index);

// ---- abelian counting engine ----

struct AbelianBasis {
  std::vector<ElemId> elements;  // sorted subgroup elements
  std::vector<ElemId> basis;
  std::vector<long> orders;
  std::unordered_map<ElemId, std::vector<long>> coords;
};

AbelianBasis abelian_basis(const FiniteGroup& g,
                           const std::vector<ElemId>& subgroup_elements);

class AbelianCounter {
 public:
  explicit AbelianCounter(const ModelProfile& profile);

  // N(sampled group, inv <= X): surjections with invariant at most X
  Int count_surjections(const RelationBundle& bundle, long X) const;

  // exact expected number of epimorphisms onto (G, S0, rows0) under this
  // profile's sampler; target places must be a prefix subset of the
  // profile's S and carry surjectivity-friendly data
  Rat expected_epi_count(const std::vector<int>& target_rows,
                         size_t target_places, SampleMode mode) const;

  const std::vector<std::vector<ElemId>>& subgroups() const { return subgroups_; }
  long mobius(size_t subgroup_index) const { return mobius_[subgroup_index]; }

 private:
  struct Pattern {
    std::vector<int> class_choice;  // per place: index into inertia classes
    long invariant = 1;
  };
  std::vector<Pattern> patterns_up_to(long X) const;
  Int count_solutions(const RelationBundle& bundle, const Pattern& pat,
                      size_t subgroup_index) const;

  const ModelProfile* profile_;
  std::vector<std::vector<ElemId>> subgroups_;
  std::vector<long> mobius_;
  std::vector<AbelianBasis> bases_;
};

// ---- experiments ----

struct MomentExperimentReport {
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double closed_form = 0.0;
  std::string closed_form_exact;
  std::optional<double> exact_survival;    // enumerable instances
  std::string exact_survival_exact;
  long samples = 0;
  uint64_t seed = 0;
  std::string mode;
  std::string engine;
};

MomentExperimentReport moment_experiment(const ModelProfile& profile,
                                         const std::vector<int>& target_rows,
                                         size_t target_places, SampleMode mode,
                                         long samples, uint64_t seed);

struct LlnPoint {
  long x = 0;
  double normalizer = 0.0;  // A(X) or prediction, caller's choice
  double ratio_mean = 0.0;
  double ratio_variance = 0.0;
  std::vector<double> ratios;
};

struct LlnReport {
  std::vector<LlnPoint> points;
  long samples_per_x = 0;
  uint64_t seed = 0;
  std::string mode;
  bool beta_warning = false;  // min-weight elements fail to generate
};

LlnReport lln_experiment(const ModelProfile& profile,
                         const std::vector<long>& x_schedule,
                         const std::vector<double>& normalizers,
                         SampleMode mode, long samples, uint64_t seed);

struct GrunwaldRow {
  std::vector<int> sub_tuple;  // allowed-row indices over the designated places
  double frequency = 0.0;
};

struct GrunwaldReport {
  size_t designated_places = 0;
  long samples = 0;
  uint64_t seed = 0;
  std::vector<GrunwaldRow> rows;  // sorted by descending frequency
};

GrunwaldReport grunwald_diagnostic(const ModelProfile& profile,
                                   size_t designated_places, SampleMode mode,
                                   long samples, uint64_t seed);

struct SurvivalGapRow {
  long tuple = 0;
  std::string plain_kill_exact;      // per-relation kill probability
  std::string torsion_kill_exact;    // structural r0 kill probability
  double survival_structural = 0.0;  // full-bundle survival, literal law
  double survival_closed_form = 0.0;
  bool surjective = false;
};

// Criterion-10 style diagnostic: per-tuple exact survival under the literal
// torsion relation against the closed-form moment.
std::vector<SurvivalGapRow> survival_gap_report(const ModelProfile& profile);

}  // namespace mbtk
