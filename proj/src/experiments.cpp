#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mbtk/model.hpp"

namespace mbtk {

namespace {

// Candidate tuples for a target object: rows fixed on the target prefix,
// unramified completions elsewhere.
std::vector<std::vector<int>> candidate_tuples(const ModelProfile& profile,
                                               const std::vector<int>& target_rows,
                                               size_t target_places) {
  const auto& blocks = profile.blocks();
  if (target_places > blocks.size() ||
      target_rows.size() != target_places)
    throw std::invalid_argument("target does not fit the profile");
  std::vector<std::vector<int>> completions{std::vector<int>(
      target_rows.begin(), target_rows.end())};
  for (size_t j = target_places; j < blocks.size(); ++j) {
    std::vector<int> unram;
    for (size_t r = 0; r < blocks[j].homs.homs.size(); ++r)
      if (blocks[j].homs.homs[r].unramified) unram.push_back(static_cast<int>(r));
    std::vector<std::vector<int>> next;
    for (const auto& partial : completions)
      for (int r : unram) {
        auto rows = partial;
        rows.push_back(r);
        next.push_back(std::move(rows));
      }
    completions = std::move(next);
  }
  return completions;
}

bool rows_surjective(const ModelProfile& profile, const std::vector<int>& rows) {
  std::vector<ElemId> seed;
  for (size_t j = 0; j < profile.blocks().size(); ++j)
    for (ElemId e : profile.blocks()[j].homs.homs[rows[j]].gen_images)
      seed.push_back(e);
  return static_cast<long>(profile.group().subgroup_closure(seed).size()) ==
         profile.group().order();
}

}  // namespace

MomentExperimentReport moment_experiment(const ModelProfile& profile,
                                         const std::vector<int>& target_rows,
                                         size_t target_places, SampleMode mode,
                                         long samples, uint64_t seed) {
  const FiniteGroup& g = profile.group();
  MomentExperimentReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.mode = mode == SampleMode::Structural ? "structural" : "no-torsion";
  rep.engine = profile.engine() == EngineKind::Abelian ? "abelian" : "generic";

  auto candidates = candidate_tuples(profile, target_rows, target_places);
  std::vector<char> surjective(candidates.size());
  for (size_t c = 0; c < candidates.size(); ++c)
    surjective[c] = rows_surjective(profile, candidates[c]);

  std::optional<JointFrame> frame;
  if (profile.engine() == EngineKind::Generic) frame.emplace(profile);

  // closed form |G^ab[mu]|^-1 |G|^(-|S0 u P_oo| + 1)
  long finite_s0 = 0;
  for (size_t j = 0; j < target_places; ++j)
    finite_s0 += profile.blocks()[j].place.archimedean() ? 0 : 1;
  Rat closed = make_rat(1, ab_torsion_order(g, profile.base().mu));
  for (long i = 0; i + 1 < finite_s0 + profile.base().infinite_places(); ++i)
    closed /= g.order();
  rep.closed_form = to_double(closed);
  rep.closed_form_exact = to_string(closed);

  std::vector<long> counts(samples);
#pragma omp parallel for schedule(static)
  for (long s = 0; s < samples; ++s) {
    RelationBundle bundle =
        sample_group(profile, frame ? &*frame : nullptr, mode, seed, s);
    long epi = 0;
    for (size_t c = 0; c < candidates.size(); ++c) {
      if (!surjective[c]) continue;
      bool killed = true;
      for (int r = 0; r < profile.relation_count() && killed; ++r)
        if (bundle.eval(profile, r, candidates[c]) != 0) killed = false;
      if (killed && mode == SampleMode::Structural &&
          bundle.eval_torsion(profile, candidates[c]) != 0)
        killed = false;
      if (killed) ++epi;
    }
    counts[s] = epi;
  }
  double mean = 0.0;
  for (long c : counts) mean += static_cast<double>(c);
  mean /= static_cast<double>(samples);
  double var = 0.0;
  for (long c : counts) var += (c - mean) * (c - mean);
  var /= std::max<double>(1.0, static_cast<double>(samples - 1));
  rep.empirical_mean = mean;
  rep.standard_error = std::sqrt(var / static_cast<double>(samples));

  // exact reference when the joint group is enumerable
  if (profile.engine() == EngineKind::Generic && frame->plain_group()) {
    Rat exact(0);
    const int k = profile.relation_count();
    for (size_t c = 0; c < candidates.size(); ++c) {
      if (!surjective[c]) continue;
      auto t = profile.tuple_index(candidates[c]);
      if (!t) continue;
      Rat p(1);
      Rat kill = frame->exact_kill_probability_plain(*t);
      for (int r = 0; r < k; ++r) p *= kill;
      if (mode == SampleMode::Structural)
        p *= frame->exact_kill_probability_torsion(*t);
      exact += p;
    }
    rep.exact_survival = to_double(exact);
    rep.exact_survival_exact = to_string(exact);
  } else if (profile.engine() == EngineKind::Abelian) {
    AbelianCounter counter(profile);
    Rat exact = counter.expected_epi_count(target_rows, target_places, mode);
    rep.exact_survival = to_double(exact);
    rep.exact_survival_exact = to_string(exact);
  }
  return rep;
}

LlnReport lln_experiment(const ModelProfile& profile,
                         const std::vector<long>& x_schedule,
                         const std::vector<double>& normalizers,
                         SampleMode mode, long samples, uint64_t seed) {
  if (x_schedule.size() != normalizers.size())
    throw std::invalid_argument("schedule and normalizers differ in length");
  if (profile.engine() != EngineKind::Abelian)
    throw std::invalid_argument("lln_experiment runs on the abelian engine");
  long x_max = *std::max_element(x_schedule.begin(), x_schedule.end());
  long representable = profile.representable_bound(x_max + 1);
  if (x_max > representable)
    throw std::invalid_argument(
        "X = " + std::to_string(x_max) +
        " exceeds the representable range of this S (bound " +
        std::to_string(representable) + "); enlarge S");

  LlnReport rep;
  rep.samples_per_x = samples;
  rep.seed = seed;
  rep.mode = mode == SampleMode::Structural ? "structural" : "no-torsion";
  rep.beta_warning = !min_weight_gen_check(profile.group(), profile.weight());

  AbelianCounter counter(profile);
  std::vector<std::vector<double>> ratios(x_schedule.size(),
                                          std::vector<double>(samples));
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < samples; ++s) {
    RelationBundle bundle = sample_group(profile, nullptr, mode, seed, s);
    for (size_t i = 0; i < x_schedule.size(); ++i) {
      Int n = counter.count_surjections(bundle, x_schedule[i]);
      ratios[i][s] = mpz_get_d(n.get_mpz_t()) / normalizers[i];
    }
  }
  for (size_t i = 0; i < x_schedule.size(); ++i) {
    LlnPoint pt;
    pt.x = x_schedule[i];
    pt.normalizer = normalizers[i];
    double mean = 0.0;
    for (double r : ratios[i]) mean += r;
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (double r : ratios[i]) var += (r - mean) * (r - mean);
    var /= std::max<double>(1.0, static_cast<double>(samples - 1));
    pt.ratio_mean = mean;
    pt.ratio_variance = var;
    pt.ratios = ratios[i];
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

GrunwaldReport grunwald_diagnostic(const ModelProfile& profile,
                                   size_t designated_places, SampleMode mode,
                                   long samples, uint64_t seed) {
  if (profile.engine() != EngineKind::Generic)
    throw std::invalid_argument("grunwald_diagnostic needs the generic engine");
  if (designated_places == 0 || designated_places > profile.blocks().size())
    throw std::invalid_argument("bad designated place count");
  JointFrame frame(profile);

  // sub-tuple space over the designated places
  std::map<std::vector<int>, long> realized_count;
  std::vector<std::vector<int>> sub_tuples{{}};
  for (size_t j = 0; j < designated_places; ++j) {
    std::vector<std::vector<int>> next;
    for (const auto& partial : sub_tuples)
      for (int r : profile.blocks()[j].allowed) {
        auto rows = partial;
        rows.push_back(r);
        next.push_back(std::move(rows));
      }
    sub_tuples = std::move(next);
  }
  for (const auto& st : sub_tuples) realized_count[st] = 0;

  std::vector<std::vector<char>> realized(
      samples, std::vector<char>(sub_tuples.size(), 0));
  std::map<std::vector<int>, size_t> sub_index;
  for (size_t i = 0; i < sub_tuples.size(); ++i) sub_index[sub_tuples[i]] = i;

#pragma omp parallel for schedule(static)
  for (long s = 0; s < samples; ++s) {
    RelationBundle bundle = sample_group(profile, &frame, mode, seed, s);
    for (long t = 0; t < profile.frame_size(); ++t) {
      if (!bundle.kills_tuple(profile, t)) continue;
      auto rows = profile.tuple_rows(t);
      rows.resize(designated_places);
      realized[s][sub_index.at(rows)] = 1;
    }
  }
  for (long s = 0; s < samples; ++s)
    for (size_t i = 0; i < sub_tuples.size(); ++i)
      if (realized[s][i]) ++realized_count[sub_tuples[i]];

  GrunwaldReport rep;
  rep.designated_places = designated_places;
  rep.samples = samples;
  rep.seed = seed;
  for (const auto& [st, count] : realized_count) {
    GrunwaldRow row;
    row.sub_tuple = st;
    row.frequency = static_cast<double>(count) / static_cast<double>(samples);
    rep.rows.push_back(std::move(row));
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const GrunwaldRow& a, const GrunwaldRow& b) {
                     return a.frequency > b.frequency;
                   });
  return rep;
}

// Marginal law of one relation at a single tuple: a plain Haar relation
// evaluates uniformly on the joint image; the torsion relation evaluates
// uniformly on <commutators of the image, torsion images of the rows>,
// the image of the torsion-preimage subgroup.
Rat marginal_kill_plain(const ModelProfile& profile,
                        const std::vector<int>& rows) {
  const FiniteGroup& g = profile.group();
  std::vector<ElemId> seed;
  for (size_t j = 0; j < profile.blocks().size(); ++j)
    for (ElemId e : profile.blocks()[j].homs.homs[rows[j]].gen_images)
      seed.push_back(e);
  return make_rat(1, static_cast<long>(g.subgroup_closure(seed).size()));
}

Rat marginal_kill_torsion(const ModelProfile& profile,
                          const std::vector<int>& rows) {
  const FiniteGroup& g = profile.group();
  std::vector<ElemId> image_gens;
  std::vector<ElemId> seed;
  for (size_t j = 0; j < profile.blocks().size(); ++j) {
    const LocalHom& h = profile.blocks()[j].homs.homs[rows[j]];
    for (ElemId e : h.gen_images) image_gens.push_back(e);
    if (h.torsion_image != 0) seed.push_back(h.torsion_image);
  }
  auto image = g.subgroup_closure(image_gens);
  // commutator subgroup of the image: normal closure (inside the image) of
  // the generator commutators
  std::vector<ElemId> comms;
  for (ElemId a : image_gens)
    for (ElemId b : image_gens) {
      ElemId c = g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b)));
      if (c != 0) comms.push_back(c);
    }
  std::set<ElemId> pending(comms.begin(), comms.end());
  std::vector<ElemId> work(comms.begin(), comms.end());
  while (!work.empty()) {
    ElemId x = work.back();
    work.pop_back();
    for (ElemId h : image_gens) {
      ElemId y = g.mul(g.mul(h, x), g.inv(h));
      if (y != 0 && pending.insert(y).second) work.push_back(y);
    }
  }
  seed.insert(seed.end(), pending.begin(), pending.end());
  return make_rat(1, static_cast<long>(g.subgroup_closure(seed).size()));
}

std::vector<SurvivalGapRow> survival_gap_report(const ModelProfile& profile) {
  if (profile.engine() != EngineKind::Generic)
    throw std::invalid_argument("survival gap report needs the generic engine");
  if (profile.frame_size() < 0)
    throw std::invalid_argument("survival gap report needs an addressable frame");
  const FiniteGroup& g = profile.group();
  const int k = profile.relation_count();
  long finite_s = 0;
  for (const auto& blk : profile.blocks())
    finite_s += blk.place.archimedean() ? 0 : 1;
  Rat closed = make_rat(1, ab_torsion_order(g, profile.base().mu));
  for (long i = 0; i + 1 < finite_s + profile.base().infinite_places(); ++i)
    closed /= g.order();

  std::vector<SurvivalGapRow> rows;
  for (long t = 0; t < profile.frame_size(); ++t) {
    auto tuple_rows = profile.tuple_rows(t);
    SurvivalGapRow row;
    row.tuple = t;
    row.surjective = profile.tuple_surjective(t);
    Rat plain = marginal_kill_plain(profile, tuple_rows);
    Rat torsion = marginal_kill_torsion(profile, tuple_rows);
    row.plain_kill_exact = to_string(plain);
    row.torsion_kill_exact = to_string(torsion);
    Rat survival(1);
    for (int r = 0; r < k; ++r) survival *= plain;
    survival *= torsion;
    row.survival_structural = to_double(survival);
    row.survival_closed_form = to_double(closed);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mbtk
