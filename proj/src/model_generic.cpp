#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "mbtk/model.hpp"

namespace mbtk {

namespace {

struct VecHash {
  size_t operator()(const std::vector<uint8_t>& v) const {
    size_t h = 1469598103934665603ull;
    for (uint8_t b : v) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return h;
  }
};

using VecSet = std::unordered_set<std::vector<uint8_t>, VecHash>;

std::vector<uint8_t> vec_mul(const FiniteGroup& g, const std::vector<uint8_t>& a,
                             const std::vector<uint8_t>& b) {
  std::vector<uint8_t> out(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    out[i] = static_cast<uint8_t>(g.mul(a[i], b[i]));
  return out;
}

std::vector<uint8_t> vec_inv(const FiniteGroup& g, const std::vector<uint8_t>& a) {
  std::vector<uint8_t> out(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    out[i] = static_cast<uint8_t>(g.inv(a[i]));
  return out;
}

bool vec_trivial(const std::vector<uint8_t>& a) {
  return std::all_of(a.begin(), a.end(), [](uint8_t b) { return b == 0; });
}

// subgroup closure of generating vectors, up to cap; nullopt past the cap
std::optional<std::vector<std::vector<uint8_t>>> close_vectors(
    const FiniteGroup& g, const std::vector<std::vector<uint8_t>>& gens,
    size_t len, long cap) {
  std::vector<std::vector<uint8_t>> elements{std::vector<uint8_t>(len, 0)};
  VecSet seen{elements[0]};
  std::vector<size_t> work{0};
  while (!work.empty()) {
    size_t cur = work.back();
    work.pop_back();
    for (const auto& gen : gens) {
      auto next = vec_mul(g, elements[cur], gen);
      if (seen.insert(next).second) {
        elements.push_back(next);
        if (static_cast<long>(elements.size()) > cap) return std::nullopt;
        work.push_back(elements.size() - 1);
      }
    }
  }
  return elements;
}

}  // namespace

JointFrame::JointFrame(const ModelProfile& profile) : profile_(&profile) {
  const FiniteGroup& g = profile.group();
  const long n = profile.frame_size();
  if (n == 0) return;
  // generator vectors: (phi_p(x))_phi for each abstract local generator x
  for (size_t j = 0; j < profile.blocks().size(); ++j) {
    const PlaceBlock& blk = profile.blocks()[j];
    size_t arity = blk.homs.homs.empty() ? 0 : blk.homs.homs[0].gen_images.size();
    for (size_t i = 0; i < arity; ++i) {
      std::vector<uint8_t> vec(n);
      for (long t = 0; t < n; ++t) {
        auto rows = profile.tuple_rows(t);
        vec[t] = static_cast<uint8_t>(blk.homs.homs[rows[j]].gen_images[i]);
      }
      gen_vectors_.push_back(std::move(vec));
    }
    std::vector<uint8_t> tvec(n);
    for (long t = 0; t < n; ++t) {
      auto rows = profile.tuple_rows(t);
      tvec[t] = static_cast<uint8_t>(blk.homs.homs[rows[j]].torsion_image);
    }
    torsion_vectors_.push_back(std::move(tvec));
  }

  const long cap = profile.options().enumeration_cap;
  e_enum_ = close_vectors(g, gen_vectors_, n, cap);
  if (e_enum_) {
    // image of the torsion-preimage subgroup: <[E,E], torsion lifts>,
    // with [E,E] as the normal closure of generator commutators
    std::vector<std::vector<uint8_t>> comm_gens;
    VecSet comm_seen;
    for (const auto& u : gen_vectors_)
      for (const auto& v : gen_vectors_) {
        auto c = vec_mul(g, vec_mul(g, u, v),
                         vec_inv(g, vec_mul(g, v, u)));
        if (!vec_trivial(c) && comm_seen.insert(c).second)
          comm_gens.push_back(c);
      }
    // close under conjugation by the generators
    for (size_t i = 0; i < comm_gens.size(); ++i)
      for (const auto& u : gen_vectors_) {
        auto c = vec_mul(g, vec_mul(g, u, comm_gens[i]), vec_inv(g, u));
        if (!vec_trivial(c) && comm_seen.insert(c).second) comm_gens.push_back(c);
      }
    auto tgens = comm_gens;
    for (const auto& t : torsion_vectors_)
      if (!vec_trivial(t)) tgens.push_back(t);
    t_enum_ = close_vectors(g, tgens, n, cap);
  }
}

std::vector<uint8_t> JointFrame::draw_plain(Rng& rng) const {
  if (!e_enum_)
    throw std::logic_error("E not enumerable; use a PlainWalker");
  return (*e_enum_)[rng.below(e_enum_->size())];
}

std::vector<uint8_t> JointFrame::draw_torsion(Rng& rng) const {
  if (!t_enum_)
    throw std::logic_error("torsion group not enumerable; use a TorsionWalker");
  return (*t_enum_)[rng.below(t_enum_->size())];
}

namespace {

void warn_below_floor(const WalkParams& wp, int rack_size, long burnin) {
  if ((wp.rack > 0 && wp.rack < 10) || (wp.burnin > 0 && wp.burnin < 20L * rack_size) ||
      (wp.stride > 0 && wp.stride < 5))
    std::fprintf(stderr,
                 "warning: walk parameters below the safety floor "
                 "(rack %d, burnin %ld, stride %d); draws may be far from "
                 "uniform\n",
                 rack_size, burnin, wp.stride);
}

}  // namespace

PlainWalker::PlainWalker(const JointFrame& frame, Rng rng)
    : frame_(&frame), rng_(rng) {
  const WalkParams& wp = frame.profile().options().walk;
  const auto& gens = frame.generator_vectors();
  const int rack_size =
      wp.rack > 0 ? wp.rack : std::max<int>(10, 2 * static_cast<int>(gens.size()));
  stride_ = std::max(wp.stride, 1);
  for (int i = 0; i < rack_size; ++i) rack_.push_back(gens[i % gens.size()]);
  acc_.assign(gens[0].size(), 0);
  const long burnin = wp.burnin > 0 ? wp.burnin : 200L * rack_size;
  warn_below_floor(wp, rack_size, burnin);
  for (long s = 0; s < burnin; ++s) step();
}

void PlainWalker::step() {
  const FiniteGroup& g = frame_->profile().group();
  size_t i = rng_.below(rack_.size());
  size_t j = rng_.below(rack_.size() - 1);
  if (j >= i) ++j;
  const auto other = rng_.coin() ? rack_[j] : vec_inv(g, rack_[j]);
  rack_[i] =
      rng_.coin() ? vec_mul(g, rack_[i], other) : vec_mul(g, other, rack_[i]);
  acc_ = vec_mul(g, acc_, rack_[i]);
}

std::vector<uint8_t> PlainWalker::draw() {
  for (int s = 0; s < stride_; ++s) step();
  return acc_;
}

TorsionWalker::TorsionWalker(const JointFrame& frame, Rng rng)
    : frame_(&frame), rng_(rng) {
  const WalkParams& wp = frame.profile().options().walk;
  const auto& gens = frame.generator_vectors();
  const int rack_size =
      wp.rack > 0 ? wp.rack : std::max<int>(10, 2 * static_cast<int>(gens.size()));
  stride_ = std::max(wp.stride, 1);
  for (int i = 0; i < rack_size; ++i) rack_.push_back(gens[i % gens.size()]);
  for (const auto& t : frame.torsion_vectors())
    if (!vec_trivial(t)) live_torsion_.push_back(t);
  state_.assign(gens[0].size(), 0);
  const long burnin = wp.burnin > 0 ? wp.burnin : 200L * rack_size;
  warn_below_floor(wp, rack_size, burnin);
  for (long s = 0; s < burnin; ++s) step();
}

void TorsionWalker::step() {
  const FiniteGroup& g = frame_->profile().group();
  // keep the conjugator rack moving
  {
    size_t i = rng_.below(rack_.size());
    size_t j = rng_.below(rack_.size() - 1);
    if (j >= i) ++j;
    const auto other = rng_.coin() ? rack_[j] : vec_inv(g, rack_[j]);
    rack_[i] =
        rng_.coin() ? vec_mul(g, rack_[i], other) : vec_mul(g, other, rack_[i]);
  }
  if (rng_.coin()) return;  // lazy half
  const auto& gens = frame_->generator_vectors();
  std::vector<uint8_t> s;
  if (!live_torsion_.empty() && rng_.below(3) == 0) {
    s = live_torsion_[rng_.below(live_torsion_.size())];
  } else {
    const auto& u = gens[rng_.below(gens.size())];
    const auto& v = gens[rng_.below(gens.size())];
    auto comm = vec_mul(g, vec_mul(g, u, v), vec_inv(g, vec_mul(g, v, u)));
    const auto& c = rack_[rng_.below(rack_.size())];
    s = vec_mul(g, vec_mul(g, c, comm), vec_inv(g, c));
  }
  if (rng_.coin()) s = vec_inv(g, s);
  state_ = vec_mul(g, state_, s);
}

std::vector<uint8_t> TorsionWalker::draw() {
  for (int i = 0; i < stride_; ++i) step();
  return state_;
}

Rat JointFrame::exact_kill_probability_plain(long tuple) const {
  if (!e_enum_) throw std::logic_error("E not enumerable at this cap");
  long killed = 0;
  for (const auto& e : *e_enum_) killed += e[tuple] == 0;
  return make_rat(killed, static_cast<long>(e_enum_->size()));
}

Rat JointFrame::exact_kill_probability_torsion(long tuple) const {
  if (!t_enum_) throw std::logic_error("torsion subgroup not enumerable");
  long killed = 0;
  for (const auto& e : *t_enum_) killed += e[tuple] == 0;
  return make_rat(killed, static_cast<long>(t_enum_->size()));
}

ElemId RelationBundle::eval(const ModelProfile& profile, int relation,
                            const std::vector<int>& rows) const {
  const FiniteGroup& g = profile.group();
  if (engine == EngineKind::Generic) {
    auto t = profile.tuple_index(rows);
    if (!t) throw std::invalid_argument("rows outside the frame");
    return vectors[relation][*t];
  }
  ElemId acc = 0;
  for (size_t j = 0; j < profile.blocks().size(); ++j) {
    const PlaceBlock& blk = profile.blocks()[j];
    const LocalHom& h = blk.homs.homs[rows[j]];
    for (size_t i = 0; i < h.gen_images.size(); ++i)
      acc = g.mul(acc, g.pow(h.gen_images[i], coefficients[relation][j][i]));
  }
  return acc;
}

ElemId RelationBundle::eval_torsion(const ModelProfile& profile,
                                    const std::vector<int>& rows) const {
  const FiniteGroup& g = profile.group();
  if (engine == EngineKind::Generic) {
    auto t = profile.tuple_index(rows);
    if (!t) throw std::invalid_argument("rows outside the frame");
    return torsion_vector[*t];
  }
  ElemId acc = 0;
  for (size_t j = 0; j < profile.blocks().size(); ++j) {
    const PlaceBlock& blk = profile.blocks()[j];
    const LocalHom& h = blk.homs.homs[rows[j]];
    acc = g.mul(acc, g.pow(h.torsion_image, torsion_multiplier[j]));
  }
  return acc;
}

bool RelationBundle::kills_tuple(const ModelProfile& profile, long tuple) const {
  if (engine == EngineKind::Generic) {
    for (const auto& vec : vectors)
      if (vec[tuple] != 0) return false;
    if (mode == SampleMode::Structural && !torsion_vector.empty() &&
        torsion_vector[tuple] != 0)
      return false;
    return true;
  }
  auto rows = profile.tuple_rows(tuple);
  for (size_t r = 0; r < coefficients.size(); ++r)
    if (eval(profile, static_cast<int>(r), rows) != 0) return false;
  if (mode == SampleMode::Structural &&
      eval_torsion(profile, rows) != 0)
    return false;
  return true;
}

RelationBundle sample_group(const ModelProfile& profile, const JointFrame* frame,
                            SampleMode mode, uint64_t seed, long sample_index) {
  RelationBundle bundle;
  bundle.mode = mode;
  bundle.engine = profile.engine();
  bundle.seed = seed;
  bundle.sample_index = sample_index;
  const int k = profile.relation_count();
  if (profile.engine() == EngineKind::Generic) {
    if (!frame) throw std::invalid_argument("generic engine needs a frame");
    if (frame->plain_group()) {
      for (int r = 0; r < k; ++r) {
        Rng rng = Rng::stream(seed, {0x11, static_cast<uint64_t>(sample_index),
                                     static_cast<uint64_t>(r)});
        bundle.vectors.push_back(frame->draw_plain(rng));
      }
    } else {
      PlainWalker walker(
          *frame, Rng::stream(seed, {0x11, static_cast<uint64_t>(sample_index)}));
      for (int r = 0; r < k; ++r) bundle.vectors.push_back(walker.draw());
    }
    if (mode == SampleMode::Structural) {
      Rng rng = Rng::stream(seed, {0x12, static_cast<uint64_t>(sample_index)});
      if (frame->torsion_group()) {
        bundle.torsion_vector = frame->draw_torsion(rng);
      } else {
        TorsionWalker walker(*frame, rng);
        bundle.torsion_vector = walker.draw();
      }
    }
    return bundle;
  }
  // abelian engine: independent uniform block coefficients; streams keyed by
  // the place norm so that growing S leaves shared draws unchanged
  bundle.coefficients.resize(k);
  for (int r = 0; r < k; ++r) {
    bundle.coefficients[r].resize(profile.blocks().size());
    for (size_t j = 0; j < profile.blocks().size(); ++j) {
      const PlaceBlock& blk = profile.blocks()[j];
      Rng rng = Rng::stream(
          seed, {0x21, static_cast<uint64_t>(sample_index),
                 static_cast<uint64_t>(r),
                 static_cast<uint64_t>(blk.place.archimedean() ? 0 : blk.place.norm())});
      for (long c : blk.gen_orders)
        bundle.coefficients[r][j].push_back(static_cast<long>(rng.below(c)));
    }
  }
  if (mode == SampleMode::Structural) {
    bundle.torsion_multiplier.resize(profile.blocks().size());
    for (size_t j = 0; j < profile.blocks().size(); ++j) {
      const PlaceBlock& blk = profile.blocks()[j];
      Rng rng = Rng::stream(
          seed, {0x22, static_cast<uint64_t>(sample_index),
                 static_cast<uint64_t>(blk.place.archimedean() ? 0 : blk.place.norm())});
      // order of the torsion element inside the block
      long ord = 1;
      for (size_t i = 0; i < blk.gen_orders.size(); ++i) {
        long c = blk.gen_orders[i];
        long t = blk.torsion_coords[i] % c;
        if (t != 0) ord = std::lcm(ord, c / std::gcd(c, t));
      }
      bundle.torsion_multiplier[j] = static_cast<long>(rng.below(ord));
    }
  }
  return bundle;
}

}  // namespace mbtk
