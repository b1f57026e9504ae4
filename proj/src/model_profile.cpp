#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "mbtk/model.hpp"

namespace mbtk {

ModelProfile ModelProfile::build(const FiniteGroup& g, std::vector<Place> s,
                                 const LocalConditions& sigma,
                                 const WeightFunction& w,
                                 const BaseFieldProfile& base,
                                 const WildTableSet& wild,
                                 const ModelOptions& opt) {
  if (g.order() > 255)
    throw GroupTooLarge("model engines support |G| <= 255");
  bool has_arch = false;
  for (const auto& v : s) has_arch = has_arch || v.archimedean();
  if (!has_arch)
    throw std::invalid_argument("S must contain the infinite places");
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw std::invalid_argument("S has a duplicate place");
  if (opt.engine == EngineKind::Abelian && !g.is_abelian())
    throw std::invalid_argument(
        "nonabelian target routed to the abelian engine");

  ModelProfile p;
  p.g_ = &g;
  p.w_ = w;
  p.sigma_ = sigma;
  p.base_ = base;
  p.wild_ = wild;
  p.opt_ = opt;

  // The joint frame only exists for the generic engine; the abelian engine
  // works blockwise, so an oversized frame just disables tuple addressing.
  long frame = 1;
  bool oversized = false;
  for (const auto& v : s) {
    PlaceBlock blk;
    blk.place = v;
    blk.homs = local_hom_set(g, v, w, &wild, base.mu);
    blk.allowed = sigma.allowed_rows(blk.homs);
    blk.allowed_slot.assign(blk.homs.homs.size(), -1);
    for (size_t i = 0; i < blk.allowed.size(); ++i)
      blk.allowed_slot[blk.allowed[i]] = static_cast<int>(i);
    blk.gen_orders = blk.homs.generator_orders;
    blk.inertia_gens = blk.homs.inertia_generators;
    blk.torsion_coords = blk.homs.torsion_coordinates;
    if (blk.allowed.empty()) frame = 0;
    if (frame > 0 &&
        frame > opt.frame_cap / std::max<long>(blk.allowed.size(), 1)) {
      if (opt.engine == EngineKind::Generic)
        throw FrameTooLarge(frame * static_cast<long>(blk.allowed.size()),
                            opt.frame_cap);
      oversized = true;
    }
    if (!oversized) frame *= static_cast<long>(blk.allowed.size());
    p.blocks_.push_back(std::move(blk));
  }
  p.frame_size_ = oversized ? -1 : frame;
  p.strides_.assign(p.blocks_.size(), 1);
  if (!oversized)
    for (size_t j = 1; j < p.blocks_.size(); ++j)
      p.strides_[j] = p.strides_[j - 1] *
                      static_cast<long>(p.blocks_[j - 1].allowed.size());
  p.surjective_cache_.assign(oversized ? 0 : std::max<long>(frame, 0), -1);

  // inertia classes per place, over the allowed rows
  for (const auto& blk : p.blocks_) {
    std::map<std::vector<ElemId>, InertiaClass> classes;
    for (int r : blk.allowed) {
      const LocalHom& h = blk.homs.homs[r];
      std::vector<ElemId> images;
      for (int i : blk.inertia_gens) images.push_back(h.gen_images[i]);
      auto it = classes.find(images);
      if (it == classes.end()) {
        InertiaClass cls;
        cls.images = images;
        cls.exponent = blk.place.archimedean() ? 0 : local_exponent(h, w);
        cls.trivial =
            std::all_of(images.begin(), images.end(),
                        [](ElemId e) { return e == 0; });
        cls.row_count = 1;
        classes.emplace(std::move(images), std::move(cls));
      } else {
        ++it->second.row_count;
        if (!blk.place.archimedean() &&
            it->second.exponent != local_exponent(h, w))
          throw std::invalid_argument(
              "rows with equal inertia data but unequal exponents at " +
              blk.place.label);
      }
    }
    std::vector<InertiaClass> list;
    for (auto& [k, cls] : classes) list.push_back(std::move(cls));
    std::sort(list.begin(), list.end(),
              [](const InertiaClass& a, const InertiaClass& b) {
                return a.images < b.images;
              });
    p.inertia_classes_.push_back(std::move(list));
  }
  return p;
}

int ModelProfile::relation_count() const {
  return static_cast<int>(blocks_.size()) - 1;
}

std::vector<int> ModelProfile::tuple_rows(long t) const {
  if (frame_size_ < 0)
    throw std::logic_error("joint frame unavailable at this size");
  std::vector<int> rows(blocks_.size());
  for (size_t j = 0; j < blocks_.size(); ++j) {
    long slots = static_cast<long>(blocks_[j].allowed.size());
    rows[j] = blocks_[j].allowed[(t / strides_[j]) % slots];
  }
  return rows;
}

std::optional<long> ModelProfile::tuple_index(const std::vector<int>& rows) const {
  if (frame_size_ < 0)
    throw std::logic_error("joint frame unavailable at this size");
  if (rows.size() != blocks_.size()) return std::nullopt;
  long t = 0;
  for (size_t j = 0; j < blocks_.size(); ++j) {
    int slot = blocks_[j].allowed_slot[rows[j]];
    if (slot < 0) return std::nullopt;
    t += strides_[j] * slot;
  }
  return t;
}

bool ModelProfile::tuple_surjective(long t) const {
  if (surjective_cache_[t] >= 0) return surjective_cache_[t] != 0;
  auto rows = tuple_rows(t);
  std::vector<ElemId> seed;
  for (size_t j = 0; j < blocks_.size(); ++j)
    for (ElemId e : blocks_[j].homs.homs[rows[j]].gen_images) seed.push_back(e);
  bool full =
      static_cast<long>(g_->subgroup_closure(seed).size()) == g_->order();
  surjective_cache_[t] = full ? 1 : 0;
  return full;
}

long ModelProfile::tuple_invariant(long t, long bound) const {
  auto rows = tuple_rows(t);
  long inv = 1;
  for (size_t j = 0; j < blocks_.size(); ++j) {
    const auto& blk = blocks_[j];
    if (blk.place.archimedean()) continue;
    int e = local_exponent(blk.homs.homs[rows[j]], *w_);
    for (int i = 0; i < e; ++i) {
      if (inv > bound / blk.place.norm()) return bound + 1;
      inv *= blk.place.norm();
    }
  }
  return inv;
}

long ModelProfile::representable_bound(long stream_limit) const {
  std::set<Place> in_s;
  for (const auto& blk : blocks_) in_s.insert(blk.place);
  long bound = stream_limit;
  for (const Place& v : rational_places(stream_limit)) {
    if (v.archimedean() || in_s.count(v)) continue;
    long min_ram = 0;
    if (g_->order() % v.p == 0) {
      auto it = wild_.find(v.p);
      if (it == wild_.end()) {
        // no table: be conservative, any ramified exponent >= 1 may exist
        min_ram = 1;
      } else {
        min_ram = 0;
        for (const auto& h : it->second.rows)
          if (!h.unramified) {
            int e = local_exponent(h, *w_);
            if (min_ram == 0 || e < min_ram) min_ram = e;
          }
      }
    } else {
      LocalHomSet set = local_hom_set(*g_, v, *w_, &wild_, base_.mu);
      auto rows = sigma_.allowed_rows(set);
      min_ram = 0;
      for (int r : rows)
        if (!set.homs[r].unramified) {
          int e = local_exponent(set.homs[r], *w_);
          if (min_ram == 0 || e < min_ram) min_ram = e;
        }
    }
    if (min_ram == 0) continue;  // place cannot ramify
    double contrib = std::pow(static_cast<double>(v.norm()), min_ram);
    if (contrib < static_cast<double>(bound))
      bound = static_cast<long>(contrib) - 1;
  }
  return bound;
}

}  // namespace mbtk
