#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "mbtk/model.hpp"

namespace mbtk {

AbelianBasis abelian_basis(const FiniteGroup& g,
                           const std::vector<ElemId>& subgroup_elements) {
  AbelianBasis out;
  out.elements = subgroup_elements;
  std::sort(out.elements.begin(), out.elements.end());
  const size_t n = out.elements.size();

  auto in_span = [&](const std::vector<char>& span, ElemId e) {
    return span[std::lower_bound(out.elements.begin(), out.elements.end(), e) -
                out.elements.begin()] != 0;
  };
  auto mark = [&](std::vector<char>& span, ElemId e) {
    span[std::lower_bound(out.elements.begin(), out.elements.end(), e) -
         out.elements.begin()] = 1;
  };

  std::vector<char> span(n, 0);
  mark(span, 0);
  size_t span_size = 1;
  while (span_size < n) {
    // order of x modulo the current span
    auto ord_mod = [&](ElemId x) {
      long k = 1;
      ElemId y = x;
      while (!in_span(span, y)) {
        y = g.mul(y, x);
        ++k;
      }
      return k;
    };
    long best_ord = 0;
    ElemId best = -1;
    for (ElemId x : out.elements) {
      if (in_span(span, x)) continue;
      long o = ord_mod(x);
      if (o > best_ord) {
        best_ord = o;
        best = x;
      }
    }
    // among elements of maximal quotient order, need one whose cyclic group
    // meets the span trivially and whose honest order equals the quotient
    // order; the splitting theorem guarantees one exists
    ElemId chosen = -1;
    for (ElemId x : out.elements) {
      if (in_span(span, x) || ord_mod(x) != best_ord) continue;
      if (g.element_order(x) != best_ord) continue;
      bool clean = true;
      ElemId y = x;
      for (long k = 1; k < best_ord && clean; ++k) {
        if (in_span(span, y) && y != 0) clean = false;
        y = g.mul(y, x);
      }
      if (clean) {
        chosen = x;
        break;
      }
    }
    if (chosen < 0) {
      (void)best;
      throw std::logic_error("abelian basis extraction failed");
    }
    out.basis.push_back(chosen);
    out.orders.push_back(best_ord);
    // grow the span
    std::vector<ElemId> current;
    for (size_t i = 0; i < n; ++i)
      if (span[i]) current.push_back(out.elements[i]);
    for (ElemId s : current) {
      ElemId y = s;
      for (long k = 0; k < best_ord; ++k) {
        if (!in_span(span, y)) {
          mark(span, y);
          ++span_size;
        }
        y = g.mul(y, chosen);
      }
    }
  }

  // coordinates by full enumeration of the box
  std::vector<long> tuple(out.basis.size(), 0);
  while (true) {
    ElemId e = 0;
    for (size_t i = 0; i < out.basis.size(); ++i)
      e = g.mul(e, g.pow(out.basis[i], tuple[i]));
    if (!out.coords.emplace(e, tuple).second)
      throw std::logic_error("abelian basis is not a direct sum");
    size_t pos = 0;
    while (pos < out.basis.size()) {
      if (++tuple[pos] < out.orders[pos]) break;
      tuple[pos] = 0;
      ++pos;
    }
    if (pos == out.basis.size()) break;
    if (out.basis.empty()) break;
  }
  if (out.coords.size() != n)
    throw std::logic_error("abelian coordinates do not cover the subgroup");
  return out;
}

namespace {

// Solutions w in prod_j Z/box_j of A w = rhs (mod d), where box_j | d and
// the variable enters as (d / box_j) w_j. Diagonalize by integer row and
// column operations, carrying the right-hand side along.
Int count_box_solutions(std::vector<std::vector<long>> a, std::vector<long> rhs,
                        long d, const std::vector<long>& box) {
  const size_t k = a.size();
  const size_t n = k == 0 ? 0 : a[0].size();
  // scale columns by d / box_j
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < k; ++i)
      a[i][j] = (a[i][j] % d) * ((d / box[j]) % d) % d;
  for (auto& r : rhs) r = ((r % d) + d) % d;

  auto reduce = [&](long v) { return ((v % d) + d) % d; };
  size_t t = 0;
  while (t < k && t < n) {
    // find a nonzero pivot in the submatrix
    size_t pi = t, pj = t;
    bool found = false;
    long best = 0;
    for (size_t i = t; i < k; ++i)
      for (size_t j = t; j < n; ++j) {
        long v = reduce(a[i][j]);
        if (v == 0) continue;
        long m = std::min(v, d - v);
        if (!found || m < best) {
          best = m;
          pi = i;
          pj = j;
          found = true;
        }
      }
    if (!found) break;
    std::swap(a[t], a[pi]);
    std::swap(rhs[t], rhs[pi]);
    for (size_t i = 0; i < k; ++i) std::swap(a[i][t], a[i][pj]);
    bool clean = true;
    // eliminate the rest of row t and column t
    for (size_t i = t + 1; i < k; ++i) {
      long v = reduce(a[i][t]);
      if (v == 0) continue;
      long pivot = reduce(a[t][t]);
      long q = v / std::max(pivot, 1L);
      if (pivot != 0 && v % pivot == 0) {
        for (size_t j = t; j < n; ++j)
          a[i][j] = reduce(a[i][j] - q * a[t][j]);
        rhs[i] = reduce(rhs[i] - q * rhs[t]);
      } else {
        // gcd step: combine rows
        for (size_t j = t; j < n; ++j)
          a[i][j] = reduce(a[i][j] - q * a[t][j]);
        rhs[i] = reduce(rhs[i] - q * rhs[t]);
        std::swap(a[t], a[i]);
        std::swap(rhs[t], rhs[i]);
        clean = false;
      }
      if (!clean) break;
    }
    if (!clean) continue;
    for (size_t j = t + 1; j < n; ++j) {
      long v = reduce(a[t][j]);
      if (v == 0) continue;
      long pivot = reduce(a[t][t]);
      long q = v / std::max(pivot, 1L);
      if (pivot != 0 && v % pivot == 0) {
        for (size_t i = 0; i < k; ++i) a[i][j] = reduce(a[i][j] - q * a[i][t]);
      } else {
        for (size_t i = 0; i < k; ++i) a[i][j] = reduce(a[i][j] - q * a[i][t]);
        for (size_t i = 0; i < k; ++i) std::swap(a[i][t], a[i][j]);
        clean = false;
      }
      if (!clean) break;
    }
    if (clean) ++t;
  }
  // diagonal (first t entries), remaining rows must be zero
  Int count(1);
  const size_t diag = t;
  for (size_t i = 0; i < std::min(k, n); ++i) {
    long s = i < diag ? reduce(a[i][i]) : 0;
    long gc = std::gcd(s, d);
    if (gc == 0) gc = d;
    if (rhs[i] % gc != 0) return Int(0);
    count *= gc;
  }
  for (size_t i = std::min(k, n); i < k; ++i)
    if (rhs[i] % d != 0) return Int(0);
  if (n > std::min(k, n))
    count *= pow_int(Int(d), static_cast<unsigned>(n - std::min(k, n)));
  // back out the column scaling: each variable really ranges over Z/box_j
  for (size_t j = 0; j < n; ++j) count /= (d / box[j]);
  return count;
}

}  // namespace

AbelianCounter::AbelianCounter(const ModelProfile& profile)
    : profile_(&profile) {
  const FiniteGroup& g = profile.group();
  if (!g.is_abelian())
    throw std::invalid_argument("abelian counter needs an abelian target");
  subgroups_ = g.all_subgroups(4096);
  std::sort(subgroups_.begin(), subgroups_.end(),
            [](const auto& a, const auto& b) { return a.size() < b.size(); });
  // Moebius function of the subgroup lattice, from the top
  mobius_.assign(subgroups_.size(), 0);
  for (size_t i = subgroups_.size(); i-- > 0;) {
    if (subgroups_[i].size() == static_cast<size_t>(g.order())) {
      mobius_[i] = 1;
      continue;
    }
    long acc = 0;
    for (size_t j = i + 1; j < subgroups_.size(); ++j)
      if (std::includes(subgroups_[j].begin(), subgroups_[j].end(),
                        subgroups_[i].begin(), subgroups_[i].end()))
        acc += mobius_[j];
    mobius_[i] = -acc;
  }
  for (const auto& sub : subgroups_) bases_.push_back(abelian_basis(g, sub));

  // the block presentation must cover the allowed rows exactly:
  // every inertia class carries one row per choice of free generator images
  for (size_t j = 0; j < profile.blocks().size(); ++j) {
    const PlaceBlock& blk = profile.blocks()[j];
    Int free_choices(1);
    for (size_t i = 0; i < blk.gen_orders.size(); ++i) {
      if (std::find(blk.inertia_gens.begin(), blk.inertia_gens.end(),
                    static_cast<int>(i)) != blk.inertia_gens.end())
        continue;
      long torsion = 0;
      for (ElemId e = 0; e < g.order(); ++e)
        if (g.pow(e, blk.gen_orders[i]) == 0) ++torsion;
      free_choices *= torsion;
    }
    for (const auto& cls : profile.inertia_classes()[j])
      if (Int(cls.row_count) != free_choices)
        throw std::invalid_argument(
            "place " + blk.place.label +
            ": allowed rows are not a full free-generator box per inertia "
            "class; use the generic engine");
  }
}

std::vector<AbelianCounter::Pattern> AbelianCounter::patterns_up_to(long X) const {
  std::vector<Pattern> out;
  const auto& classes = profile_->inertia_classes();
  Pattern cur;
  cur.class_choice.assign(classes.size(), 0);
  std::function<void(size_t, long)> descend = [&](size_t j, long inv) {
    if (j == classes.size()) {
      Pattern p = cur;
      p.invariant = inv;
      out.push_back(std::move(p));
      return;
    }
    const Place& v = profile_->blocks()[j].place;
    for (size_t c = 0; c < classes[j].size(); ++c) {
      long next = inv;
      bool fits = true;
      for (int i = 0; i < classes[j][c].exponent; ++i) {
        if (next > X / std::max(v.norm(), 1L)) {
          fits = false;
          break;
        }
        next *= v.norm();
      }
      if (!fits) continue;
      cur.class_choice[j] = static_cast<int>(c);
      descend(j + 1, next);
    }
  };
  descend(0, 1);
  return out;
}

Int AbelianCounter::count_solutions(const RelationBundle& bundle,
                                    const Pattern& pat,
                                    size_t subgroup_index) const {
  const FiniteGroup& g = profile_->group();
  const AbelianBasis& basis = bases_[subgroup_index];
  const auto& blocks = profile_->blocks();
  const auto& classes = profile_->inertia_classes();

  // pattern data must lie in the subgroup
  for (size_t j = 0; j < blocks.size(); ++j) {
    for (ElemId y : classes[j][pat.class_choice[j]].images)
      if (!basis.coords.count(y)) return Int(0);
  }

  // columns: free generators per place
  std::vector<std::pair<size_t, size_t>> vars;  // (place, generator)
  for (size_t j = 0; j < blocks.size(); ++j)
    for (size_t i = 0; i < blocks[j].gen_orders.size(); ++i)
      if (std::find(blocks[j].inertia_gens.begin(), blocks[j].inertia_gens.end(),
                    static_cast<int>(i)) == blocks[j].inertia_gens.end())
        vars.emplace_back(j, i);

  const int k = profile_->relation_count();
  const bool structural = bundle.mode == SampleMode::Structural;
  const int rows = k + (structural ? 1 : 0);

  std::vector<std::vector<long>> matrix(rows, std::vector<long>(vars.size(), 0));
  std::vector<ElemId> rhs_elem(rows, 0);

  auto inertia_offset = [&](int row, size_t j, long multiplier,
                            const std::vector<long>& coeff_per_gen) {
    // accumulate coefficient * image over the inertia generators
    const auto& cls = classes[j][pat.class_choice[j]];
    const auto& igens = blocks[j].inertia_gens;
    for (size_t ii = 0; ii < igens.size(); ++ii) {
      long c = coeff_per_gen[igens[ii]] * multiplier;
      rhs_elem[row] = g.mul(rhs_elem[row], g.pow(cls.images[ii], c));
    }
  };

  for (int r = 0; r < k; ++r) {
    for (size_t v = 0; v < vars.size(); ++v)
      matrix[r][v] = bundle.coefficients[r][vars[v].first][vars[v].second];
    for (size_t j = 0; j < blocks.size(); ++j)
      inertia_offset(r, j, 1, bundle.coefficients[r][j]);
  }
  if (structural) {
    for (size_t v = 0; v < vars.size(); ++v) {
      auto [j, i] = vars[v];
      matrix[k][v] =
          bundle.torsion_multiplier[j] * blocks[j].torsion_coords[i];
    }
    for (size_t j = 0; j < blocks.size(); ++j)
      inertia_offset(k, j, bundle.torsion_multiplier[j],
                     blocks[j].torsion_coords);
  }

  // rhs = -(accumulated inertia offsets), in subgroup coordinates
  std::vector<std::vector<long>> rhs_coords(rows);
  for (int r = 0; r < rows; ++r) {
    ElemId e = g.inv(rhs_elem[r]);
    auto it = basis.coords.find(e);
    if (it == basis.coords.end()) return Int(0);
    rhs_coords[r] = it->second;
  }

  Int total(1);
  for (size_t l = 0; l < basis.orders.size(); ++l) {
    const long d = basis.orders[l];
    std::vector<long> rhs(rows);
    for (int r = 0; r < rows; ++r) rhs[r] = rhs_coords[r][l];
    std::vector<long> box(vars.size());
    for (size_t v = 0; v < vars.size(); ++v)
      box[v] = std::gcd(d, blocks[vars[v].first].gen_orders[vars[v].second]);
    total *= count_box_solutions(matrix, rhs, d, box);
    if (total == 0) return total;
  }
  return total;
}

Int AbelianCounter::count_surjections(const RelationBundle& bundle,
                                      long X) const {
  Int total(0);
  for (const Pattern& pat : patterns_up_to(X)) {
    for (size_t h = 0; h < subgroups_.size(); ++h) {
      if (mobius_[h] == 0) continue;
      Int c = count_solutions(bundle, pat, h);
      total += mobius_[h] * c;
    }
  }
  return total;
}

Rat AbelianCounter::expected_epi_count(const std::vector<int>& target_rows,
                                       size_t target_places,
                                       SampleMode mode) const {
  const FiniteGroup& g = profile_->group();
  const auto& blocks = profile_->blocks();
  if (target_places > blocks.size() || target_rows.size() != target_places)
    throw std::invalid_argument("target does not fit the profile");

  // joint image of the target data and its torsion image subgroup
  std::vector<ElemId> seed;
  std::vector<ElemId> torsion_seed;
  for (size_t j = 0; j < target_places; ++j) {
    const LocalHom& h = blocks[j].homs.homs[target_rows[j]];
    for (ElemId e : h.gen_images) seed.push_back(e);
    torsion_seed.push_back(h.torsion_image);
  }
  auto d0 = g.subgroup_closure(seed);
  long torsion_image_order =
      static_cast<long>(g.subgroup_closure(torsion_seed).size());

  const int k = profile_->relation_count();
  Rat total(0);
  for (size_t h = 0; h < subgroups_.size(); ++h) {
    if (mobius_[h] == 0) continue;
    const auto& sub = subgroups_[h];
    if (!std::includes(sub.begin(), sub.end(), d0.begin(), d0.end())) continue;
    // completions: free-generator choices inside the subgroup at the
    // remaining places (unramified there, so inertia generators map to 0)
    Int completions(1);
    for (size_t j = target_places; j < blocks.size(); ++j) {
      for (size_t i = 0; i < blocks[j].gen_orders.size(); ++i) {
        if (std::find(blocks[j].inertia_gens.begin(),
                      blocks[j].inertia_gens.end(),
                      static_cast<int>(i)) != blocks[j].inertia_gens.end())
          continue;
        long cnt = 0;
        for (ElemId e : sub)
          if (g.pow(e, blocks[j].gen_orders[i]) == 0) ++cnt;
        completions *= cnt;
      }
    }
    total += Rat(mobius_[h]) * Rat(completions);
  }
  for (int i = 0; i < k; ++i) total /= g.order();
  if (mode == SampleMode::Structural) total /= torsion_image_order;
  return total;
}

}  // namespace mbtk
