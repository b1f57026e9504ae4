#include "mbtk/group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace mbtk {

namespace {

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

}  // namespace

FiniteGroup::FiniteGroup(int degree, std::vector<Perm> generators,
                         long order_bound)
    : degree_(degree), generators_(std::move(generators)) {
  for (const Perm& g : generators_)
    if (g.degree() != degree_)
      throw std::invalid_argument("generator degree mismatch");
  close_elements(order_bound);
  build_conjugacy();
  build_abelianization();
}

void FiniteGroup::close_elements(long order_bound) {
  elements_.push_back(Perm(degree_));
  index_.emplace(elements_[0], 0);
  word_from_.push_back(-1);
  word_gen_.push_back(-1);
  std::deque<ElemId> work{0};
  while (!work.empty()) {
    ElemId cur = work.front();
    work.pop_front();
    for (size_t gi = 0; gi < generators_.size(); ++gi) {
      Perm next = elements_[cur].compose(generators_[gi]);
      auto [it, inserted] = index_.emplace(next, static_cast<ElemId>(elements_.size()));
      if (inserted) {
        elements_.push_back(std::move(next));
        word_from_.push_back(cur);
        word_gen_.push_back(static_cast<int>(gi));
        if (static_cast<long>(elements_.size()) > order_bound)
          throw GroupTooLarge("group closure exceeds order bound " +
                              std::to_string(order_bound));
        work.push_back(it->second);
      }
    }
  }

  generator_ids_.reserve(generators_.size());
  for (const Perm& g : generators_) generator_ids_.push_back(index_.at(g));

  const long n = order();
  if (n <= kMulTableLimit) {
    mul_table_.assign(static_cast<size_t>(n) * n, 0);
    for (long a = 0; a < n; ++a)
      for (long b = 0; b < n; ++b)
        mul_table_[a * n + b] =
            static_cast<uint16_t>(index_.at(elements_[a].compose(elements_[b])));
  }

  inverse_.resize(n);
  element_order_.resize(n);
  exponent_ = 1;
  for (long a = 0; a < n; ++a) {
    inverse_[a] = index_.at(elements_[a].inverse());
    element_order_[a] = elements_[a].order();
    exponent_ = static_cast<int>(lcm_long(exponent_, element_order_[a]));
  }

  abelian_ = true;
  for (size_t i = 0; i < generator_ids_.size() && abelian_; ++i)
    for (size_t j = i + 1; j < generator_ids_.size(); ++j) {
      ElemId a = generator_ids_[i], b = generator_ids_[j];
      if (mul(a, b) != mul(b, a)) {
        abelian_ = false;
        break;
      }
    }
}

ElemId FiniteGroup::id_of(const Perm& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) throw std::invalid_argument("permutation not in group");
  return it->second;
}

ElemId FiniteGroup::mul(ElemId a, ElemId b) const {
  if (!mul_table_.empty()) return mul_table_[static_cast<size_t>(a) * order() + b];
  return index_.at(elements_[a].compose(elements_[b]));
}

ElemId FiniteGroup::pow(ElemId a, long e) const {
  long ord = element_order_[a];
  long k = e % ord;
  if (k < 0) k += ord;
  ElemId acc = 0, base = a;
  while (k > 0) {
    if (k & 1) acc = mul(acc, base);
    base = mul(base, base);
    k >>= 1;
  }
  return acc;
}

bool FiniteGroup::is_transitive() const {
  std::vector<char> seen(degree_, 0);
  std::deque<int> work{0};
  seen[0] = 1;
  int count = 1;
  while (!work.empty()) {
    int x = work.front();
    work.pop_front();
    for (const Perm& g : generators_) {
      int y = g(x);
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        work.push_back(y);
      }
    }
  }
  return count == degree_;
}

int FiniteGroup::index_of(ElemId a) const {
  return degree_ - elements_[a].cycle_count();
}

void FiniteGroup::build_conjugacy() {
  const long n = order();
  class_of_.assign(n, -1);
  for (ElemId e = 0; e < n; ++e) {
    if (class_of_[e] >= 0) continue;
    int cls = static_cast<int>(classes_.size());
    std::vector<ElemId> members;
    std::deque<ElemId> work{e};
    class_of_[e] = cls;
    while (!work.empty()) {
      ElemId x = work.front();
      work.pop_front();
      members.push_back(x);
      for (ElemId g : generator_ids_) {
        ElemId y = mul(mul(g, x), inv(g));
        if (class_of_[y] < 0) {
          class_of_[y] = cls;
          work.push_back(y);
        }
      }
    }
    std::sort(members.begin(), members.end());
    classes_.push_back(std::move(members));
  }
}

std::vector<ElemId> FiniteGroup::subgroup_closure(
    const std::vector<ElemId>& seed) const {
  std::vector<char> in(order(), 0);
  in[0] = 1;
  std::vector<ElemId> members{0};
  std::deque<ElemId> work;
  for (ElemId e : seed)
    if (!in[e]) {
      in[e] = 1;
      members.push_back(e);
      work.push_back(e);
    }
  // close under products with known members
  while (!work.empty()) {
    ElemId x = work.front();
    work.pop_front();
    size_t snapshot = members.size();
    for (size_t i = 0; i < snapshot; ++i) {
      for (ElemId y : {mul(x, members[i]), mul(members[i], x)}) {
        if (!in[y]) {
          in[y] = 1;
          members.push_back(y);
          work.push_back(y);
        }
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

void FiniteGroup::build_abelianization() {
  // commutator subgroup: normal closure of {[a,b] : a,b generators}
  std::vector<ElemId> comms;
  for (ElemId a : generator_ids_)
    for (ElemId b : generator_ids_) {
      ElemId c = mul(mul(a, b), mul(inv(a), inv(b)));
      if (c != 0) comms.push_back(c);
    }
  // normal closure: close under conjugation by generators, then subgroup
  std::vector<char> in(order(), 0);
  std::deque<ElemId> work;
  for (ElemId c : comms)
    if (!in[c]) {
      in[c] = 1;
      work.push_back(c);
    }
  std::vector<ElemId> gens_of_n(comms);
  while (!work.empty()) {
    ElemId x = work.front();
    work.pop_front();
    for (ElemId g : generator_ids_) {
      ElemId y = mul(mul(g, x), inv(g));
      if (!in[y]) {
        in[y] = 1;
        gens_of_n.push_back(y);
        work.push_back(y);
      }
    }
  }
  commutator_subgroup_ = subgroup_closure(gens_of_n);

  // quotient G/[G,G]: coset of e represented by min id in e*N
  const long n = order();
  std::vector<ElemId> coset_rep(n, -1);
  std::vector<ElemId> reps;
  for (ElemId e = 0; e < n; ++e) {
    if (coset_rep[e] >= 0) continue;
    std::vector<ElemId> coset;
    for (ElemId m : commutator_subgroup_) coset.push_back(mul(e, m));
    ElemId rep = *std::min_element(coset.begin(), coset.end());
    for (ElemId c : coset) coset_rep[c] = rep;
    reps.push_back(rep);
  }
  std::sort(reps.begin(), reps.end());
  std::map<ElemId, int> rep_index;
  for (size_t i = 0; i < reps.size(); ++i) rep_index[reps[i]] = static_cast<int>(i);

  // abelian quotient as multiplication on coset reps
  auto qmul = [&](int a, int b) {
    return rep_index.at(coset_rep[mul(reps[a], reps[b])]);
  };

  // Invariant factors by repeatedly splitting off a maximal-order cyclic
  // factor: the largest factor is the exponent of A, the next one the
  // exponent of the quotient, and so on.
  std::vector<long> factors;
  const int qid = rep_index.at(coset_rep[0]);
  std::vector<char> in_sub(reps.size(), 0);
  in_sub[qid] = 1;
  size_t sub_size = 1;
  while (sub_size < reps.size()) {
    // order of x modulo the current subgroup: min k with x^k in sub
    auto qorder_mod = [&](int x) {
      int k = 1, y = x;
      while (!in_sub[y]) {
        y = qmul(y, x);
        ++k;
      }
      return k;
    };
    int best = -1, best_ord = 0;
    for (size_t i = 0; i < reps.size(); ++i) {
      if (in_sub[i]) continue;
      int k = qorder_mod(static_cast<int>(i));
      if (k > best_ord) {
        best_ord = k;
        best = static_cast<int>(i);
      }
    }
    factors.push_back(best_ord);
    in_sub[best] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t a = 0; a < reps.size(); ++a) {
        if (!in_sub[a]) continue;
        for (size_t b = 0; b < reps.size(); ++b) {
          if (!in_sub[b]) continue;
          int y = qmul(static_cast<int>(a), static_cast<int>(b));
          if (!in_sub[y]) {
            in_sub[y] = 1;
            changed = true;
          }
        }
      }
    }
    sub_size = 0;
    for (char c : in_sub) sub_size += c;
  }
  std::sort(factors.begin(), factors.end());
  factors.erase(std::remove(factors.begin(), factors.end(), 1L), factors.end());
  ab_invariants_ = std::move(factors);
}

long FiniteGroup::ab_order() const {
  long n = 1;
  for (long d : ab_invariants_) n *= d;
  return n;
}

std::vector<std::vector<ElemId>> FiniteGroup::normal_subgroups(long bound) const {
  if (order() > bound)
    throw GroupTooLarge("normal subgroup enumeration bound exceeded: |G|=" +
                        std::to_string(order()) + " > " + std::to_string(bound));
  // normal closures of single conjugacy classes
  std::set<std::vector<ElemId>> found;
  found.insert(std::vector<ElemId>{0});
  std::vector<std::vector<ElemId>> seeds;
  for (const auto& cls : classes_) seeds.push_back(subgroup_closure(cls));
  for (auto& s : seeds) found.insert(s);
  // close under pairwise joins
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<ElemId>> current(found.begin(), found.end());
    for (size_t i = 0; i < current.size(); ++i)
      for (size_t j = i + 1; j < current.size(); ++j) {
        std::vector<ElemId> merged;
        std::set_union(current[i].begin(), current[i].end(), current[j].begin(),
                       current[j].end(), std::back_inserter(merged));
        auto join = subgroup_closure(merged);
        if (found.insert(join).second) changed = true;
      }
  }
  return std::vector<std::vector<ElemId>>(found.begin(), found.end());
}

std::vector<std::vector<ElemId>> FiniteGroup::all_subgroups(long bound) const {
  if (order() > bound)
    throw GroupTooLarge("subgroup enumeration bound exceeded: |G|=" +
                        std::to_string(order()) + " > " + std::to_string(bound));
  if (order() <= 64) {
    // bitmask fast path
    std::set<uint64_t> found{1};  // the trivial subgroup, bit 0 set
    std::deque<uint64_t> work{1};
    while (!work.empty()) {
      uint64_t h = work.front();
      work.pop_front();
      for (ElemId e = 1; e < order(); ++e) {
        if (h >> e & 1) continue;
        uint64_t bigger = mask_closure(h, e);
        if (found.insert(bigger).second) work.push_back(bigger);
      }
    }
    std::vector<std::vector<ElemId>> out;
    for (uint64_t mask : found) {
      std::vector<ElemId> ids;
      for (ElemId e = 0; e < order(); ++e)
        if (mask >> e & 1) ids.push_back(e);
      out.push_back(std::move(ids));
    }
    return out;
  }
  std::set<std::vector<ElemId>> found;
  std::deque<std::vector<ElemId>> work;
  std::vector<ElemId> trivial{0};
  found.insert(trivial);
  work.push_back(trivial);
  while (!work.empty()) {
    std::vector<ElemId> h = work.front();
    work.pop_front();
    for (ElemId e = 1; e < order(); ++e) {
      if (contains_id(h, e)) continue;
      std::vector<ElemId> seed(h);
      seed.push_back(e);
      auto bigger = subgroup_closure(seed);
      if (found.insert(bigger).second) work.push_back(bigger);
    }
  }
  return std::vector<std::vector<ElemId>>(found.begin(), found.end());
}

uint64_t FiniteGroup::mask_closure(uint64_t closed_mask, ElemId extra) const {
  // closed_mask must be a subgroup; grow it by one element
  uint64_t mask = closed_mask | (uint64_t{1} << extra);
  std::vector<ElemId> added{extra};
  while (!added.empty()) {
    ElemId x = added.back();
    added.pop_back();
    for (ElemId y = 0; y < order(); ++y) {
      if (!(mask >> y & 1)) continue;
      for (ElemId z : {mul(x, y), mul(y, x)}) {
        if (!(mask >> z & 1)) {
          mask |= uint64_t{1} << z;
          added.push_back(z);
        }
      }
    }
  }
  return mask;
}

FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b) {
  int n = a.degree() + b.degree();
  std::vector<Perm> gens;
  for (const Perm& g : a.generators()) {
    std::vector<int> img(n);
    for (int i = 0; i < a.degree(); ++i) img[i] = g(i);
    for (int i = 0; i < b.degree(); ++i) img[a.degree() + i] = a.degree() + i;
    gens.emplace_back(std::move(img));
  }
  for (const Perm& g : b.generators()) {
    std::vector<int> img(n);
    for (int i = 0; i < a.degree(); ++i) img[i] = i;
    for (int i = 0; i < b.degree(); ++i) img[a.degree() + i] = a.degree() + g(i);
    gens.emplace_back(std::move(img));
  }
  return FiniteGroup(n, std::move(gens));
}

bool contains_id(const std::vector<ElemId>& sorted_ids, ElemId e) {
  return std::binary_search(sorted_ids.begin(), sorted_ids.end(), e);
}

}  // namespace mbtk
