#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbtk {

// Permutation of {0, ..., n-1}, stored as the image vector.
class Perm {
 public:
  Perm() = default;
  explicit Perm(int n) : img_(n) { std::iota(img_.begin(), img_.end(), 0); }
  explicit Perm(std::vector<int> images) : img_(std::move(images)) {}

  int degree() const { return static_cast<int>(img_.size()); }
  int operator()(int x) const { return img_[x]; }

  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (img_[i] != i) return false;
    return true;
  }

  Perm compose(const Perm& other) const {  // (this*other)(x) = this(other(x))
    std::vector<int> out(img_.size());
    for (size_t i = 0; i < img_.size(); ++i) out[i] = img_[other.img_[i]];
    return Perm(std::move(out));
  }

  Perm inverse() const {
    std::vector<int> out(img_.size());
    for (size_t i = 0; i < img_.size(); ++i) out[img_[i]] = static_cast<int>(i);
    return Perm(std::move(out));
  }

  int cycle_count() const {
    std::vector<char> seen(img_.size(), 0);
    int cycles = 0;
    for (size_t i = 0; i < img_.size(); ++i) {
      if (seen[i]) continue;
      ++cycles;
      for (size_t j = i; !seen[j]; j = img_[j]) seen[j] = 1;
    }
    return cycles;
  }

  int order() const {
    Perm p = *this;
    int k = 1;
    while (!p.is_identity()) {
      p = p.compose(*this);
      ++k;
      if (k > 1'000'000) throw std::logic_error("perm order runaway");
    }
    return k;
  }

  Perm power(long e) const;

  bool operator==(const Perm& o) const { return img_ == o.img_; }
  bool operator<(const Perm& o) const { return img_ < o.img_; }

  const std::vector<int>& images() const { return img_; }

  // Cycle notation, 1-based: "(1 2 3)(4 5)", identity prints as "()".
  std::string cycle_string() const;

 private:
  std::vector<int> img_;
};

// Parse one permutation in cycle notation ("(1 2 3)(4 5)" or "()"),
// 1-based points, degree fixed by the caller.
Perm parse_cycles(const std::string& text, int degree);

struct PermHash {
  size_t operator()(const Perm& p) const {
    size_t h = 1469598103934665603ull;
    for (int v : p.images()) {
      h ^= static_cast<size_t>(v) + 0x9e3779b9;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace mbtk
