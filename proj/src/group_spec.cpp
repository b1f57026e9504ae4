#include "mbtk/group_spec.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mbtk {

namespace {

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<Perm> symmetric_gens(int n) {
  std::vector<Perm> gens;
  if (n >= 2) {
    std::vector<int> t(n);
    for (int i = 0; i < n; ++i) t[i] = i;
    std::swap(t[0], t[1]);
    gens.emplace_back(t);
  }
  if (n >= 3) {
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = (i + 1) % n;
    gens.emplace_back(c);
  }
  if (gens.empty()) gens.emplace_back(Perm(std::max(n, 1)));
  return gens;
}

std::vector<Perm> alternating_gens(int n) {
  std::vector<Perm> gens;
  if (n >= 3) {
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = i;
    c[0] = 1;
    c[1] = 2;
    c[2] = 0;  // (1 2 3)
    gens.emplace_back(c);
  }
  if (n >= 4) {
    std::vector<int> c(n);
    for (int i = 0; i < n; ++i) c[i] = i;
    if (n % 2 == 1) {  // odd n: n-cycle is even
      for (int i = 0; i < n; ++i) c[i] = (i + 1) % n;
    } else {  // even n: (2 ... n) is an (n-1)-cycle, even
      for (int i = 1; i < n; ++i) c[i] = 1 + (i % (n - 1));
      c[0] = 0;
    }
    gens.emplace_back(c);
  }
  if (gens.empty()) gens.emplace_back(Perm(std::max(n, 1)));
  return gens;
}

// d/n disjoint n-cycles acting on d points, generated by one element.
Perm cyclic_block_perm(int n, int d) {
  std::vector<int> img(d);
  for (int b = 0; b < d / n; ++b)
    for (int i = 0; i < n; ++i) img[b * n + i] = b * n + (i + 1) % n;
  return Perm(std::move(img));
}

FiniteGroup wreath(const FiniteGroup& a, const FiniteGroup& b, long bound) {
  // A wr B acting imprimitively on deg(A) * deg(B) points: deg(B) blocks of
  // size deg(A); base copies of A act within blocks, B permutes the blocks.
  const int da = a.degree(), db = b.degree();
  const int n = da * db;
  std::vector<Perm> gens;
  for (const Perm& g : a.generators()) {
    for (int block = 0; block < db; ++block) {
      std::vector<int> img(n);
      for (int i = 0; i < n; ++i) img[i] = i;
      for (int i = 0; i < da; ++i) img[block * da + i] = block * da + g(i);
      gens.emplace_back(std::move(img));
    }
  }
  for (const Perm& g : b.generators()) {
    std::vector<int> img(n);
    for (int block = 0; block < db; ++block)
      for (int i = 0; i < da; ++i) img[block * da + i] = g(block) * da + i;
    gens.emplace_back(std::move(img));
  }
  return FiniteGroup(n, std::move(gens), bound);
}

FiniteGroup parse_atom(const std::string& spec, long bound);

// Split on top-level 'x' (not inside parentheses).
std::vector<std::string> split_product(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth == 0 && s[i] == 'x') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

FiniteGroup parse_atom(const std::string& raw, long bound) {
  std::string spec = strip(raw);
  if (spec.empty()) throw GroupSpecError("empty group spec");

  if (spec.rfind("gens(", 0) == 0) {
    size_t close = spec.find(')');
    size_t colon = spec.find(':', close);
    if (close == std::string::npos || colon == std::string::npos)
      throw GroupSpecError("malformed gens(...) spec: " + spec);
    int degree = std::stoi(spec.substr(5, close - 5));
    if (degree < 1) throw GroupSpecError("gens degree must be >= 1");
    std::string body = spec.substr(colon + 1);
    std::vector<Perm> gens;
    // split generators on commas that sit outside parentheses
    int depth = 0;
    size_t start = 0;
    auto flush = [&](size_t end) {
      std::string one = strip(body.substr(start, end - start));
      if (!one.empty()) gens.push_back(parse_cycles(one, degree));
    };
    for (size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '(') ++depth;
      if (body[i] == ')') --depth;
      if (body[i] == ',' && depth == 0) {
        flush(i);
        start = i + 1;
      }
    }
    flush(body.size());
    if (gens.empty()) throw GroupSpecError("gens(...) needs generators");
    return FiniteGroup(degree, std::move(gens), bound);
  }

  if (spec.rfind("wr(", 0) == 0) {
    if (spec.back() != ')') throw GroupSpecError("malformed wr(...): " + spec);
    std::string body = spec.substr(3, spec.size() - 4);
    int depth = 0;
    size_t comma = std::string::npos;
    for (size_t i = 0; i < body.size(); ++i) {
      if (body[i] == '(') ++depth;
      if (body[i] == ')') --depth;
      if (body[i] == ',' && depth == 0) {
        comma = i;
        break;
      }
    }
    if (comma == std::string::npos)
      throw GroupSpecError("wr(A,B) needs two arguments: " + spec);
    FiniteGroup a = parse_atom(body.substr(0, comma), bound);
    FiniteGroup b = parse_atom(body.substr(comma + 1), bound);
    return wreath(a, b, bound);
  }

  if (spec == "D4") {
    return FiniteGroup(4, {parse_cycles("(1 2 3 4)", 4), parse_cycles("(1 3)", 4)},
                       bound);
  }
  if (spec == "Q8") {
    // regular representation on 8 points: i and j acting on
    // {1,-1,i,-i,j,-j,k,-k} ordered as 1..8
    Perm i8 = parse_cycles("(1 3 2 4)(5 7 6 8)", 8);
    Perm j8 = parse_cycles("(1 5 2 6)(3 8 4 7)", 8);
    return FiniteGroup(8, {i8, j8}, bound);
  }

  char family = spec[0];
  if (family == 'S' || family == 'A' || family == 'C') {
    std::string rest = spec.substr(1);
    int at_degree = -1;
    size_t at = rest.find('@');
    if (at != std::string::npos) {
      at_degree = std::stoi(rest.substr(at + 1));
      rest = rest.substr(0, at);
    }
    if (rest.empty() ||
        !std::all_of(rest.begin(), rest.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw GroupSpecError("bad group spec: " + raw);
    int n = std::stoi(rest);
    if (n < 1) throw GroupSpecError("group parameter must be >= 1: " + raw);
    if (family == 'S') {
      if (at_degree >= 0 && at_degree != n)
        throw GroupSpecError("S" + std::to_string(n) + " only acts in degree n");
      return FiniteGroup(n, symmetric_gens(n), bound);
    }
    if (family == 'A') {
      if (at_degree >= 0 && at_degree != n)
        throw GroupSpecError("A" + std::to_string(n) + " only acts in degree n");
      return FiniteGroup(n, alternating_gens(n), bound);
    }
    int d = at_degree >= 0 ? at_degree : n;
    if (d % n != 0)
      throw GroupSpecError("C" + std::to_string(n) + "@" + std::to_string(d) +
                           ": degree must be a multiple of the order");
    return FiniteGroup(d, {cyclic_block_perm(n, d)}, bound);
  }

  throw GroupSpecError("unrecognized group spec: " + raw);
}

}  // namespace

FiniteGroup parse_group_spec(const std::string& spec, long order_bound) {
  auto parts = split_product(strip(spec));
  if (parts.size() == 1) return parse_atom(parts[0], order_bound);
  FiniteGroup acc = parse_atom(parts[0], order_bound);
  for (size_t i = 1; i < parts.size(); ++i)
    acc = direct_product(acc, parse_atom(parts[i], order_bound));
  return acc;
}

}  // namespace mbtk
