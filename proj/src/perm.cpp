#include "mbtk/perm.hpp"

#include <cctype>
#include <sstream>

namespace mbtk {

Perm Perm::power(long e) const {
  int ord = order();
  long k = e % ord;
  if (k < 0) k += ord;
  Perm acc(degree());
  Perm base = *this;
  while (k > 0) {
    if (k & 1) acc = acc.compose(base);
    base = base.compose(base);
    k >>= 1;
  }
  return acc;
}

std::string Perm::cycle_string() const {
  std::vector<char> seen(img_.size(), 0);
  std::ostringstream out;
  bool any = false;
  for (size_t i = 0; i < img_.size(); ++i) {
    if (seen[i] || img_[i] == static_cast<int>(i)) {
      seen[i] = 1;
      continue;
    }
    any = true;
    out << '(';
    size_t j = i;
    bool first = true;
    while (!seen[j]) {
      if (!first) out << ' ';
      out << (j + 1);
      seen[j] = 1;
      first = false;
      j = img_[j];
    }
    out << ')';
  }
  if (!any) return "()";
  return out.str();
}

Perm parse_cycles(const std::string& text, int degree) {
  std::vector<int> img(degree);
  for (int i = 0; i < degree; ++i) img[i] = i;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  bool any_cycle = false;
  while (pos < text.size()) {
    skip_ws();
    if (pos >= text.size()) break;
    if (text[pos] != '(')
      throw std::invalid_argument("expected '(' in cycle notation: " + text);
    ++pos;
    std::vector<int> cycle;
    while (true) {
      skip_ws();
      if (pos < text.size() && text[pos] == ')') {
        ++pos;
        break;
      }
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos)
        throw std::invalid_argument("expected point in cycle notation: " + text);
      int point = std::stoi(text.substr(start, pos - start));
      if (point < 1 || point > degree)
        throw std::invalid_argument("cycle point out of range 1.." +
                                    std::to_string(degree) + ": " + text);
      cycle.push_back(point - 1);
    }
    any_cycle = true;
    for (size_t i = 0; i < cycle.size(); ++i) {
      int from = cycle[i];
      int to = cycle[(i + 1) % cycle.size()];
      if (img[from] != from)
        throw std::invalid_argument("point repeated across cycles: " + text);
      img[from] = to;
    }
    skip_ws();
  }
  if (!any_cycle && text.find('(') == std::string::npos)
    throw std::invalid_argument("no cycles found in: " + text);
  return Perm(std::move(img));
}

}  // namespace mbtk
