#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace mbtk {

// Exact arithmetic throughout the coefficient pipeline. GMP rationals are
// always kept canonical.
using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

inline std::string to_string(const Rat& r) { return r.get_str(); }

inline Int pow_int(Int base, unsigned e) {
  Int out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

}  // namespace mbtk
