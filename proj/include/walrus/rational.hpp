#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace walrus {

// All equilibrium-critical arithmetic runs on arbitrary-precision rationals.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline Int floor_int(const Rat& q) {
  Int n = num(q), d = den(q);
  Int t = n / d;
  if (n < 0 && t * d != n) --t;
  return t;
}

inline Int ceil_int(const Rat& q) { return -floor_int(-q); }

// Nearest integer; exact half rounds up.
inline Int round_int(const Rat& q) { return floor_int(q + Rat(1, 2)); }

inline bool is_integer(const Rat& q) { return den(q) == 1; }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

// Canonical "a/b" form, denominator always present and positive.
inline std::string rat_to_string(const Rat& q) {
  return num(q).str() + "/" + den(q).str();
}

std::optional<Rat> rat_from_string(const std::string& s);

// Best rational approximation to q with denominator <= max_den, via the
// Stern-Brocot walk over continued-fraction convergents and semiconvergents.
// Returns nullopt only when two candidates are exactly equidistant.
std::optional<Rat> best_rational_approx(const Rat& q, const Int& max_den);

// pow for cpp_int exponents that fit small unsigned values.
inline Int int_pow(Int base, unsigned exp) {
  Int r = 1;
  while (exp) {
    if (exp & 1u) r *= base;
    base *= base;
    exp >>= 1u;
  }
  return r;
}

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0, bound) without modulo bias for small bounds.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
};

}  // namespace walrus
