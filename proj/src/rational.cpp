#include "walrus/rational.hpp"

namespace walrus {

std::optional<Rat> rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      if (s.empty()) return std::nullopt;
      return Rat(Int(s));
    }
    std::string a = s.substr(0, slash);
    std::string b = s.substr(slash + 1);
    if (a.empty() || b.empty()) return std::nullopt;
    Int ib(b);
    if (ib == 0) return std::nullopt;
    return Rat(Int(a), ib);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<Rat> best_rational_approx(const Rat& q, const Int& max_den) {
  if (max_den < 1) throw std::invalid_argument("best_rational_approx: max_den < 1");
  if (den(q) <= max_den) return q;

  // Continued-fraction expansion of q, tracking convergents h/k.
  Int p0 = 0, q0 = 1;  // previous convergent
  Int p1 = 1, q1 = 0;  // current convergent
  Int n = num(q), d = den(q);
  Int lo_num, lo_den;  // best candidate below/above found on exit
  for (;;) {
    Int a = n / d;
    if (n < 0 && a * d != n) --a;  // floor division
    Int p2 = a * p1 + p0;
    Int q2 = a * q1 + q0;
    if (q2 > max_den) {
      // Back off to the largest admissible semiconvergent.
      Int t = (max_den - q0) / q1;
      Int sp = t * p1 + p0;
      Int sq = t * q1 + q0;
      Rat conv(p1, q1);        // last full convergent (q1 <= max_den here)
      Rat semi(sp, sq);
      Rat dc = rat_abs(q - conv);
      Rat ds = rat_abs(q - semi);
      if (dc < ds) return conv;
      if (ds < dc) return semi;
      return std::nullopt;  // exact tie
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Int rem = n - a * d;
    if (rem == 0) return Rat(p1, q1);  // exact (shouldn't reach: den(q) > max_den)
    n = d;
    d = rem;
  }
}

}  // namespace walrus
