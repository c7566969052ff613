#include "walrus/ellipsoid.hpp"

#include <cmath>

namespace walrus {

namespace {

template <typename Scalar>
Scalar to_scalar(const Rat& q) {
  return static_cast<Scalar>(q);
}

template <typename Scalar>
Rat to_rat(const Scalar& x) {
  return Rat(x);
}

template <typename Scalar>
bool finite(const Scalar& x) {
  using std::isfinite;
  return isfinite(static_cast<double>(x));
}

template <typename Scalar>
EllipsoidOutcome run(int n, const SubgradientFn& subgradient, const ValueFn* value,
                     const EllipsoidOptions& options) {
  using std::sqrt;
  const Scalar box = to_scalar<Scalar>(options.box_bound);
  const Scalar radius = box * sqrt(Scalar(n));

  std::vector<Scalar> center(n, Scalar(0));
  if (!options.start.empty())
    for (int j = 0; j < n; ++j) center[j] = to_scalar<Scalar>(options.start[j]);
  std::vector<std::vector<Scalar>> shape(n, std::vector<Scalar>(n, Scalar(0)));
  for (int j = 0; j < n; ++j) shape[j][j] = radius * radius;

  // log det(A), tracked analytically; volume of E = V_n * sqrt(det A).
  double logdet = 2.0 * n * std::log(static_cast<double>(radius));
  const double logdet_step =
      n * std::log(static_cast<double>(n) * n / (static_cast<double>(n) * n - 1)) +
      std::log((n - 1.0) / (n + 1.0));
  const bool volume_stop = options.stop_ball_radius > 0;
  const double logdet_floor =
      volume_stop ? 2.0 * n * std::log(options.stop_ball_radius.convert_to<double>()) : 0.0;

  EllipsoidOutcome out;
  std::vector<Scalar> g(n), ag(n);
  for (out.iterations = 0; out.iterations < options.max_iters; ++out.iterations) {
    if (volume_stop && 0.5 * logdet < 0.5 * logdet_floor) {
      out.stop = EllipsoidStop::volume;
      break;
    }

    // Box violation cuts bypass the oracle.
    int violated = -1;
    for (int j = 0; j < n && violated < 0; ++j)
      if (center[j] > box || center[j] < -box) violated = j;

    if (violated >= 0) {
      ++out.box_cuts;
      for (int j = 0; j < n; ++j) g[j] = Scalar(0);
      g[violated] = center[violated] > box ? Scalar(1) : Scalar(-1);
    } else {
      PriceVector p(n);
      for (int j = 0; j < n; ++j) p[j] = to_rat(center[j]);
      std::vector<Rat> gr = subgradient(p);
      bool zero = true;
      for (const Rat& x : gr)
        if (x != 0) zero = false;
      out.transcript.push_back({p, gr});
      if (value != nullptr) {
        Rat fv = (*value)(p);
        if (!out.best_value || fv < *out.best_value) {
          out.best_value = fv;
          out.best_point = p;
        }
      }
      if (zero) {
        out.zero_subgradient_point = p;
        out.stop = EllipsoidStop::zero_subgradient;
        break;
      }
      for (int j = 0; j < n; ++j) g[j] = to_scalar<Scalar>(gr[j]);
    }

    // Central cut: drop {x : g.(x - c) > 0}.
    Scalar sigma = 0;
    for (int j = 0; j < n; ++j) {
      Scalar s = 0;
      for (int k = 0; k < n; ++k) s += shape[j][k] * g[k];
      ag[j] = s;
    }
    for (int j = 0; j < n; ++j) sigma += g[j] * ag[j];
    if (!finite(sigma) || sigma <= 0)
      throw NumericError("ellipsoid cut degenerated (g'Ag not positive)");
    Scalar root = sqrt(sigma);
    for (int j = 0; j < n; ++j) ag[j] /= root;  // b = A g / sqrt(g'Ag)
    if (n == 1) {
      // Degenerate special case: halve the interval.
      center[0] -= ag[0] / 2;
      shape[0][0] /= 4;
      logdet += std::log(0.25);
      continue;
    }
    const Scalar nn = Scalar(n);
    for (int j = 0; j < n; ++j) center[j] -= ag[j] / (nn + 1);
    const Scalar factor = nn * nn / (nn * nn - 1);
    const Scalar beta = Scalar(2) / (nn + 1);
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        Scalar v = factor * (shape[j][k] - beta * ag[j] * ag[k]);
        shape[j][k] = v;
        shape[k][j] = v;
      }
    for (int j = 0; j < n; ++j)
      if (!finite(shape[j][j]) || shape[j][j] <= 0)
        throw NumericError("ellipsoid shape lost positive definiteness");
    logdet += logdet_step;
  }

  out.final_center.resize(n);
  for (int j = 0; j < n; ++j) out.final_center[j] = to_rat(center[j]);
  out.shape.assign(n, std::vector<double>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) out.shape[j][k] = static_cast<double>(shape[j][k]);
  return out;
}

}  // namespace

EllipsoidOutcome ellipsoid_minimize(int n, const SubgradientFn& subgradient, const ValueFn* value,
                                    const EllipsoidOptions& options) {
  if (n < 1) throw DomainError("ellipsoid needs dimension >= 1");
  if (options.box_bound <= 0) throw DomainError("ellipsoid box bound must be positive");
  if (options.high_precision) return run<BigFloat>(n, subgradient, value, options);
  return run<double>(n, subgradient, value, options);
}

std::uint64_t interior_query_budget(int n, double ball_radius, double cube_side) {
  // vol(ball) = V_n R^n, ln V_n = (n/2) ln pi - lgamma(n/2 + 1).
  double ln_vn = 0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0);
  double ln_ball = ln_vn + n * std::log(ball_radius);
  double ln_cube = n * std::log(cube_side);
  double t = 2.0 * n * (ln_ball - ln_cube);
  return static_cast<std::uint64_t>(std::ceil(std::max(t, 1.0))) + 4ull * n + 8;
}

}  // namespace walrus
