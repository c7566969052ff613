#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "walrus/bundle.hpp"
#include "walrus/errors.hpp"
#include "walrus/rational.hpp"

namespace walrus {

// Inner-loop scalar for runs whose tolerances exceed double precision.
using BigFloat = boost::multiprecision::cpp_bin_float_100;

// Query points handed to the callbacks are exact dyadic rationals equal to
// the float center, so oracle answers are exact at the queried point.
using SubgradientFn = std::function<std::vector<Rat>(const PriceVector&)>;
using ValueFn = std::function<Rat(const PriceVector&)>;

enum class EllipsoidStop { zero_subgradient, volume, iterations };

struct EllipsoidOptions {
  Rat box_bound;             // search box [-box, box]^n, initial ball radius box*sqrt(n)
  Rat stop_ball_radius = 0;  // stop once the ellipsoid cannot hold this ball; 0 disables
  std::uint64_t max_iters = 200000;
  bool high_precision = false;
  PriceVector start;  // optional start center; empty = origin
};

struct TranscriptEntry {
  PriceVector point;
  std::vector<Rat> subgradient;
};

struct EllipsoidOutcome {
  PriceVector final_center;
  std::vector<std::vector<double>> shape;  // informational snapshot of the shape matrix
  std::uint64_t iterations = 0;
  std::uint64_t box_cuts = 0;
  EllipsoidStop stop = EllipsoidStop::iterations;
  std::vector<TranscriptEntry> transcript;
  std::optional<PriceVector> zero_subgradient_point;
  std::optional<PriceVector> best_point;  // argmin of value_fn over queried points
  std::optional<Rat> best_value;
};

// Central-cut ellipsoid over the box, driven only by subgradients.  The
// volume stop is sound: once vol(E) < vol(ball(rho)) the ball cannot fit,
// so some queried point already beats every point the ball would certify.
EllipsoidOutcome ellipsoid_minimize(int n, const SubgradientFn& subgradient,
                                    const ValueFn* value, const EllipsoidOptions& options);

// Iteration count after which an ellipsoid shrinks below a cube of the given
// side when started from a ball of the given radius (volume argument).
std::uint64_t interior_query_budget(int n, double ball_radius, double cube_side);

}  // namespace walrus
