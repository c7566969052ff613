#pragma once

#include <optional>
#include <string>

#include "walrus/market.hpp"

namespace walrus {

enum class SolveVerdict { equilibrium, no_equilibrium_found, inconclusive };

struct SolveReport {
  std::string method;
  SolveVerdict verdict = SolveVerdict::inconclusive;
  std::optional<EquilibriumCertificate> certificate;  // verdict == equilibrium
  PriceVector prices;                                 // rounded exact output
  Rat welfare;
  std::uint64_t iterations = 0;
  OracleCounter oracle_calls;
  int retries = 0;
};

}  // namespace walrus
