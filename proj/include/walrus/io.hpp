#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "walrus/market.hpp"
#include "walrus/robust.hpp"
#include "walrus/solve_report.hpp"

namespace walrus {

using Json = nlohmann::ordered_json;

// Instance files: schema_version, items, supply, buyers; explicit tables are
// keyed by bundle index rendered as a decimal string (a plain bitmask on
// single-unit instances).  Items and buyers are 1-indexed on disk.
Json instance_to_json(const MarketInstance& inst);
MarketInstance instance_from_json(const Json& j);

Json result_to_json(const MarketInstance& inst, const SolveReport& report, bool verified,
                    const std::string& trace_path = "");

struct ParsedResult {
  std::string method;
  std::string verdict;
  PriceVector prices;
  Allocation allocation;
  Rat welfare;
  bool verified = false;
};
ParsedResult result_from_json(const Json& j, const MarketInstance& inst);

Json robust_report_to_json(const RobustPriceReport& report, int n, int m);

// Canonical serialization: two-space indent, fixed key order, trailing
// newline.  Byte-identical across round trips.
std::string canonical_dump(const Json& j);

MarketInstance load_instance(const std::string& path);
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace walrus
