#include "walrus/io.hpp"

#include <fstream>
#include <sstream>

namespace walrus {

namespace {

std::string kind_name(ValuationKind kind) {
  switch (kind) {
    case ValuationKind::additive: return "additive";
    case ValuationKind::unit_demand: return "unit_demand";
    case ValuationKind::weighted_matroid_rank: return "weighted_matroid_rank";
    case ValuationKind::explicit_table: return "explicit_table";
  }
  return "?";
}

Json buyer_to_json(const ValuationSpec& spec) {
  Json b;
  b["kind"] = kind_name(spec.kind);
  switch (spec.kind) {
    case ValuationKind::additive:
      b["weights"] = spec.weights;
      break;
    case ValuationKind::unit_demand:
      b["values"] = spec.values;
      break;
    case ValuationKind::weighted_matroid_rank: {
      Json m;
      if (spec.matroid.type == MatroidType::uniform) {
        m["type"] = "uniform";
        m["rank"] = spec.matroid.rank;
      } else {
        m["type"] = "partition";
        Json blocks = Json::array();
        for (const auto& blk : spec.matroid.blocks) {
          Json arr = Json::array();
          for (int j : blk) arr.push_back(j + 1);
          blocks.push_back(arr);
        }
        m["blocks"] = blocks;
        m["capacities"] = spec.matroid.capacities;
      }
      b["matroid"] = m;
      b["weights"] = spec.weights;
      break;
    }
    case ValuationKind::explicit_table: {
      Json t = Json::object();
      for (std::size_t idx = 0; idx < spec.table.size(); ++idx)
        t[std::to_string(idx)] = spec.table[idx];
      b["table"] = t;
      break;
    }
  }
  return b;
}

ValuationSpec buyer_from_json(const Json& b, int n, const std::vector<int>& supply,
                              const std::string& where) {
  if (!b.is_object() || !b.contains("kind") || !b["kind"].is_string())
    throw MalformedError(where + ": buyer needs a string field 'kind'");
  const std::string kind = b["kind"].get<std::string>();
  auto int_vector = [&](const char* field) {
    if (!b.contains(field) || !b[field].is_array())
      throw MalformedError(where + ": missing array field '" + field + "'");
    std::vector<std::int64_t> v;
    for (const auto& x : b[field]) {
      if (!x.is_number_integer()) throw MalformedError(where + ": '" + field + "' must be integers");
      v.push_back(x.get<std::int64_t>());
    }
    return v;
  };
  if (kind == "additive") return ValuationSpec::make_additive(int_vector("weights"));
  if (kind == "unit_demand") return ValuationSpec::make_unit_demand(int_vector("values"));
  if (kind == "weighted_matroid_rank") {
    if (!b.contains("matroid") || !b["matroid"].is_object())
      throw MalformedError(where + ": missing object field 'matroid'");
    const Json& m = b["matroid"];
    std::vector<std::int64_t> w = int_vector("weights");
    const std::string type = m.value("type", "");
    if (type == "uniform") {
      if (!m.contains("rank") || !m["rank"].is_number_integer())
        throw MalformedError(where + ": uniform matroid needs integer 'rank'");
      return ValuationSpec::make_uniform_matroid(m["rank"].get<int>(), std::move(w));
    }
    if (type == "partition") {
      if (!m.contains("blocks") || !m["blocks"].is_array() || !m.contains("capacities") ||
          !m["capacities"].is_array())
        throw MalformedError(where + ": partition matroid needs 'blocks' and 'capacities'");
      std::vector<std::vector<int>> blocks;
      for (const auto& arr : m["blocks"]) {
        std::vector<int> blk;
        for (const auto& x : arr) {
          int j = x.get<int>();
          if (j < 1 || j > n)
            throw MalformedError(where + ": block item " + std::to_string(j) + " out of range");
          blk.push_back(j - 1);
        }
        blocks.push_back(blk);
      }
      std::vector<int> caps;
      for (const auto& x : m["capacities"]) caps.push_back(x.get<int>());
      return ValuationSpec::make_partition_matroid(std::move(blocks), std::move(caps),
                                                   std::move(w));
    }
    throw MalformedError(where + ": unknown matroid type '" + type + "'");
  }
  if (kind == "explicit_table") {
    if (!b.contains("table") || !b["table"].is_object())
      throw MalformedError(where + ": missing object field 'table'");
    std::size_t want = 1;
    for (int j = 0; j < n; ++j) want *= static_cast<std::size_t>(supply[j] + 1);
    std::vector<std::int64_t> table(want);
    std::vector<bool> seen(want, false);
    for (const auto& [key, value] : b["table"].items()) {
      std::size_t idx = 0;
      try {
        idx = std::stoull(key);
      } catch (const std::exception&) {
        throw MalformedError(where + ": table key '" + key + "' is not a decimal index");
      }
      if (idx >= want)
        throw MalformedError(where + ": table key '" + key + "' outside the bundle domain");
      if (!value.is_number_integer())
        throw MalformedError(where + ": table entry '" + key + "' must be an integer");
      table[idx] = value.get<std::int64_t>();
      seen[idx] = true;
    }
    for (std::size_t idx = 0; idx < want; ++idx)
      if (!seen[idx])
        throw MalformedError(where + ": explicit table is missing bundle index " +
                             std::to_string(idx));
    return ValuationSpec::make_table(std::move(table), supply);
  }
  throw MalformedError(where + ": unknown valuation kind '" + kind + "'");
}

Rat rat_field(const Json& j, const std::string& where) {
  if (!j.is_string()) throw MalformedError(where + ": rationals are 'a/b' strings");
  auto r = rat_from_string(j.get<std::string>());
  if (!r) throw MalformedError(where + ": cannot parse rational '" + j.get<std::string>() + "'");
  return *r;
}

}  // namespace

Json instance_to_json(const MarketInstance& inst) {
  Json j;
  j["schema_version"] = 1;
  j["items"] = inst.n;
  j["supply"] = inst.supply;
  Json buyers = Json::array();
  for (const ValuationSpec& spec : inst.buyers) buyers.push_back(buyer_to_json(spec));
  j["buyers"] = buyers;
  return j;
}

MarketInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw MalformedError("instance file: top level must be an object");
  if (j.value("schema_version", 0) != 1)
    throw MalformedError("instance file: unsupported schema_version");
  MarketInstance inst;
  if (!j.contains("items") || !j["items"].is_number_integer())
    throw MalformedError("instance file: missing integer field 'items'");
  inst.n = j["items"].get<int>();
  if (!j.contains("supply") || !j["supply"].is_array())
    throw MalformedError("instance file: missing array field 'supply'");
  for (const auto& x : j["supply"]) inst.supply.push_back(x.get<int>());
  if (!j.contains("buyers") || !j["buyers"].is_array())
    throw MalformedError("instance file: missing array field 'buyers'");
  int i = 0;
  for (const auto& b : j["buyers"]) {
    inst.buyers.push_back(
        buyer_from_json(b, inst.n, inst.supply, "buyer " + std::to_string(i + 1)));
    ++i;
  }
  inst.validate();
  return inst;
}

Json result_to_json(const MarketInstance& inst, const SolveReport& report, bool verified,
                    const std::string& trace_path) {
  Json j;
  j["schema_version"] = 1;
  j["method"] = report.method;
  switch (report.verdict) {
    case SolveVerdict::equilibrium: j["verdict"] = "equilibrium"; break;
    case SolveVerdict::no_equilibrium_found: j["verdict"] = "no-equilibrium"; break;
    case SolveVerdict::inconclusive: j["verdict"] = "inconclusive"; break;
  }
  if (report.verdict == SolveVerdict::equilibrium) {
    Json prices = Json::array();
    for (const Rat& p : report.prices) prices.push_back(rat_to_string(p));
    j["prices"] = prices;
    Json alloc = Json::array();
    const Allocation& a = report.certificate->allocation;
    for (const Bundle& b : a) {
      Json items = Json::array();
      for (int jj = 0; jj < inst.n; ++jj)
        for (int c = 0; c < b.quantities[jj]; ++c) items.push_back(jj + 1);
      alloc.push_back(items);
    }
    j["allocation"] = alloc;
    j["welfare"] = rat_to_string(report.welfare);
  }
  j["verified"] = verified;
  Json calls;
  calls["value"] = report.oracle_calls.value_calls;
  calls["demand"] = report.oracle_calls.demand_calls;
  calls["aggregate"] = report.oracle_calls.aggregate_calls;
  j["oracle_calls"] = calls;
  j["iterations"] = report.iterations;
  j["retries"] = report.retries;
  if (!trace_path.empty()) j["trace"] = trace_path;
  return j;
}

ParsedResult result_from_json(const Json& j, const MarketInstance& inst) {
  ParsedResult r;
  if (!j.is_object()) throw MalformedError("result file: top level must be an object");
  r.method = j.value("method", "");
  r.verdict = j.value("verdict", "");
  r.verified = j.value("verified", false);
  if (r.verdict != "equilibrium") return r;
  if (!j.contains("prices") || !j["prices"].is_array())
    throw MalformedError("result file: missing array field 'prices'");
  int idx = 0;
  for (const auto& p : j["prices"])
    r.prices.push_back(rat_field(p, "result price " + std::to_string(++idx)));
  if (static_cast<int>(r.prices.size()) != inst.n)
    throw MalformedError("result file: price count does not match the instance");
  if (!j.contains("allocation") || !j["allocation"].is_array())
    throw MalformedError("result file: missing array field 'allocation'");
  for (const auto& items : j["allocation"]) {
    Bundle b = Bundle::empty(inst.n);
    for (const auto& x : items) {
      int item = x.get<int>();
      if (item < 1 || item > inst.n)
        throw MalformedError("result file: allocation item " + std::to_string(item) +
                             " out of range");
      ++b.quantities[item - 1];
    }
    r.allocation.push_back(b);
  }
  if (static_cast<int>(r.allocation.size()) != inst.m())
    throw MalformedError("result file: allocation buyer count does not match the instance");
  if (j.contains("welfare")) r.welfare = rat_field(j["welfare"], "result welfare");
  return r;
}

Json robust_report_to_json(const RobustPriceReport& report, int n, int m) {
  Json j;
  j["schema_version"] = 1;
  j["exists"] = report.exists;
  if (report.exists) {
    Json prices = Json::array();
    for (const Rat& p : report.prices) prices.push_back(rat_to_string(p));
    j["prices"] = prices;
    j["slack"] = rat_to_string(report.slack);
    Json phi = Json::array();
    for (const Rat& x : report.potential) phi.push_back(rat_to_string(x));
    Json witness;
    witness["type"] = "potential";
    witness["phi"] = phi;
    j["witness"] = witness;
  } else {
    Json nodes = Json::array();
    for (int v : report.cycle_witness->nodes) {
      if (v < n)
        nodes.push_back("item:" + std::to_string(v + 1));
      else if (v < n + m)
        nodes.push_back("dummy:" + std::to_string(v - n + 1));
      else
        nodes.push_back("free");
    }
    Json witness;
    witness["type"] = "cycle";
    witness["nodes"] = nodes;
    j["witness"] = witness;
  }
  return j;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

MarketInstance load_instance(const std::string& path) {
  std::string text = load_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedError(path + ": " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const MalformedError& e) {
    throw MalformedError(path + ": " + e.what());
  }
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw MalformedError("failed writing '" + path + "'");
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace walrus
