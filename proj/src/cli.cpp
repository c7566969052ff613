#include "walrus/cli.hpp"

#include <CLI11.hpp>

#include "walrus/bench.hpp"
#include "walrus/combinatorial.hpp"
#include "walrus/cutting_plane.hpp"
#include "walrus/io.hpp"
#include "walrus/verify.hpp"

namespace walrus {

namespace {

GsFamily parse_family(const std::string& name) {
  if (name == "additive") return GsFamily::additive;
  if (name == "unit_demand") return GsFamily::unit_demand;
  if (name == "matroid_rank_mix") return GsFamily::matroid_rank_mix;
  throw CLI::ValidationError("--family", "unknown family '" + name + "'");
}

std::vector<int> parse_int_list(const std::string& csv, const std::string& flag) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok.empty()) throw CLI::ValidationError(flag, "empty element in list");
    out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_gen(const std::string& family, int items, int buyers, std::int64_t max_value,
            std::uint64_t seed, int max_supply, const std::string& output, std::ostream& out) {
  MarketInstance inst;
  if (family == "general_table") {
    inst = generate_random_general(items, buyers, max_value, max_supply, seed);
  } else {
    inst = generate_random_gs(parse_family(family), items, buyers, max_value, seed);
  }
  std::string text = canonical_dump(instance_to_json(inst));
  if (output.empty())
    out << text;
  else
    save_text(output, text);
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& algorithm, std::uint64_t seed,
              const std::string& output, const std::string& trace_path, bool random_order,
              std::ostream& out, std::ostream& err) {
  MarketInstance inst = load_instance(instance_path);
  SolveReport report;
  std::vector<PhaseTrace> trace;
  if (algorithm == "combinatorial") {
    OracleCounter counter;
    CombinatorialOptions options;
    options.random_order = random_order;
    options.order_seed = seed;
    if (!trace_path.empty()) options.trace = &trace;
    report = solve_welfare_incremental(inst, counter, options);
  } else if (algorithm == "ellipsoid-gs") {
    report = solve_walrasian_prices(inst, Algorithm::ellipsoid_gs, seed);
  } else if (algorithm == "ellipsoid-gs-regularized") {
    report = solve_walrasian_prices(inst, Algorithm::ellipsoid_gs_regularized, seed);
  } else if (algorithm == "ellipsoid-general") {
    report = solve_walrasian_prices(inst, Algorithm::ellipsoid_general, seed);
  } else {
    err << "error: unknown algorithm '" << algorithm << "'\n";
    return 1;
  }

  bool verified = false;
  if (report.verdict == SolveVerdict::equilibrium) {
    MembershipVerdict v =
        walrasian_membership(inst, report.prices, &report.certificate->allocation);
    verified = v.member;
    if (!verified) {
      err << "error: solver produced an unverifiable certificate: " << v.reason << "\n";
      return 1;
    }
  }

  if (!trace_path.empty()) {
    std::string lines;
    for (const PhaseTrace& t : trace) {
      Json j;
      j["phase"] = t.phase;
      j["item"] = t.item;
      j["path"] = t.path;
      Json d = Json::object();
      for (std::size_t i = 0; i < t.distance.size(); ++i)
        d[std::to_string(t.distance_item[i])] = t.distance[i];
      j["d"] = d;
      lines += j.dump() + "\n";
    }
    save_text(trace_path, lines);
  }

  std::string text = canonical_dump(result_to_json(inst, report, verified, trace_path));
  if (output.empty())
    out << text;
  else
    save_text(output, text);
  switch (report.verdict) {
    case SolveVerdict::equilibrium:
      return 0;
    case SolveVerdict::no_equilibrium_found:
      err << "no equilibrium found (verified negative)\n";
      return 2;
    case SolveVerdict::inconclusive:
      err << "error: solver inconclusive after retry cap\n";
      return 1;
  }
  return 1;
}

int cmd_verify(const std::string& instance_path, const std::string& result_path,
               std::ostream& out, std::ostream& err) {
  MarketInstance inst = load_instance(instance_path);
  Json j;
  try {
    j = Json::parse(load_text(result_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedError(std::string(result_path) + ": " + e.what());
  }
  ParsedResult result = result_from_json(j, inst);
  if (result.verdict != "equilibrium") {
    out << "result claims no equilibrium; nothing to verify\n";
    return 0;
  }
  MembershipVerdict v = walrasian_membership(inst, result.prices, &result.allocation);
  if (!v.member) {
    err << "verification failed: " << v.reason << "\n";
    return 1;
  }
  Rat welfare = social_welfare(inst, result.allocation);
  if (welfare != result.welfare) {
    err << "verification failed: welfare " << rat_to_string(result.welfare)
        << " does not match recomputed " << rat_to_string(welfare) << "\n";
    return 1;
  }
  EquilibriumCertificate cert = certificate_from_prices(inst, result.prices, result.allocation);
  TheoremVerdict theorems = check_welfare_theorems(inst, cert);
  if (!theorems.pass) {
    err << "verification failed: " << theorems.detail << "\n";
    return 1;
  }
  out << "verified: equilibrium certificate is exact\n";
  return 0;
}

int cmd_robust(const std::string& instance_path, const std::string& output, std::ostream& out,
               std::ostream& err) {
  MarketInstance inst = load_instance(instance_path);
  WelfareResult welfare = brute_force_welfare(inst);
  RobustPriceReport report = compute_robust_prices(inst, welfare.optima.front());
  std::string text = canonical_dump(robust_report_to_json(report, inst.n, inst.m()));
  if (output.empty())
    out << text;
  else
    save_text(output, text);
  if (!report.exists) {
    err << "robust Walrasian prices do not exist (optimal allocation is not unique)\n";
    return 2;
  }
  return 0;
}

int cmd_check_gs(const std::string& instance_path, std::ostream& out) {
  MarketInstance inst = load_instance(instance_path);
  if (!inst.single_unit())
    throw DomainError("gross-substitutes check is defined on single-unit instances");
  bool all = true;
  for (int i = 0; i < inst.m(); ++i) {
    GsCheckResult r = check_gross_substitutes(inst.buyers[i], inst.n);
    out << "buyer " << (i + 1) << ": " << (r.is_gs ? "gross substitutes" : "NOT gross substitutes");
    if (!r.is_gs)
      out << " (exchange violated at B=" << r.violation->basis_b
          << ", B'=" << r.violation->basis_b2 << ", u=" << r.violation->element_u << ")";
    out << "\n";
    all = all && r.is_gs;
  }
  return all ? 0 : 2;
}

int cmd_bench(const std::string& items_csv, const std::string& buyers_csv,
              const std::string& family, std::int64_t max_value, std::uint64_t seed,
              int core_buyers, const std::string& output, std::ostream& out) {
  std::vector<int> items = parse_int_list(items_csv, "--items");
  std::vector<int> buyers = parse_int_list(buyers_csv, "--buyers");
  std::vector<BenchRow> rows =
      run_bench(items, buyers, parse_family(family), max_value, seed, core_buyers);
  std::string csv = bench_csv(rows);
  if (output.empty())
    out << csv;
  else
    save_text(output, csv);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Walrasian equilibrium solvers for markets of indivisible goods"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a seeded instance file");
  std::string gen_family = "matroid_rank_mix";
  int gen_items = 4, gen_buyers = 3, gen_max_supply = 1;
  std::int64_t gen_max_value = 10;
  std::uint64_t gen_seed = 0;
  std::string gen_output;
  gen->add_option("--family", gen_family,
                  "additive | unit_demand | matroid_rank_mix | general_table");
  gen->add_option("--items", gen_items, "item count")->check(CLI::PositiveNumber);
  gen->add_option("--buyers", gen_buyers, "buyer count")->check(CLI::PositiveNumber);
  gen->add_option("--max-value", gen_max_value, "parameter bound")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--max-supply", gen_max_supply, "per-item supply bound (general_table)");
  gen->add_option("-o,--output", gen_output, "output path (stdout when omitted)");

  auto* solve = app.add_subcommand("solve", "compute a Walrasian equilibrium");
  std::string solve_instance, solve_algorithm = "combinatorial", solve_output, solve_trace;
  std::uint64_t solve_seed = 0;
  bool solve_random_order = false;
  solve->add_option("instance", solve_instance, "instance file")->required();
  solve->add_option("--algorithm", solve_algorithm,
                    "combinatorial | ellipsoid-gs | ellipsoid-gs-regularized | ellipsoid-general");
  solve->add_option("--seed", solve_seed, "solver seed");
  solve->add_option("-o,--output", solve_output, "result path (stdout when omitted)");
  solve->add_option("--trace", solve_trace, "phase trace path (JSON lines, combinatorial)");
  solve->add_flag("--random-order", solve_random_order,
                  "insert items in seeded random order (combinatorial)");

  auto* verify = app.add_subcommand("verify", "re-check a result file against its instance");
  std::string verify_instance, verify_result;
  verify->add_option("instance", verify_instance, "instance file")->required();
  verify->add_option("result", verify_result, "result file")->required();

  auto* robust = app.add_subcommand("robust", "robust Walrasian prices of the optimal allocation");
  std::string robust_instance, robust_output;
  robust->add_option("instance", robust_instance, "instance file")->required();
  robust->add_option("-o,--output", robust_output, "report path (stdout when omitted)");

  auto* checkgs = app.add_subcommand("check-gs", "exchange-property check per buyer");
  std::string checkgs_instance;
  checkgs->add_option("instance", checkgs_instance, "instance file")->required();

  auto* bench = app.add_subcommand("bench", "oracle-call sweep of the combinatorial solver");
  std::string bench_items = "4,8,16,32", bench_buyers = "8,64";
  std::string bench_family = "matroid_rank_mix", bench_output;
  std::int64_t bench_max_value = 10;
  std::uint64_t bench_seed = 0;
  int bench_core = 0;
  bench->add_option("--items", bench_items, "comma-separated item counts");
  bench->add_option("--buyers", bench_buyers, "comma-separated buyer counts");
  bench->add_option("--family", bench_family, "instance family");
  bench->add_option("--max-value", bench_max_value, "parameter bound");
  bench->add_option("--seed", bench_seed, "generator seed");
  bench->add_option("--core-buyers", bench_core,
                    "fix the market to this many drawn buyers, pad the rest with zeros");
  bench->add_option("-o,--output", bench_output, "CSV path (stdout when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_family, gen_items, gen_buyers, gen_max_value, gen_seed, gen_max_supply,
                     gen_output, out);
    if (solve->parsed())
      return cmd_solve(solve_instance, solve_algorithm, solve_seed, solve_output, solve_trace,
                       solve_random_order, out, err);
    if (verify->parsed()) return cmd_verify(verify_instance, verify_result, out, err);
    if (robust->parsed()) return cmd_robust(robust_instance, robust_output, out, err);
    if (checkgs->parsed()) return cmd_check_gs(checkgs_instance, out);
    if (bench->parsed())
      return cmd_bench(bench_items, bench_buyers, bench_family, bench_max_value, bench_seed,
                       bench_core, bench_output, out);
  } catch (const MalformedError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 1;
}

}  // namespace walrus
