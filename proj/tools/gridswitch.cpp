// gridswitch: transmission-switching optimization harness.
//
// Subcommands:
//   solve    run one strategy (otsp | otsp-x0 | p-otsp) on a case, writing
//            a trace CSV and a summary JSON
//   compare  run several strategies on several cases and emit a table
//   dump     parse a case and write the normalized network JSON and/or the
//            full switching model in LP format

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridswitch/coordinator.hpp"
#include "gridswitch/matpower.hpp"
#include "gridswitch/model.hpp"

namespace gs = gridswitch;
namespace fs = std::filesystem;

namespace {

int log_level() {
  const char* v = std::getenv("GRIDSWITCH_LOG");
  if (!v) return 1;
  std::string s(v);
  if (s == "debug") return 2;
  if (s == "quiet") return 0;
  return 1;
}

struct CommonOpts {
  std::string case_path;
  bool zero_pmin = false;
  bool linearize = false;
};

gs::Network load_network(const CommonOpts& c) {
  std::ifstream in(c.case_path);
  if (!in) throw gs::ParseError("cannot open case file: " + c.case_path);
  gs::RawCase raw = gs::parse_matpower(in);
  gs::NetworkOptions nopts;
  nopts.zero_pmin = c.zero_pmin;
  nopts.linearize = c.linearize;
  return gs::to_network(raw, nopts);
}

std::vector<gs::WorkerConfig> parse_workers(const std::string& spec,
                                            double update_time,
                                            double reset_time) {
  std::vector<gs::WorkerConfig> out;
  if (spec.empty()) return out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    gs::WorkerConfig cfg;
    cfg.update_time = update_time;
    cfg.reset_time = reset_time;
    cfg.no_improvement_window = reset_time;
    const auto colon = item.find(':');
    cfg.n0 = std::stoi(item.substr(0, colon));
    if (colon != std::string::npos)
      cfg.delta_n = std::stoi(item.substr(colon + 1));
    out.push_back(cfg);
  }
  return out;
}

struct RunSettings {
  std::string strategy = "otsp";
  double time_limit = 900.0;
  double gap_tol = 0.01;  // percent
  std::string workers_spec = "40:10";
  double update_time = 10.0;
  double reset_time = 20.0;
  unsigned seed = 0;
  std::string clock = "wall";
  std::string out_dir = ".";
};

struct RunOutput {
  gs::RunReport report;
  double z_dcopf = 0.0;
};

RunOutput execute(const gs::Network& net, const RunSettings& s) {
  // baseline: DC dispatch cost with every line active
  const gs::Topology all = gs::Topology::all(net);
  const gs::LinearProgram base_lp = gs::build_sdcopf(net, all);
  const gs::LpResult base = gs::solve_lp(base_lp);
  if (base.status != gs::LpStatus::Optimal)
    throw std::runtime_error("all-lines-active DCOPF is not solvable");

  gs::ParallelOptions popts;
  popts.master.bnb.time_limit = s.time_limit;
  popts.master.bnb.gap_tol = s.gap_tol;
  popts.worker_bnb.gap_tol = s.gap_tol;
  popts.clock = s.clock == "simulated" ? gs::ClockMode::Simulated
                                       : gs::ClockMode::Wall;
  popts.seed = s.seed;

  if (s.strategy == "otsp-x0") {
    const gs::OtspSolution lifted = gs::lift_sdcopf(net, all, base_lp, base);
    popts.master.mipstart = lifted.status;
  } else if (s.strategy == "p-otsp") {
    popts.workers = parse_workers(s.workers_spec, s.update_time, s.reset_time);
    if (popts.workers.empty())
      throw std::invalid_argument("p-otsp requires at least one worker");
  } else if (s.strategy != "otsp") {
    throw std::invalid_argument("unknown strategy: " + s.strategy);
  }

  RunOutput out;
  out.z_dcopf = base.objective;
  out.report = gs::run_parallel(net, popts);
  return out;
}

nlohmann::json summarize(const std::string& case_path, const RunSettings& s,
                         const RunOutput& out) {
  const auto& m = out.report.master;
  nlohmann::json j;
  j["case"] = case_path;
  j["strategy"] = s.strategy;
  j["ct_s"] = m.wall_time;
  j["gap_pct"] = std::isfinite(m.gap) ? m.gap : -1.0;
  j["z_dcopf"] = out.z_dcopf;
  j["z_final"] = m.objective;
  j["delta_z_pct"] = 100.0 * (out.z_dcopf - m.objective) / out.z_dcopf;
  j["lb"] = m.lower_bound;
  j["nodes"] = m.nodes;
  j["status"] = m.status == gs::MipStatus::Optimal
                    ? "optimal"
                    : m.status == gs::MipStatus::Feasible ? "feasible"
                                                          : "infeasible";
  j["injections_accepted"] = out.report.injections_accepted;
  j["injections_rejected"] = out.report.injections_rejected;
  return j;
}

int cmd_solve(const CommonOpts& c, const RunSettings& s) {
  const gs::Network net = load_network(c);
  if (log_level() >= 1)
    std::cerr << "[gridswitch] " << c.case_path << ": " << net.num_buses()
              << " buses, " << net.num_branches() << " branches, strategy "
              << s.strategy << "\n";
  const RunOutput out = execute(net, s);

  fs::create_directories(s.out_dir);
  {
    std::ofstream tf(fs::path(s.out_dir) / "trace.csv");
    gs::write_trace_csv(tf, out.report.trace);
  }
  const nlohmann::json summary = summarize(c.case_path, s, out);
  {
    std::ofstream sf(fs::path(s.out_dir) / "summary.json");
    sf << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& cases,
                const std::vector<std::string>& strategies, CommonOpts c,
                RunSettings s) {
  fs::create_directories(s.out_dir);
  std::ostringstream md, csv;
  md << "| case |";
  csv << "case";
  for (const auto& st : strategies) {
    md << " " << st << " ct [s] | " << st << " gap [%] | " << st
       << " dz [%] |";
    csv << "," << st << "_ct_s," << st << "_gap_pct," << st << "_dz_pct";
  }
  md << " dz_abs [$/h] |\n|---|";
  csv << ",dz_abs_per_h\n";
  for (std::size_t i = 0; i < strategies.size(); ++i) md << "---|---|---|";
  md << "---|\n";

  bool any_failed = false;
  for (const auto& case_path : cases) {
    md << "| " << fs::path(case_path).stem().string() << " |";
    csv << fs::path(case_path).stem().string();
    double best_parallel = std::numeric_limits<double>::infinity();
    double best_other = std::numeric_limits<double>::infinity();
    bool row_ok = false;
    for (const auto& st : strategies) {
      c.case_path = case_path;
      s.strategy = st;
      try {
        const gs::Network net = load_network(c);
        const RunOutput out = execute(net, s);
        const auto j = summarize(case_path, s, out);
        md << " " << j["ct_s"].get<double>() << " | "
           << j["gap_pct"].get<double>() << " | "
           << j["delta_z_pct"].get<double>() << " |";
        csv << "," << j["ct_s"].get<double>() << ","
            << j["gap_pct"].get<double>() << ","
            << j["delta_z_pct"].get<double>();
        const double z = j["z_final"].get<double>();
        if (st == "p-otsp") best_parallel = std::min(best_parallel, z);
        else best_other = std::min(best_other, z);
        row_ok = true;
      } catch (const std::exception& e) {
        std::cerr << "[gridswitch] " << case_path << "/" << st
                  << " failed: " << e.what() << "\n";
        md << " - | - | - |";
        csv << ",-,-,-";
        any_failed = true;
      }
    }
    const double dz_abs =
        (std::isfinite(best_parallel) && std::isfinite(best_other))
            ? best_other - best_parallel
            : 0.0;
    md << " " << dz_abs << " |\n";
    csv << "," << dz_abs << "\n";
    (void)row_ok;
  }
  {
    std::ofstream f(fs::path(s.out_dir) / "table.md");
    f << md.str();
  }
  {
    std::ofstream f(fs::path(s.out_dir) / "table.csv");
    f << csv.str();
  }
  std::cout << md.str();
  return any_failed ? 2 : 0;
}

int cmd_dump(const CommonOpts& c, const std::string& json_out,
             const std::string& lp_out) {
  const gs::Network net = load_network(c);
  if (!json_out.empty()) {
    std::ofstream f(json_out);
    f << net.to_json().dump(2) << "\n";
  }
  if (!lp_out.empty()) {
    const gs::MixedIntegerProgram mip = gs::build_otsp(net);
    std::ofstream f(lp_out);
    mip.lp.write_lp_format(f, &mip.binaries);
  }
  std::cout << "buses=" << net.num_buses()
            << " branches=" << net.num_branches()
            << " generators=" << net.num_generators()
            << " demand_pu=" << net.total_demand() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transmission switching optimization toolkit"};
  app.require_subcommand(1);

  CommonOpts common;
  RunSettings settings;
  std::vector<std::string> cases, strategies{"otsp"};
  std::string json_out, lp_out;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--zero-pmin", common.zero_pmin,
                  "force generator minimum output to zero");
    cmd->add_flag("--linearize", common.linearize,
                  "drop quadratic cost terms with a warning");
  };
  auto add_run = [&](CLI::App* cmd) {
    cmd->add_option("--time-limit", settings.time_limit, "seconds");
    cmd->add_option("--gap-tol", settings.gap_tol, "optimality gap, percent");
    cmd->add_option("--workers", settings.workers_spec,
                    "worker configs n0:dn[,n0:dn...]");
    cmd->add_option("--update-time", settings.update_time, "seconds");
    cmd->add_option("--reset-time", settings.reset_time, "seconds");
    cmd->add_option("--seed", settings.seed, "rng seed");
    cmd->add_option("--clock", settings.clock, "wall | simulated");
    cmd->add_option("--out-dir", settings.out_dir, "artifact directory");
  };

  CLI::App* solve = app.add_subcommand("solve", "run one strategy");
  solve->add_option("--case", common.case_path, "MATPOWER case file")
      ->required();
  solve->add_option("--strategy", settings.strategy, "otsp | otsp-x0 | p-otsp");
  add_common(solve);
  add_run(solve);

  CLI::App* compare = app.add_subcommand("compare", "run a strategy table");
  compare->add_option("--case", cases, "case files (repeatable)")->required();
  compare->add_option("--strategies", strategies, "strategy list")
      ->delimiter(',');
  add_common(compare);
  add_run(compare);

  CLI::App* dump = app.add_subcommand("dump", "inspect a case");
  dump->add_option("--case", common.case_path, "MATPOWER case file")
      ->required();
  dump->add_option("--json", json_out, "write normalized network JSON");
  dump->add_option("--lp", lp_out, "write the full switching model, LP format");
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(common, settings);
    if (compare->parsed()) return cmd_compare(cases, strategies, common,
                                              settings);
    if (dump->parsed()) return cmd_dump(common, json_out, lp_out);
  } catch (const gs::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const gs::ConversionError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
