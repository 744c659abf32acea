// Batch front-end: scenario sweeps, solver inspection, engine comparison.
//
// Exit codes: 0 success, 2 validation failure, 3 acceptance-check failure
// (sweep --check only).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pertprop/iontrap.hpp"
#include "pertprop/oracle.hpp"
#include "pertprop/scenario.hpp"
#include "pertprop/td_expansion.hpp"
#include "pertprop/ti_expansion.hpp"

namespace {

using nlohmann::json;
using namespace pertprop;

constexpr int kExitValidation = 2;
constexpr int kExitCheckFailed = 3;

struct CommonOpts {
  std::string config;
  std::string out = ".";
  int threads = 1;
  unsigned long long seed = 0;  // reserved for randomized property inputs
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config, "JSON config path");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--threads", opts.threads, "worker count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "seed for randomized inputs");
}

void ensure_out_dir(const std::string& out) {
  std::filesystem::create_directories(out);
}

json operator_summary(const Operator& x) {
  json j;
  j["norm"] = x.norm();
  j["hermiticity_defect"] = hermiticity_defect(x);
  return j;
}

int run_ti_solve(const CommonOpts& opts) {
  const ScenarioConfig cfg = load_scenario(opts.config);
  if (cfg.engine != EngineKind::Ti)
    throw std::invalid_argument("ti-solve: config engine must be 'ti'");

  Operator h0;
  std::vector<Operator> h_list;
  if (cfg.model == ModelKind::IonTrap) {
    const RotatingFrame rf = rotating_frame(cfg.iontrap);
    h0 = rf.frak_h0;
    h_list = {rf.frak_h1};
  } else {
    h0 = cfg.h0;
    h_list = cfg.h_list;
  }
  while (static_cast<int>(h_list.size()) < cfg.order)
    h_list.push_back(Operator::Zero(h0.rows(), h0.cols()));
  const TISolution sol = solve_ti(h0, h_list, cfg.order);

  json j;
  j["schema_version"] = 1;
  j["scenario_id"] = cfg.scenario_id;
  j["order"] = sol.order;
  j["clusters"] = sol.spectrum.clusters.size();
  json orders = json::array();
  for (int n = 1; n <= sol.order; ++n) {
    json o;
    o["n"] = n;
    o["c"] = operator_summary(sol.c_list[n - 1]);
    o["z"] = operator_summary(sol.z_list[n - 1]);
    o["c_h0_commutator"] = commutator(sol.c_list[n - 1], h0).norm();
    orders.push_back(o);
  }
  j["orders"] = orders;
  ensure_out_dir(opts.out);
  std::ofstream out(opts.out + "/" + cfg.scenario_id + "_ti.json");
  out << j.dump(2) << '\n';
  std::cout << "wrote " << opts.out << "/" << cfg.scenario_id << "_ti.json\n";
  return 0;
}

int run_td_solve(const CommonOpts& opts) {
  const ScenarioConfig cfg = load_scenario(opts.config);

  std::vector<TrigPoly> chain;
  if (cfg.model == ModelKind::IonTrap) {
    IonTrapParams p = cfg.iontrap;
    p.lambda = 1.0;
    const ModelHamiltonian mh = build_hamiltonian(p, cfg.iontrap_form);
    chain = {interaction_picture(p, mh.h0, mh.h_drive)};
  } else if (cfg.model == ModelKind::GenericTd) {
    chain = cfg.h_chain;
  } else {
    throw std::invalid_argument("td-solve: model must be time-dependent");
  }
  while (static_cast<int>(chain.size()) < cfg.order)
    chain.emplace_back(chain.front().basis(), chain.front().dim());

  TDSolution sol;
  switch (cfg.engine) {
    case EngineKind::TdMean:
      sol = solve_td_mean(chain, cfg.order);
      break;
    case EngineKind::TdGauged:
    case EngineKind::FloquetMagnus:
      sol = solve_td_gauged(
          chain, cfg.order,
          std::vector<Operator>(cfg.order, Operator::Zero(chain.front().dim(),
                                                          chain.front().dim())));
      break;
    case EngineKind::Magnus:
      sol = magnus_mode(chain, cfg.order);
      break;
    default:
      throw std::invalid_argument(
          "td-solve: engine must be td-mean | td-gauged | floquet-magnus | "
          "magnus");
  }

  const double lambda_probe =
      cfg.lambda_grid.empty() ? 0.1 : cfg.lambda_grid.front();
  json j;
  j["schema_version"] = 1;
  j["scenario_id"] = cfg.scenario_id;
  j["engine"] = engine_name(cfg.engine);
  j["order"] = sol.order;
  json orders = json::array();
  for (int n = 1; n <= sol.order; ++n) {
    json o;
    o["n"] = n;
    o["c_mean_norm"] = evaluate(sol.c_list[n - 1], 0.0).norm();
    if (!sol.z_list.empty()) {
      o["z_at_0"] = operator_summary(evaluate(sol.z_list[n - 1], 0.0));
      o["z_terms"] = sol.z_list[n - 1].terms().size();
    }
    orders.push_back(o);
  }
  j["orders"] = orders;
  j["effective_hamiltonian_residual"] =
      verify_effective_hamiltonian(sol, lambda_probe, cfg.time_grid);
  ensure_out_dir(opts.out);
  std::ofstream out(opts.out + "/" + cfg.scenario_id + "_td.json");
  out << j.dump(2) << '\n';
  std::cout << "wrote " << opts.out << "/" << cfg.scenario_id << "_td.json\n";
  return 0;
}

int run_iontrap_demo(const CommonOpts& opts) {
  // Resonant single-sideband model, the library's flagship validation case.
  IonTrapParams p = IonTrapParams::linearized(1.0, 1.0, 0.1, 16);

  const ModelHamiltonian mh = build_hamiltonian(p, HamiltonianForm::GeneralizedGF);
  const TrigPoly h1 = interaction_picture(p, mh.h0, mh.h_drive);
  const TDSolution td = solve_td_mean({h1}, 1);
  const RotatingFrame rf = rotating_frame(p);
  const TISolution ti = solve_ti(rf.frak_h0, {rf.frak_h1}, 1);

  std::printf("resonant ion trap, cutoff %d, eta %.3g\n", p.cutoff, p.eta);
  std::printf("  |C1(engine) - C1(closed form)|   = %.3e\n",
              (evaluate(td.c_list[0], 0.0) - inf_c1(p)).norm());
  std::printf("  |Z1(0)(engine) - Z1(closed)|     = %.3e\n",
              (td.z0_list[0] - inf_z1(p)).norm());
  std::printf("  |C1(static) - C1(time-dep)|      = %.3e\n",
              (ti.c_list[0] - evaluate(td.c_list[0], 0.0)).norm());
  std::printf("  |Z1(static) - Z1(time-dep)(0)|   = %.3e\n",
              (ti.z_list[0] - td.z0_list[0]).norm());

  ScenarioConfig cfg;
  cfg.scenario_id = "iontrap-demo";
  cfg.engine = EngineKind::TdMean;
  cfg.order = 1;
  cfg.lambda_grid = {0.02, 0.01, 0.005, 0.0025};
  const double period = 2.0 * M_PI / p.nu;
  cfg.time_grid = {period, 3.0 * period};
  cfg.model = ModelKind::IonTrap;
  cfg.iontrap = p;

  const ScenarioResult result = run_scenario(cfg, opts.threads);
  ensure_out_dir(opts.out);
  write_scenario_csv(result, opts.out + "/iontrap-demo.csv");
  write_scenario_summary(result, opts.out + "/iontrap-demo.json");
  std::printf("  error slope vs lambda            = %.3f (r^2 %.4f)\n",
              result.slope, result.r_squared);
  std::printf("wrote %s/iontrap-demo.{csv,json}\n", opts.out.c_str());
  return 0;
}

int run_sweep(const CommonOpts& opts, bool check, double min_slope) {
  const ScenarioConfig cfg = load_scenario(opts.config);
  const ScenarioResult result = run_scenario(cfg, opts.threads);
  ensure_out_dir(opts.out);
  write_scenario_csv(result, opts.out + "/" + cfg.scenario_id + ".csv");
  write_scenario_summary(result, opts.out + "/" + cfg.scenario_id + ".json");
  std::printf("%s: %zu rows, slope %.3f (r^2 %.4f)\n", cfg.scenario_id.c_str(),
              result.rows.size(), result.slope, result.r_squared);
  if (check) {
    const double wanted = min_slope > 0.0 ? min_slope : cfg.order + 0.8;
    if (result.slope < wanted) {
      std::fprintf(stderr, "check failed: slope %.3f < required %.3f\n",
                   result.slope, wanted);
      return kExitCheckFailed;
    }
    std::printf("check passed: slope %.3f >= %.3f\n", result.slope, wanted);
  }
  return 0;
}

int run_report(const CommonOpts& opts) {
  std::ifstream in(opts.config);
  if (!in)
    throw std::invalid_argument("config: cannot open " + opts.config);
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str());
  const json& list = j.is_array() ? j : j.at("scenarios");
  if (!list.is_array() || list.size() < 2)
    throw std::invalid_argument(
        "report: config must hold >= 2 scenarios (array or {\"scenarios\": "
        "[...]})");
  std::vector<ScenarioConfig> configs;
  for (const auto& entry : list)
    configs.push_back(parse_scenario_text(entry.dump()));
  ensure_out_dir(opts.out);
  compare_report(configs, opts.out, opts.threads);
  std::cout << "wrote " << opts.out << "/report.{md,json}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"perturbative propagator toolkit"};
  app.require_subcommand(1);

  CommonOpts ti_opts, td_opts, demo_opts, sweep_opts, report_opts;
  bool check = false;
  double min_slope = 0.0;

  auto* ti_cmd = app.add_subcommand(
      "ti-solve", "solve the static recursion and dump per-order data");
  add_common(ti_cmd, ti_opts, true);

  auto* td_cmd = app.add_subcommand(
      "td-solve", "solve the driven recursion and dump per-order data");
  add_common(td_cmd, td_opts, true);

  auto* demo_cmd = app.add_subcommand(
      "iontrap-demo", "first-order resonant ion-trap walkthrough");
  add_common(demo_cmd, demo_opts, false);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "run one scenario over its (lambda, t) grid");
  add_common(sweep_cmd, sweep_opts, true);
  sweep_cmd->add_flag("--check", check,
                      "fail (exit 3) if the fitted slope is below the target");
  sweep_cmd->add_option("--min-slope", min_slope,
                        "slope target for --check (default: order + 0.8)");

  auto* report_cmd =
      app.add_subcommand("report", "side-by-side comparison of scenarios");
  add_common(report_cmd, report_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (ti_cmd->parsed()) return run_ti_solve(ti_opts);
    if (td_cmd->parsed()) return run_td_solve(td_opts);
    if (demo_cmd->parsed()) return run_iontrap_demo(demo_opts);
    if (sweep_cmd->parsed()) return run_sweep(sweep_opts, check, min_slope);
    if (report_cmd->parsed()) return run_report(report_opts);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
