#include "pertprop/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "pertprop/oracle.hpp"
#include "pertprop/td_expansion.hpp"
#include "pertprop/ti_expansion.hpp"

namespace pertprop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("config." + field + ": " + what);
}

double require_number(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number())
    fail(field, "expected a number");
  return j[field].get<double>();
}

std::vector<double> require_grid(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_array() || j[field].empty())
    fail(field, "expected a non-empty array of numbers");
  std::vector<double> grid;
  for (const auto& v : j[field]) {
    if (!v.is_number()) fail(field, "expected numbers");
    grid.push_back(v.get<double>());
  }
  return grid;
}

Operator parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a matrix (array of rows)");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Operator m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      fail(field, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& e = j[r][c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
          !e[1].is_number())
        fail(field, "entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

std::function<double(int)> parse_table(const json& j, const std::string& field,
                                       double fallback) {
  if (!j.contains(field)) return [fallback](int) { return fallback; };
  const auto& v = j[field];
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](int) { return c; };
  }
  if (v.is_array() && !v.empty()) {
    std::vector<double> table;
    for (const auto& e : v) {
      if (!e.is_number()) fail(field, "table entries must be numbers");
      table.push_back(e.get<double>());
    }
    return [table](int n) {
      return table[std::min<std::size_t>(n, table.size() - 1)];
    };
  }
  fail(field, "expected a number or a non-empty array");
}

EngineKind parse_engine(const std::string& name) {
  if (name == "ti") return EngineKind::Ti;
  if (name == "td-mean") return EngineKind::TdMean;
  if (name == "td-gauged") return EngineKind::TdGauged;
  if (name == "magnus") return EngineKind::Magnus;
  if (name == "floquet-magnus") return EngineKind::FloquetMagnus;
  if (name == "rwa") return EngineKind::Rwa;
  if (name == "dyson") return EngineKind::Dyson;
  fail("engine", "unknown engine '" + name + "'");
}

TrigPoly parse_trigpoly(const json& j, const FrequencyBasisPtr& basis,
                        const std::string& field) {
  if (!j.contains("terms") || !j["terms"].is_array())
    fail(field, "expected a 'terms' array");
  TrigPoly poly;
  bool first = true;
  for (const auto& term : j["terms"]) {
    if (!term.contains("freq") || !term["freq"].is_array())
      fail(field, "each term needs an integer 'freq' vector");
    std::vector<int> freq;
    for (const auto& f : term["freq"]) freq.push_back(f.get<int>());
    const int tpow = term.value("tpow", 0);
    const Operator m = parse_matrix(term["matrix"], field + ".matrix");
    if (first) {
      poly = TrigPoly(basis, m.rows());
      first = false;
    }
    poly.add_term(freq, m, tpow);
  }
  if (first) fail(field, "at least one term required");
  poly.prune();
  return poly;
}

struct EngineContext {
  // time-independent path
  Operator ti_h0;
  std::vector<Operator> ti_h_list;
  TISolution ti_sol;
  // time-dependent path
  std::vector<TrigPoly> chain;
  TDSolution td_sol;
  // rwa path
  Operator rwa_base;
  Eigen::Index dim = 0;
};

EngineContext prepare(const ScenarioConfig& cfg) {
  EngineContext ctx;
  const bool ti_engine = cfg.engine == EngineKind::Ti;

  if (cfg.model == ModelKind::IonTrap) {
    IonTrapParams p = cfg.iontrap;
    p.lambda = 1.0;  // per-order chains carry unit coupling
    ctx.dim = 2 * p.cutoff;
    if (ti_engine) {
      const RotatingFrame rf = rotating_frame(p);
      ctx.ti_h0 = rf.frak_h0;
      ctx.ti_h_list.assign(cfg.order, Operator::Zero(ctx.dim, ctx.dim));
      ctx.ti_h_list[0] = rf.frak_h1;
    } else {
      const ModelHamiltonian mh = build_hamiltonian(p, cfg.iontrap_form);
      const TrigPoly h1 = interaction_picture(p, mh.h0, mh.h_drive);
      ctx.chain.assign(cfg.order, TrigPoly(h1.basis(), h1.dim()));
      ctx.chain[0] = h1;
      if (cfg.engine == EngineKind::Rwa) ctx.rwa_base = inf_c1(p);
    }
  } else if (cfg.model == ModelKind::GenericTi) {
    if (!ti_engine) fail("engine", "generic-ti models support the ti engine only");
    ctx.dim = cfg.h0.rows();
    ctx.ti_h0 = cfg.h0;
    ctx.ti_h_list = cfg.h_list;
    while (static_cast<int>(ctx.ti_h_list.size()) < cfg.order)
      ctx.ti_h_list.push_back(Operator::Zero(ctx.dim, ctx.dim));
  } else {
    if (ti_engine || cfg.engine == EngineKind::Rwa)
      fail("engine", "generic-td models need a time-dependent engine");
    ctx.chain = cfg.h_chain;
    ctx.dim = ctx.chain.front().dim();
    while (static_cast<int>(ctx.chain.size()) < cfg.order)
      ctx.chain.emplace_back(ctx.chain.front().basis(), ctx.dim);
  }

  switch (cfg.engine) {
    case EngineKind::Ti:
      ctx.ti_sol = solve_ti(ctx.ti_h0, ctx.ti_h_list, cfg.order);
      break;
    case EngineKind::TdMean:
      ctx.td_sol = solve_td_mean(ctx.chain, cfg.order);
      break;
    case EngineKind::TdGauged:
    case EngineKind::FloquetMagnus: {
      const std::vector<Operator> zero_gauge(
          cfg.order, Operator::Zero(ctx.dim, ctx.dim));
      ctx.td_sol = solve_td_gauged(ctx.chain, cfg.order, zero_gauge);
      break;
    }
    case EngineKind::Magnus:
      ctx.td_sol = magnus_mode(ctx.chain, cfg.order);
      break;
    case EngineKind::Rwa:
    case EngineKind::Dyson:
      break;
  }
  return ctx;
}

Operator oracle_u(const ScenarioConfig& cfg, const EngineContext& ctx,
                  double lambda, double t) {
  if (cfg.engine == EngineKind::Ti) {
    Operator h = ctx.ti_h0;
    double power = 1.0;
    for (const auto& hn : ctx.ti_h_list) {
      power *= lambda;
      h += power * hn;
    }
    return hermitian_exponential(h, t);
  }
  auto h_of_t = [&](double s) {
    Operator h = Operator::Zero(ctx.dim, ctx.dim);
    double power = 1.0;
    for (const auto& hn : ctx.chain) {
      power *= lambda;
      h += power * evaluate(hn, s);
    }
    return h;
  };
  return integrate_schrodinger(h_of_t, ctx.dim, t, cfg.oracle_rel_tol)
      .final_u();
}

Operator engine_u(const ScenarioConfig& cfg, const EngineContext& ctx,
                  double lambda, double t) {
  const Operator id = Operator::Identity(ctx.dim, ctx.dim);
  switch (cfg.engine) {
    case EngineKind::Ti:
      return evolution_ti(ctx.ti_sol, lambda, t);
    case EngineKind::TdMean:
    case EngineKind::TdGauged:
    case EngineKind::FloquetMagnus:
    case EngineKind::Magnus:
      return evolution_td(ctx.td_sol, lambda, t, id);
    case EngineKind::Rwa:
      return hermitian_exponential(lambda * ctx.rwa_base, t);
    case EngineKind::Dyson:
      return dyson_truncation(ctx.chain.front(), lambda, cfg.order, t);
  }
  throw std::logic_error("engine_u: unreachable");
}

double commutation_residual(const ScenarioConfig& cfg,
                            const EngineContext& ctx, double lambda) {
  switch (cfg.engine) {
    case EngineKind::Ti: {
      const Operator c = ctx.ti_sol.c_truncated(lambda);
      return commutator(c, ctx.ti_h0).norm();
    }
    case EngineKind::TdMean:
    case EngineKind::TdGauged:
    case EngineKind::FloquetMagnus:
    case EngineKind::Magnus:
      return verify_effective_hamiltonian(ctx.td_sol, lambda, cfg.time_grid);
    default:
      return 0.0;
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* engine_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::Ti: return "ti";
    case EngineKind::TdMean: return "td-mean";
    case EngineKind::TdGauged: return "td-gauged";
    case EngineKind::Magnus: return "magnus";
    case EngineKind::FloquetMagnus: return "floquet-magnus";
    case EngineKind::Rwa: return "rwa";
    case EngineKind::Dyson: return "dyson";
  }
  return "unknown";
}

ScenarioConfig parse_scenario_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                e.what());
  }

  ScenarioConfig cfg;
  cfg.scenario_id = j.value("scenario_id", std::string("scenario"));
  if (!j.contains("engine") || !j["engine"].is_string())
    fail("engine", "expected a string");
  cfg.engine = parse_engine(j["engine"].get<std::string>());
  cfg.order = j.value("order", 1);
  if (cfg.order < 1) fail("order", "must be >= 1");
  cfg.lambda_grid = require_grid(j, "lambda_grid");
  for (double l : cfg.lambda_grid)
    if (!(l >= 0.0)) fail("lambda_grid", "entries must be >= 0");
  cfg.time_grid = require_grid(j, "time_grid");
  cfg.oracle_rel_tol = j.value("oracle_rel_tol", 1e-11);

  if (!j.contains("model") || !j["model"].is_object())
    fail("model", "expected an object");
  const json& m = j["model"];
  const std::string kind = m.value("kind", std::string("iontrap"));
  if (kind == "iontrap") {
    cfg.model = ModelKind::IonTrap;
    IonTrapParams p;
    p.nu = require_number(m, "nu");
    p.epsilon = m.value("epsilon", p.nu);
    p.alpha = m.value("alpha", 0.0);
    p.eta = m.value("eta", 0.0);
    p.phi = m.value("phi", -M_PI / 2.0);
    p.cutoff = m.value("cutoff", 16);
    p.g = parse_table(m, "g", 1.0);
    p.f = parse_table(m, "f", p.eta);
    cfg.iontrap = p;
    const std::string form = m.value("form", std::string("generalized"));
    if (form == "generalized")
      cfg.iontrap_form = HamiltonianForm::GeneralizedGF;
    else if (form == "linearized")
      cfg.iontrap_form = HamiltonianForm::Linearized;
    else if (form == "full")
      cfg.iontrap_form = HamiltonianForm::FullDisplacement;
    else
      fail("model.form", "expected generalized | linearized | full");
  } else if (kind == "generic-ti") {
    cfg.model = ModelKind::GenericTi;
    cfg.h0 = parse_matrix(m.at("h0"), "model.h0");
    if (!m.contains("h_list") || !m["h_list"].is_array() || m["h_list"].empty())
      fail("model.h_list", "expected a non-empty array of matrices");
    for (const auto& h : m["h_list"])
      cfg.h_list.push_back(parse_matrix(h, "model.h_list[]"));
  } else if (kind == "generic-td") {
    cfg.model = ModelKind::GenericTd;
    if (!m.contains("base") || !m["base"].is_array() || m["base"].empty())
      fail("model.base", "expected a non-empty array of base frequencies");
    std::vector<double> base;
    for (const auto& b : m["base"]) base.push_back(b.get<double>());
    const FrequencyBasisPtr basis = make_basis(base);
    if (!m.contains("h_chain") || !m["h_chain"].is_array() ||
        m["h_chain"].empty())
      fail("model.h_chain", "expected a non-empty array of trig polynomials");
    for (const auto& h : m["h_chain"])
      cfg.h_chain.push_back(parse_trigpoly(h, basis, "model.h_chain[]"));
  } else {
    fail("model.kind", "expected iontrap | generic-ti | generic-td");
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, int threads) {
  const EngineContext ctx = prepare(cfg);

  ScenarioResult result;
  result.scenario_id = cfg.scenario_id;
  result.engine_name = engine_name(cfg.engine);
  result.order = cfg.order;
  result.rows.resize(cfg.lambda_grid.size() * cfg.time_grid.size());

  auto worker = [&](std::size_t li) {
    const double lambda = cfg.lambda_grid[li];
    const double commres = commutation_residual(cfg, ctx, lambda);
    for (std::size_t ti = 0; ti < cfg.time_grid.size(); ++ti) {
      const double t = cfg.time_grid[ti];
      const auto start = std::chrono::steady_clock::now();
      const Operator u = engine_u(cfg, ctx, lambda, t);
      const auto stop = std::chrono::steady_clock::now();
      const Operator u_ref = oracle_u(cfg, ctx, lambda, t);

      ScenarioRow& row = result.rows[li * cfg.time_grid.size() + ti];
      row.lambda = lambda;
      row.t = t;
      row.error_vs_oracle = (u - u_ref).norm();
      row.unitarity_defect = unitarity_defect(u);
      row.commutation_residual = commres;
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(stop - start).count();
    }
  };

  if (threads <= 1) {
    for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) worker(li);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t li = w; li < cfg.lambda_grid.size();
             li += static_cast<std::size_t>(threads))
          worker(li);
      });
    for (auto& th : pool) th.join();
  }

  // slope of error vs lambda at the last grid time
  std::vector<double> lams, errs;
  for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
    const ScenarioRow& row =
        result.rows[li * cfg.time_grid.size() + cfg.time_grid.size() - 1];
    if (row.lambda > 0.0 && row.error_vs_oracle > 0.0) {
      lams.push_back(row.lambda);
      errs.push_back(row.error_vs_oracle);
    }
  }
  if (lams.size() >= 3) {
    const auto [slope, r2] = error_scaling_fit(lams, errs);
    result.slope = slope;
    result.r_squared = r2;
    if (cfg.engine == EngineKind::Rwa && slope <= 1.3)
      result.flags.push_back("first-order-deficient");
  }
  return result;
}

void write_scenario_csv(const ScenarioResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "scenario_id,engine,N,lambda,t,error_vs_oracle,unitarity_defect,"
         "commutation_residual,runtime_ms\n";
  for (const auto& row : result.rows) {
    out << result.scenario_id << ',' << result.engine_name << ','
        << result.order << ',' << format_double(row.lambda) << ','
        << format_double(row.t) << ',' << format_double(row.error_vs_oracle)
        << ',' << format_double(row.unitarity_defect) << ','
        << format_double(row.commutation_residual) << ','
        << format_double(row.runtime_ms) << '\n';
  }
}

void write_scenario_summary(const ScenarioResult& result,
                            const std::string& path) {
  json j;
  j["schema_version"] = 1;
  j["scenario_id"] = result.scenario_id;
  j["engine"] = result.engine_name;
  j["order"] = result.order;
  j["rows"] = result.rows.size();
  j["slope"] = result.slope;
  j["r_squared"] = result.r_squared;
  j["flags"] = result.flags;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void compare_report(const std::vector<ScenarioConfig>& configs,
                    const std::string& out_dir, int threads) {
  if (configs.size() < 2)
    throw std::invalid_argument("compare_report: need >= 2 scenarios");
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (configs[i].lambda_grid != configs[0].lambda_grid ||
        configs[i].time_grid != configs[0].time_grid)
      throw std::invalid_argument("compare_report: scenario grids differ");
    if (configs[i].model != configs[0].model)
      throw std::invalid_argument("compare_report: scenario models differ");
  }

  std::vector<ScenarioResult> results;
  for (const auto& cfg : configs) results.push_back(run_scenario(cfg, threads));

  const std::size_t nt = configs[0].time_grid.size();
  json j;
  j["schema_version"] = 1;
  std::ofstream md(out_dir + "/report.md");
  if (!md) throw std::runtime_error("cannot write " + out_dir + "/report.md");

  md << "# Engine comparison\n\n"
     << "Frobenius error against the integrator at t = "
     << format_double(configs[0].time_grid.back()) << "\n\n| lambda |";
  for (const auto& r : results)
    md << ' ' << r.scenario_id << " (" << r.engine_name << ", N=" << r.order
       << ") |";
  md << "\n|---|";
  for (std::size_t i = 0; i < results.size(); ++i) md << "---|";
  md << '\n';

  json table = json::array();
  for (std::size_t li = 0; li < configs[0].lambda_grid.size(); ++li) {
    md << "| " << format_double(configs[0].lambda_grid[li]) << " |";
    json row;
    row["lambda"] = configs[0].lambda_grid[li];
    for (const auto& r : results) {
      const double err = r.rows[li * nt + nt - 1].error_vs_oracle;
      md << ' ' << format_double(err) << " |";
      row[r.scenario_id] = err;
    }
    md << '\n';
    table.push_back(row);
  }
  j["table"] = table;
  json slopes;
  for (const auto& r : results) {
    json s;
    s["slope"] = r.slope;
    s["r_squared"] = r.r_squared;
    s["flags"] = r.flags;
    slopes[r.scenario_id] = s;
  }
  j["scenarios"] = slopes;
  std::ofstream js(out_dir + "/report.json");
  if (!js) throw std::runtime_error("cannot write " + out_dir + "/report.json");
  js << j.dump(2) << '\n';
}

}  // namespace pertprop
