#pragma once

#include <string>
#include <vector>

#include "pertprop/iontrap.hpp"
#include "pertprop/operators.hpp"
#include "pertprop/trigpoly.hpp"

namespace pertprop {

enum class EngineKind { Ti, TdMean, TdGauged, Magnus, FloquetMagnus, Rwa, Dyson };

enum class ModelKind { IonTrap, GenericTi, GenericTd };

/// One batch run: a model, an engine, and the (lambda, t) grid to sweep.
/// Parsed from a JSON config; see docs in tools/ for the schema.
struct ScenarioConfig {
  std::string scenario_id;
  EngineKind engine = EngineKind::TdMean;
  int order = 1;
  std::vector<double> lambda_grid;
  std::vector<double> time_grid;
  double oracle_rel_tol = 1e-11;

  ModelKind model = ModelKind::IonTrap;
  IonTrapParams iontrap;
  HamiltonianForm iontrap_form = HamiltonianForm::GeneralizedGF;
  Operator h0;                    // generic-ti
  std::vector<Operator> h_list;   // generic-ti
  std::vector<TrigPoly> h_chain;  // generic-td
};

/// Throws std::invalid_argument with a field-qualified message on any
/// schema violation.
ScenarioConfig parse_scenario_text(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

struct ScenarioRow {
  double lambda = 0.0;
  double t = 0.0;
  double error_vs_oracle = 0.0;
  double unitarity_defect = 0.0;
  double commutation_residual = 0.0;
  double runtime_ms = 0.0;
};

struct ScenarioResult {
  std::string scenario_id;
  std::string engine_name;
  int order = 0;
  std::vector<ScenarioRow> rows;  // lambda-major, time-minor
  double slope = 0.0;             // error vs lambda at the last grid time
  double r_squared = 0.0;
  std::vector<std::string> flags;
};

const char* engine_name(EngineKind kind);

/// Evaluates every (lambda, t) grid point against the oracle. Rows are
/// ordered deterministically regardless of the worker count.
ScenarioResult run_scenario(const ScenarioConfig& config, int threads = 1);

/// Fixed column order, 17 significant digits; identical configs give
/// identical files except for the runtime_ms column.
void write_scenario_csv(const ScenarioResult& result, const std::string& path);
void write_scenario_summary(const ScenarioResult& result,
                            const std::string& path);

/// Runs >= 2 scenarios sharing a model and grids and writes side-by-side
/// error tables (markdown + JSON) into out_dir. Throws on grid mismatch.
void compare_report(const std::vector<ScenarioConfig>& configs,
                    const std::string& out_dir, int threads = 1);

}  // namespace pertprop
