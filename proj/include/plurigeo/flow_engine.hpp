#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plurigeo/torus_grid.hpp"

namespace plurigeo {

enum class Variant { gflow, normalized, omega_form };

Variant parse_variant(const std::string& s);
std::string to_string(Variant v);

struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double vol = 0.0;
  double degree = 0.0;
  double E_w = 0.0;
  double maxT2 = 0.0;
  double maxOmega = 0.0;
  double pluriclosed_resid = 0.0;
  double kahler_resid = 0.0;  ///< max |T|
  double dvol_dt_measured = 0.0;
  double dvol_dt_predicted = 0.0;
  double slice_integral = 0.0;
  double jet_symmetry_deviation = 0.0;
};

struct FlowState {
  double t = 0.0;
  long step = 0;
  MetricField field;
  DiagnosticsRecord last_diag;
  double hermitian_deviation = 0.0;  ///< max over stages, before symmetrization
};

/// safety · h_min² · min eigenvalue / max eigenvalue.
double cfl_dt(const MetricField& field, double safety = 0.05);

/// Nodewise ∂_t g for the variant.
std::vector<Mat2> flow_rhs(const MetricField& field, const JetField& jf, Variant variant);

/// One classical RK4 step. For omega_form the stage-one field must have
/// max pluriclosed residual ≤ pluriclosed_tol.
FlowState step(const FlowState& state, double dt, Variant variant,
               double pluriclosed_tol = 1e-6);

DiagnosticsRecord diagnostics(const FlowState& state, Variant variant = Variant::gflow);

enum class RunStatus { completed, blowup_suspected, degenerate };
std::string to_string(RunStatus s);

struct RunConfig {
  MetricField initial;
  Variant variant = Variant::gflow;
  double t_end = 0.5;
  int cadence = 10;
  double dt_safety = 0.05;
  std::optional<double> fixed_dt;
  double blowup_factor = 1e3;
  double pluriclosed_tol = 1e-6;
};

struct RunResult {
  std::vector<DiagnosticsRecord> series;
  RunStatus status = RunStatus::completed;
  std::string message;
  FlowState final_state;
  double dt = 0.0;
  double max_hermitian_deviation = 0.0;
};

RunResult run(const RunConfig& cfg);

struct TnormCheck {
  std::vector<double> measured;
  std::vector<double> assembled;
  std::vector<double> residual;        ///< measured − assembled
  std::vector<double> grad10_term;     ///< 2‖∇^{(1,0)}T‖²
  std::vector<double> grad01_term;     ///< 2‖∇^{(0,1)}T‖²
  std::vector<double> laplacian_term;  ///< Δ|T|²
  double max_abs = 0.0;
  double l2 = 0.0;
};

/// Centered difference of |T|² over two gflow steps against the assembled
/// right-hand side at the middle state.
TnormCheck tnorm_evolution_check(const FlowState& state, double dt);

struct TnormStudy {
  int n_coarse = 16;
  int n_fine = 32;
  double raw_coarse = 0.0;
  double raw_fine = 0.0;
  double raw_limit = 0.0;           ///< Richardson estimate
  double term_fine = 0.0;           ///< 2‖∇^{(1,0)}T‖² at the fine grid
  double attribution_ratio = 0.0;   ///< raw_fine / term_fine
  double corrected_coarse = 0.0;
  double corrected_fine = 0.0;
  double corrected_order = 0.0;
  double seconds = 0.0;
};

TnormStudy tnorm_refinement_study(double epsilon, int n_coarse = 16, int n_fine = 32);

}  // namespace plurigeo
