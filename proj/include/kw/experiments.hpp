#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kw/continuum.hpp"
#include "kw/measurement_chain.hpp"

namespace kw {

/// A fully validated experiment instance. Produced by the config parser;
/// tests construct it directly.
struct ExperimentConfig {
  Hamiltonian hamiltonian;
  Projector projector;
  UnitaryPath path;
  DensityOp rho0;
  std::optional<Vector> psi0;  // present when rho0 was given as a pure state
  double t1 = 0.0;
  double t = 1.0;
  std::vector<std::int64_t> n_list;
  double ode_step = 0.0;  // 0 selects the integrator default
  std::uint64_t seed = 0;
};

/// Least-squares fit of log(err) against log(n). Degenerate when the errors
/// are all at roundoff level (no slope to fit); then slope/intercept/residual
/// are zero and only the flag is meaningful.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms deviation of log(err) from the fit
  bool degenerate = false;
};

FitResult fit_loglog(const std::vector<double>& ns,
                     const std::vector<double>& errs);

struct SeriesRow {
  std::int64_t n;
  double p_discrete;
  double op_error;  // |A_n - A_closed|_F
  double p_closed_form;
};

struct ExperimentReport {
  std::string scenario;
  Index dim = 0;
  double t1 = 0.0;
  double t = 0.0;
  std::uint64_t seed = 0;

  std::vector<SeriesRow> rows;
  std::optional<double> closed_form_probability;
  std::optional<FitResult> convergence;
  std::optional<double> w_unitarity_residual;
  std::optional<double> ode_residual;  // max chain-equation defect, see below
  std::optional<double> survival_deficit_coefficient;  // C with 1-p(n) <= C/n
  std::optional<Matrix> final_state;                   // post-measurement
  std::optional<double> final_state_deviation;  // |final - rho0|_F

  // Non-empty when the watching path has generator joints; evaluation then
  // follows the left-limit convention and reports flag it.
  std::vector<double> path_breakpoints;

  // Wall-clock seconds per phase. Not part of the deterministic output.
  std::map<std::string, double> timings;
};

/// Static watched projector: requires the identity path, a rank-1 projector
/// and rho0 equal to it. Discrete chains per n against the closed form.
ExperimentReport run_zeno(const ExperimentConfig& cfg);

/// Dragged watched projector: requires E rho0 E = rho0 within kTolTrace.
/// Discrete chains per n against the dragged closed form, plus the final
/// post-measurement state at the schedule end.
ExperimentReport run_anti_zeno(const ExperimentConfig& cfg);

/// Discrete-to-continuum convergence: fits the log-log slope of
/// |A_n - A_closed|_F over n_list (>= 3 entries spanning >= 2 decades).
ExperimentReport convergence_study(const ExperimentConfig& cfg);

/// Certifies that the closed-form propagator satisfies the measurement
/// equation dA/ds = (dE_H/ds) A: max over interior sample times of
/// |central difference - rate * A|_F at delta = 1e-5 (t - t1). Requires a
/// smooth (joint-free) path.
ExperimentReport residual_certify(const ExperimentConfig& cfg);

}  // namespace kw
