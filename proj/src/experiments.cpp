#include "kw/experiments.hpp"

#include <chrono>
#include <cmath>
#include <functional>

namespace kw {

namespace {

class PhaseTimer {
 public:
  PhaseTimer() : start_(clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

OdeSettings ode_settings_for(const ExperimentConfig& cfg) {
  OdeSettings s;
  s.step = cfg.ode_step;
  return s;
}

Vector dominant_eigenvector(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Index last = rho.rows() - 1;
  if (es.eigenvalues()(last) < 1.0 - 1e-10) {
    throw ValidationError("state extraction: rho0 is not pure, top weight " +
                          format_residual(es.eigenvalues()(last)));
  }
  return es.eigenvectors().col(last);
}

bool near_any(double s, const std::vector<double>& points, double window) {
  for (double b : points) {
    if (std::abs(s - b) <= window) return true;
  }
  return false;
}

/// Max over interior sample times of |dA/ds - rate(s) A(s)|_F with the
/// derivative taken by central differences at the given delta. Samples
/// falling inside a window around a generator joint are skipped: the chain
/// equation holds one-sidedly there and the difference quotient would
/// straddle the kink.
double chain_equation_defect(const std::function<Matrix(double)>& a_of,
                             const std::function<Matrix(double)>& rate_of,
                             double t1, double t, int samples, double delta,
                             const std::vector<double>& skip_points) {
  double worst = 0.0;
  for (int j = 1; j <= samples; ++j) {
    const double s =
        t1 + (t - t1) * static_cast<double>(j) / static_cast<double>(samples + 1);
    if (near_any(s, skip_points, 10.0 * delta)) continue;
    const Matrix da = (a_of(s + delta) - a_of(s - delta)) / (2.0 * delta);
    const double res = frobenius(da - rate_of(s) * a_of(s));
    worst = std::max(worst, res);
  }
  return worst;
}

ExperimentReport base_report(const ExperimentConfig& cfg,
                             const std::string& scenario) {
  ExperimentReport r;
  r.scenario = scenario;
  r.dim = cfg.hamiltonian.dim();
  r.t1 = cfg.t1;
  r.t = cfg.t;
  r.seed = cfg.seed;
  r.path_breakpoints = cfg.path.breakpoints();
  return r;
}

std::vector<SeriesRow> discrete_rows(const ExperimentConfig& cfg,
                                     const ProjectorPath& ppath,
                                     const Operator& a_closed,
                                     double p_closed) {
  std::vector<SeriesRow> rows;
  rows.reserve(cfg.n_list.size());
  for (std::int64_t n : cfg.n_list) {
    const MeasurementSchedule sched(cfg.t1, cfg.t, n);
    const Operator a_n = chain_operator(cfg.hamiltonian, ppath, sched);
    SeriesRow row;
    row.n = n;
    row.p_discrete = sequence_probability(a_n, cfg.rho0);
    row.op_error = frobenius_distance(a_n.mat(), a_closed.mat());
    row.p_closed_form = p_closed;
    rows.push_back(row);
  }
  return rows;
}

std::optional<FitResult> maybe_fit(const std::vector<SeriesRow>& rows) {
  if (rows.size() < 3) return std::nullopt;
  std::vector<double> ns, errs;
  for (const SeriesRow& r : rows) {
    ns.push_back(static_cast<double>(r.n));
    errs.push_back(r.op_error);
  }
  return fit_loglog(ns, errs);
}

}  // namespace

FitResult fit_loglog(const std::vector<double>& ns,
                     const std::vector<double>& errs) {
  if (ns.size() != errs.size() || ns.size() < 2) {
    throw ValidationError("fit_loglog: need matching lists with >= 2 points");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (errs[i] > 1e-13) {
      xs.push_back(std::log(ns[i]));
      ys.push_back(std::log(errs[i]));
    }
  }
  FitResult fit;
  if (xs.size() < 2) {
    fit.degenerate = true;
    return fit;
  }
  const auto m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dev = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += dev * dev;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

ExperimentReport run_zeno(const ExperimentConfig& cfg) {
  const PhaseTimer total;
  ExperimentReport r = base_report(cfg, "zeno");

  if (!cfg.path.is_identity()) {
    throw ValidationError("zeno scenario: the watching path must be the identity");
  }
  if (cfg.projector.rank() != 1) {
    throw ValidationError("zeno scenario: the watched projector must have rank 1, got " +
                          std::to_string(cfg.projector.rank()));
  }
  const double support_res =
      frobenius_distance(cfg.projector.mat(), cfg.rho0.mat());
  if (support_res > 1e-10) {
    throw ValidationError(
        "zeno scenario: rho0 must equal the watched projector, residual " +
        format_residual(support_res));
  }
  const Vector psi0 =
      cfg.psi0.has_value() ? *cfg.psi0 : dominant_eigenvector(cfg.rho0.mat());

  PhaseTimer phase;
  const Operator a_closed =
      zeno_closed_form(cfg.hamiltonian, psi0, cfg.t1, cfg.t);
  const double p_closed = sequence_probability(a_closed, cfg.rho0);
  r.timings["closed_form"] = phase.seconds();

  phase = PhaseTimer();
  const ProjectorPath ppath(cfg.projector, cfg.path);
  r.rows = discrete_rows(cfg, ppath, a_closed, p_closed);
  r.timings["chains"] = phase.seconds();

  r.closed_form_probability = p_closed;
  r.convergence = maybe_fit(r.rows);

  double deficit = 0.0;
  for (const SeriesRow& row : r.rows) {
    deficit = std::max(deficit,
                       static_cast<double>(row.n) * (1.0 - row.p_discrete));
  }
  r.survival_deficit_coefficient = deficit;

  phase = PhaseTimer();
  const double delta = 1e-5 * (cfg.t - cfg.t1);
  r.ode_residual = chain_equation_defect(
      [&](double s) {
        return zeno_closed_form(cfg.hamiltonian, psi0, cfg.t1, s).mat();
      },
      [&](double s) { return heisenberg_rate(cfg.hamiltonian, ppath, s).mat(); },
      cfg.t1, cfg.t, 9, delta, {});
  r.timings["residual"] = phase.seconds();

  r.timings["total"] = total.seconds();
  return r;
}

ExperimentReport run_anti_zeno(const ExperimentConfig& cfg) {
  const PhaseTimer total;
  ExperimentReport r = base_report(cfg, "anti-zeno");

  const Matrix e = cfg.projector.mat();
  const double support_res =
      frobenius_distance(e * cfg.rho0.mat() * e, cfg.rho0.mat());
  if (support_res > kTolTrace) {
    throw ValidationError(
        "anti-zeno scenario: rho0 must be supported on the watched projector "
        "(E rho0 E = rho0), residual " +
        format_residual(support_res));
  }

  const OdeSettings ode = ode_settings_for(cfg);

  PhaseTimer phase;
  const UnitaryOp w =
      w_operator(cfg.hamiltonian, cfg.path, cfg.projector, cfg.t1, cfg.t, ode);
  r.w_unitarity_residual = unitarity_residual(w.mat());
  const Matrix v_t = frame_unitary(cfg.hamiltonian, cfg.path, cfg.t);
  const Matrix v_t1 = frame_unitary(cfg.hamiltonian, cfg.path, cfg.t1);
  const Operator a_closed(v_t * w.mat() * e * v_t1.adjoint());
  const double p_closed = sequence_probability(a_closed, cfg.rho0);
  r.timings["closed_form"] = phase.seconds();

  phase = PhaseTimer();
  const ProjectorPath ppath(cfg.projector, cfg.path);
  r.rows = discrete_rows(cfg, ppath, a_closed, p_closed);
  r.timings["chains"] = phase.seconds();

  r.closed_form_probability = p_closed;
  r.convergence = maybe_fit(r.rows);

  // Post-measurement state at the schedule end, from the closed-form chain.
  const Matrix k = cfg.hamiltonian.evolution(cfg.t) * a_closed.mat();
  Matrix sigma = k * cfg.rho0.mat() * k.adjoint();
  const double pf = sigma.trace().real();
  if (pf <= 1e-14) {
    throw NumericalQualityError(
        "anti-zeno scenario: final-state normalization vanished");
  }
  sigma /= pf;
  sigma = 0.5 * (sigma + sigma.adjoint().eval());
  const DensityOp final_state = validate_density(Operator(sigma));
  r.final_state = final_state.mat();
  r.final_state_deviation =
      frobenius_distance(final_state.mat(), cfg.rho0.mat());

  phase = PhaseTimer();
  const double delta = 1e-5 * (cfg.t - cfg.t1);
  r.ode_residual = chain_equation_defect(
      [&](double s) {
        return anti_zeno_propagator(cfg.hamiltonian, cfg.path, cfg.projector,
                                    cfg.t1, s, ode)
            .mat();
      },
      [&](double s) { return heisenberg_rate(cfg.hamiltonian, ppath, s).mat(); },
      cfg.t1, cfg.t, 5, delta, cfg.path.breakpoints());
  r.timings["residual"] = phase.seconds();

  r.timings["total"] = total.seconds();
  return r;
}

ExperimentReport convergence_study(const ExperimentConfig& cfg) {
  const PhaseTimer total;
  ExperimentReport r = base_report(cfg, "converge");

  if (cfg.n_list.size() < 3) {
    throw ValidationError("convergence study: need at least 3 chain lengths");
  }
  std::int64_t n_min = cfg.n_list.front(), n_max = cfg.n_list.front();
  for (std::int64_t n : cfg.n_list) {
    n_min = std::min(n_min, n);
    n_max = std::max(n_max, n);
  }
  if (n_max < 100 * n_min) {
    throw ValidationError(
        "convergence study: n_list must span at least two decades, got [" +
        std::to_string(n_min) + ", " + std::to_string(n_max) + "]");
  }

  const OdeSettings ode = ode_settings_for(cfg);

  PhaseTimer phase;
  const Operator a_closed = anti_zeno_propagator(
      cfg.hamiltonian, cfg.path, cfg.projector, cfg.t1, cfg.t, ode);
  const double p_closed = sequence_probability(a_closed, cfg.rho0);
  const UnitaryOp w =
      w_operator(cfg.hamiltonian, cfg.path, cfg.projector, cfg.t1, cfg.t, ode);
  r.w_unitarity_residual = unitarity_residual(w.mat());
  r.timings["closed_form"] = phase.seconds();

  phase = PhaseTimer();
  const ProjectorPath ppath(cfg.projector, cfg.path);
  r.rows = discrete_rows(cfg, ppath, a_closed, p_closed);
  r.timings["chains"] = phase.seconds();

  r.closed_form_probability = p_closed;
  std::vector<double> ns, errs;
  for (const SeriesRow& row : r.rows) {
    ns.push_back(static_cast<double>(row.n));
    errs.push_back(row.op_error);
  }
  r.convergence = fit_loglog(ns, errs);

  r.timings["total"] = total.seconds();
  return r;
}

ExperimentReport residual_certify(const ExperimentConfig& cfg) {
  const PhaseTimer total;
  ExperimentReport r = base_report(cfg, "residual");

  if (!cfg.path.breakpoints().empty()) {
    throw ValidationError(
        "residual certification: the watching path must be smooth "
        "(no generator joints)");
  }

  const OdeSettings ode = ode_settings_for(cfg);
  const ProjectorPath ppath(cfg.projector, cfg.path);

  PhaseTimer phase;
  const Operator a_closed = anti_zeno_propagator(
      cfg.hamiltonian, cfg.path, cfg.projector, cfg.t1, cfg.t, ode);
  r.closed_form_probability = sequence_probability(a_closed, cfg.rho0);
  const UnitaryOp w =
      w_operator(cfg.hamiltonian, cfg.path, cfg.projector, cfg.t1, cfg.t, ode);
  r.w_unitarity_residual = unitarity_residual(w.mat());
  r.timings["closed_form"] = phase.seconds();

  phase = PhaseTimer();
  const double delta = 1e-5 * (cfg.t - cfg.t1);
  r.ode_residual = chain_equation_defect(
      [&](double s) {
        return anti_zeno_propagator(cfg.hamiltonian, cfg.path, cfg.projector,
                                    cfg.t1, s, ode)
            .mat();
      },
      [&](double s) { return heisenberg_rate(cfg.hamiltonian, ppath, s).mat(); },
      cfg.t1, cfg.t, 9, delta, {});
  r.timings["residual"] = phase.seconds();

  r.timings["total"] = total.seconds();
  return r;
}

}  // namespace kw
