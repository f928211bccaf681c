#include "kw/measurement_chain.hpp"

#include <cmath>
#include <utility>

namespace kw {

MeasurementSchedule::MeasurementSchedule(double t1, double t, std::int64_t n)
    : t1_(t1), t_(t), n_(n) {
  if (!std::isfinite(t1) || !std::isfinite(t)) {
    throw ValidationError("schedule: times must be finite");
  }
  if (n < 1) {
    throw ValidationError("schedule: n must be >= 1, got " + std::to_string(n));
  }
  if (n >= 2 && !(t > t1)) {
    throw ValidationError("schedule: t must exceed t1 for n >= 2");
  }
  if (t < t1) {
    throw ValidationError("schedule: t must be >= t1");
  }
}

double MeasurementSchedule::time_at(std::int64_t i) const {
  if (i < 0 || i >= n_) {
    throw ValidationError("schedule: index " + std::to_string(i) +
                          " outside [0, " + std::to_string(n_) + ")");
  }
  if (n_ == 1 || i == 0) return t1_;
  if (i == n_ - 1) return t_;  // exact endpoint, no rounding
  return t1_ + (t_ - t1_) * (static_cast<double>(i) /
                             static_cast<double>(n_ - 1));
}

std::vector<double> MeasurementSchedule::times() const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (std::int64_t i = 0; i < n_; ++i) {
    out[static_cast<std::size_t>(i)] = time_at(i);
  }
  return out;
}

ChainResult make_chain_result(Operator a, const DensityOp& rho0,
                              std::int64_t n, Route route) {
  const double p = sequence_probability(a, rho0);
  return ChainResult{std::move(a), p, n, route};
}

CollapseResult collapse(const DensityOp& rho, const Projector& e,
                        double eps_collapse) {
  if (rho.dim() != e.dim()) {
    throw ValidationError("collapse: dimension mismatch");
  }
  Matrix m = e.mat() * rho.mat() * e.mat();
  const double p = m.trace().real();
  if (p <= eps_collapse) {
    throw ZeroProbabilityError("zero-probability branch: Tr(E rho E) = " +
                               format_residual(p));
  }
  m /= p;
  return CollapseResult{p, validate_density(Operator(std::move(m)))};
}

Operator chain_operator(const Hamiltonian& h, const ProjectorPath& path,
                        const MeasurementSchedule& sched) {
  // Latest measurement leftmost: A <- E_H(t_i) A, i ascending.
  Matrix a = heisenberg_projector(h, path, sched.time_at(0)).mat();
  for (std::int64_t i = 1; i < sched.n(); ++i) {
    a = heisenberg_projector(h, path, sched.time_at(i)).mat() * a;
  }
  return Operator(std::move(a));
}

Operator complement_chain(const Hamiltonian& h, const ProjectorPath& path,
                          const MeasurementSchedule& sched) {
  const Matrix id = Matrix::Identity(path.dim(), path.dim());
  Matrix a = id - heisenberg_projector(h, path, sched.time_at(0)).mat();
  for (std::int64_t i = 1; i < sched.n(); ++i) {
    a = (id - heisenberg_projector(h, path, sched.time_at(i)).mat()) * a;
  }
  return Operator(std::move(a));
}

Operator union_propagator(const Hamiltonian& h, const ProjectorPath& path,
                          const MeasurementSchedule& sched, double t_final) {
  if (!(t_final >= sched.t())) {
    throw ValidationError("union_propagator: t_final " +
                          std::to_string(t_final) +
                          " must be >= the schedule end " +
                          std::to_string(sched.t()));
  }
  const Matrix id = Matrix::Identity(path.dim(), path.dim());
  const Matrix abar = complement_chain(h, path, sched).mat();
  return Operator(h.evolution(t_final) * (id - abar));
}

double sequence_probability(const Operator& a, const DensityOp& rho0) {
  if (a.dim() != rho0.dim()) {
    throw ValidationError("sequence_probability: dimension mismatch");
  }
  const double p = (a.mat() * rho0.mat() * a.mat().adjoint()).trace().real();
  constexpr double clamp_window = 1e-10;
  if (p < 0.0) {
    if (p < -clamp_window) {
      throw NumericalQualityError("sequence probability " +
                                  format_residual(p) +
                                  " below 0 beyond the clamp window");
    }
    log_note("clamped probability " + format_residual(p) + " to 0");
    return 0.0;
  }
  if (p > 1.0) {
    if (p > 1.0 + clamp_window) {
      throw NumericalQualityError("sequence probability 1 + " +
                                  format_residual(p - 1.0) +
                                  " above 1 beyond the clamp window");
    }
    log_note("clamped probability 1 + " + format_residual(p - 1.0) + " to 1");
    return 1.0;
  }
  return p;
}

Operator dragged_chain_discrete(const Hamiltonian& h, const Projector& e,
                                const UnitaryPath& path,
                                const MeasurementSchedule& sched) {
  if (e.dim() != path.dim() || e.dim() != h.dim()) {
    throw ValidationError("dragged_chain_discrete: dimension mismatch");
  }
  // A = V(t_n) [X(t_{n-1}) ... X(t_1)] E V†(t_1),
  // X(t_i) = E V†(t_{i+1}) V(t_i) E; idempotence stitches the X factors
  // into the plain projector chain.
  const Matrix v_first = frame_unitary(h, path, sched.time_at(0));
  Matrix y = e.mat();
  Matrix v_prev = v_first;
  for (std::int64_t i = 1; i < sched.n(); ++i) {
    const Matrix v_i = frame_unitary(h, path, sched.time_at(i));
    y = (e.mat() * (v_i.adjoint() * v_prev) * e.mat()) * y;
    v_prev = v_i;
  }
  return Operator(v_prev * y * v_first.adjoint());
}

}  // namespace kw
