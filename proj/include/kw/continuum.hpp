#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "kw/dynamics.hpp"

namespace kw {

enum class OdeMethod {
  rk4_fixed,        // classical fixed-step Runge-Kutta 4
  ordered_product,  // A <- (1 + dt * rate(left endpoint)) A, per step
};

struct OdeSettings {
  double step = 0.0;  // <= 0 selects the default 1e-4 * (t - t1)
  OdeMethod method = OdeMethod::rk4_fixed;
};

struct SeriesSettings {
  int order = 3;         // 0..3 nested time-ordered integrals
  int quad_points = 32;  // Gauss-Legendre nodes per nesting level, >= 16
};

namespace ode {

/// Piecewise-smooth rate evaluation; the Side is the limit to take when the
/// time sits exactly on a smoothness joint.
using SidedRate = std::function<Matrix(double, Side)>;

/// Integrates dA/ds = rate(s) A from a0 over [t1, t] with a fixed step.
/// Interior `breaks` are honored as sub-interval boundaries so every step
/// stays inside one smooth span (left-limit rule at the right edge of a
/// span, right-limit at its left edge). Throws NumericalQualityError when
/// the requested step exceeds (t - t1)/10 or an intermediate goes
/// non-finite.
Matrix propagate(const SidedRate& rate, Matrix a0, double t1, double t,
                 const OdeSettings& settings,
                 const std::vector<double>& breaks = {});

/// Truncated time-ordered exponential applied to a0:
///   (1 + J_1(t) + ... + J_order(t)) a0,
/// J_k(u) = ∫_{t1}^{u} rate(s) J_{k-1}(s) ds, J_0 = 1, evaluated by nested
/// Gauss-Legendre quadrature with quad_points nodes per level.
Matrix time_ordered_series(const SidedRate& rate, const Matrix& a0, double t1,
                           double t, int order, int quad_points);

/// Gauss-Legendre nodes and weights on (-1, 1).
std::vector<std::pair<double, double>> gauss_legendre(int n);

}  // namespace ode

/// Continuum limit of the measurement chain: integrates
/// dA/ds = (dE_H/ds) A with A(t1) = E_H(t1).
Operator integrate_chain_ode(const Hamiltonian& h, const ProjectorPath& path,
                             double t1, double t,
                             const OdeSettings& settings = {});

/// Complement branch: dA/ds = -(dE_H/ds) A with A(t1) = 1 - E_H(t1).
Operator complement_chain_ode(const Hamiltonian& h, const ProjectorPath& path,
                              double t1, double t,
                              const OdeSettings& settings = {});

/// Truncated series form of the same propagator,
/// (1 + sum of nested integrals of dE_H/ds) E_H(t1).
Operator dyson_series(const Hamiltonian& h, const ProjectorPath& path,
                      double t1, double t,
                      const SeriesSettings& settings = {});

/// Closed form for a static rank-1 watched projector |psi0><psi0| under
/// continuous measurement:
///   A(t, t1) = e^{+i(H - <H>)t} |psi0><psi0| e^{-i(H - <H>)t1},
/// with the mean <H> = <psi0|H|psi0> computed once. Survival probability 1
/// when the chain starts at t1 = 0; for t1 > 0 the state drifts freely
/// before the first check and p = |<psi0|e^{-iH t1}|psi0>|^2.
Operator zeno_closed_form(const Hamiltonian& h, const Vector& psi0, double t1,
                          double t);

/// Time-ordered exponential W(t, t1) of the projected drag generator
/// E M(s) E, integrated with rk4_fixed. Unitary; residual above 1e-6 is a
/// numerical-quality error advising a smaller step.
UnitaryOp w_operator(const Hamiltonian& h, const UnitaryPath& path,
                     const Projector& e, double t1, double t,
                     const OdeSettings& settings = {});

/// Closed form for the dragged chain: A(t, t1) = V(t) W(t, t1) E V†(t1).
/// The sequence probability is Tr(rho0 E_H(t1)); it equals 1 when
/// E rho0 E = rho0 and the chain starts at t1 = 0.
Operator anti_zeno_propagator(const Hamiltonian& h, const UnitaryPath& path,
                              const Projector& e, double t1, double t,
                              const OdeSettings& settings = {});

}  // namespace kw
