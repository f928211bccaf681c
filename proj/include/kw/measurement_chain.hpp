#pragma once

#include <cstdint>
#include <vector>

#include "kw/dynamics.hpp"

namespace kw {

/// Uniform grid of measurement times t_i = t1 + (t - t1) i/(n-1) for
/// i = 0..n-1; the single time {t1} when n = 1.
class MeasurementSchedule {
 public:
  MeasurementSchedule(double t1, double t, std::int64_t n);

  double t1() const { return t1_; }
  double t() const { return t_; }
  std::int64_t n() const { return n_; }

  double time_at(std::int64_t i) const;
  std::vector<double> times() const;

 private:
  double t1_;
  double t_;
  std::int64_t n_;
};

/// Which evaluation route produced a chain operator.
enum class Route { discrete, ode, series, closed_form };

struct ChainResult {
  Operator a;
  double probability;
  std::int64_t n;  // number of grid points for discrete routes, 0 otherwise
  Route route;
};

ChainResult make_chain_result(Operator a, const DensityOp& rho0,
                              std::int64_t n, Route route);

struct CollapseResult {
  double probability;  // Tr(E rho E)
  DensityOp state;     // E rho E / Tr(E rho E)
};

/// Projective update of rho by E. Throws ZeroProbabilityError when the
/// branch probability is at or below eps_collapse.
CollapseResult collapse(const DensityOp& rho, const Projector& e,
                        double eps_collapse = 1e-14);

/// Time-ordered product E_H(t_n) ... E_H(t_1) over the schedule, built by
/// sequential left-multiplication (latest factor leftmost).
Operator chain_operator(const Hamiltonian& h, const ProjectorPath& path,
                        const MeasurementSchedule& sched);

/// Same product with every factor complemented: (1-E_H(t_n)) ... (1-E_H(t_1)).
Operator complement_chain(const Hamiltonian& h, const ProjectorPath& path,
                          const MeasurementSchedule& sched);

/// Propagator for the union outcome "E fired at least once":
/// K(t_final) = e^{-iH t_final} [1 - complement_chain]. Requires
/// t_final >= schedule end.
Operator union_propagator(const Hamiltonian& h, const ProjectorPath& path,
                          const MeasurementSchedule& sched, double t_final);

/// Re(Tr(A rho0 A†)), clamped to [0,1] when within 1e-10 of the bounds.
/// Larger range violations abort with NumericalQualityError carrying the
/// raw value.
double sequence_probability(const Operator& a, const DensityOp& rho0);

/// The same chain in dragged form: A = V(t_n) [X(t_{n-1}) ... X(t_1)] E V†(t_1)
/// with X(t_i) = E V†(t_{i+1}) V(t_i) E and V(t) = e^{+iHt} U(t). Algebraically
/// identical to chain_operator; a genuinely separate code path used for
/// cross-checks.
Operator dragged_chain_discrete(const Hamiltonian& h, const Projector& e,
                                const UnitaryPath& path,
                                const MeasurementSchedule& sched);

}  // namespace kw
