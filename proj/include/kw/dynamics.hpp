#pragma once

#include <optional>
#include <vector>

#include "kw/operator_core.hpp"

namespace kw {

/// Which one-sided limit to take at a discontinuity of a piecewise generator.
enum class Side { left, right };

/// Hermitian generator of the Schrödinger evolution. Caches an
/// eigendecomposition so e^{±iHt} costs two matrix products per call and
/// carries no step-to-step drift.
class Hamiltonian {
 public:
  explicit Hamiltonian(Operator h, double tol = kTolProj);

  Index dim() const { return op_.dim(); }
  const Operator& op() const { return op_; }

  Matrix evolution(double t) const;         // e^{-iHt}
  Matrix heisenberg_frame(double t) const;  // e^{+iHt}

 private:
  Operator op_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenvectors_;
};

/// Unitary path t -> U(t) with U(0) = 1, generated by dU/dt = G(t) U(t)
/// for analytic anti-Hermitian G: either identically zero (identity path),
/// one constant generator, or piecewise-constant generators with joints at
/// given breakpoints. U(t) is evaluated from per-piece spectral caches, so
/// it is exactly unitary up to roundoff at any t.
class UnitaryPath {
 public:
  struct Piece {
    double t_end;        // right end of the piece's validity interval
    Operator generator;  // anti-Hermitian G on that interval
  };

  static UnitaryPath identity(Index dim);
  static UnitaryPath constant(Operator generator, double tol = kTolProj);
  static UnitaryPath piecewise(std::vector<Piece> pieces,
                               double tol = kTolProj);

  Index dim() const { return dim_; }
  bool is_identity() const { return identity_; }

  Matrix at(double t) const;  // U(t); continuous across joints

  /// G(t). At a joint the generator is discontinuous and the caller must pick
  /// Side::left or Side::right explicitly; omitting it there is an error.
  Matrix generator_at(double t, std::optional<Side> side = {}) const;

  /// Interior generator joints (empty for identity and constant paths).
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  struct Segment {
    double start;          // inclusive
    double end;            // +inf on the last segment
    Matrix gen;            // G on [start, end]
    Eigen::VectorXd spec;  // eigenvalues kappa of K = -iG (G = iK, K Hermitian)
    Matrix basis;          // eigenvectors of K
    Matrix u_start;        // U(start)
  };

  UnitaryPath() = default;
  const Segment& segment_for(double t) const;
  Matrix segment_exp(const Segment& s, double dt) const;  // e^{G dt}

  Index dim_ = 0;
  bool identity_ = false;
  std::vector<Segment> segments_;
  std::vector<double> breakpoints_;
};

/// Measured projector in the Schrödinger picture: E_s(t) = U(t) E U†(t).
class ProjectorPath {
 public:
  ProjectorPath(Projector base, UnitaryPath path);

  Index dim() const { return base_.dim(); }
  const Projector& base() const { return base_; }
  const UnitaryPath& path() const { return path_; }

  Projector at(double t) const;  // E_s(t)

  /// dE_s/dt = [G(t), E_s(t)]. Side rules as in UnitaryPath::generator_at.
  Matrix rate_at(double t, std::optional<Side> side = {}) const;

 private:
  Projector base_;
  UnitaryPath path_;
};

/// e^{-iHt} psi0 for a unit vector psi0.
Vector evolve_state(const Hamiltonian& h, double t, const Vector& psi0);

/// e^{-iHt} rho0 e^{+iHt}, revalidated as a density operator.
DensityOp evolve_density(const Hamiltonian& h, double t, const DensityOp& rho0);

/// Combined rotating-frame unitary V(t) = e^{+iHt} U(t).
Matrix frame_unitary(const Hamiltonian& h, const UnitaryPath& path, double t);

/// Heisenberg-picture measured projector
/// E_H(t) = e^{+iHt} E_s(t) e^{-iHt} = V(t) E V†(t).
Projector heisenberg_projector(const Hamiltonian& h, const ProjectorPath& path,
                               double t);

/// dE_H/dt = i[H, E_H(t)] + e^{+iHt} (dE_s/dt) e^{-iHt}. Hermitian by
/// construction; the commutator form keeps it exactly so up to roundoff.
Operator heisenberg_rate(const Hamiltonian& h, const ProjectorPath& path,
                         double t, std::optional<Side> side = {});

/// Frame-drag generator M(t) = (dU†/dt) U(t) - i U†(t) H U(t), equal to
/// (dV†/dt) V(t). Anti-Hermitian; constant -iH for the identity path.
Operator drag_generator(const Hamiltonian& h, const UnitaryPath& path,
                        double t, std::optional<Side> side = {});

}  // namespace kw
