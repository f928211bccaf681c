#include "kw/dynamics.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace kw {

namespace {

// Breakpoint hit test; breakpoints coincide with step boundaries by
// construction, so an absolute-ish window of a few ulps is enough.
bool near_breakpoint(double t, double b) {
  return std::abs(t - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

Matrix phase_sandwich(const Matrix& basis, const Eigen::VectorXd& spec,
                      double factor) {
  // basis * diag(e^{i spec_k factor}) * basis†
  Vector ph(spec.size());
  for (Index k = 0; k < spec.size(); ++k) {
    ph(k) = std::exp(Complex(0.0, spec(k) * factor));
  }
  return basis * ph.asDiagonal() * basis.adjoint();
}

}  // namespace

Hamiltonian::Hamiltonian(Operator h, double tol) : op_(std::move(h)) {
  const double res = hermiticity_residual(op_.mat());
  if (res > tol) {
    throw ValidationError("hamiltonian: hermiticity residual " +
                          format_residual(res) + " exceeds tol " +
                          format_residual(tol));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(op_.mat());
  if (es.info() != Eigen::Success) {
    throw NumericalQualityError("hamiltonian: eigendecomposition failed");
  }
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

Matrix Hamiltonian::evolution(double t) const {
  return phase_sandwich(eigenvectors_, eigenvalues_, -t);
}

Matrix Hamiltonian::heisenberg_frame(double t) const {
  return phase_sandwich(eigenvectors_, eigenvalues_, t);
}

UnitaryPath UnitaryPath::identity(Index dim) {
  if (dim < 1) throw ValidationError("unitary path: dim must be >= 1");
  UnitaryPath p;
  p.dim_ = dim;
  p.identity_ = true;
  return p;
}

UnitaryPath UnitaryPath::constant(Operator generator, double tol) {
  std::vector<Piece> pieces;
  pieces.push_back(
      Piece{std::numeric_limits<double>::infinity(), std::move(generator)});
  return piecewise(std::move(pieces), tol);
}

UnitaryPath UnitaryPath::piecewise(std::vector<Piece> pieces, double tol) {
  if (pieces.empty()) {
    throw ValidationError("unitary path: need at least one generator piece");
  }
  const Index d = pieces.front().generator.dim();
  UnitaryPath p;
  p.dim_ = d;

  bool all_zero = true;
  double prev_end = 0.0;
  Matrix u_start = Matrix::Identity(d, d);
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const Piece& piece = pieces[j];
    if (piece.generator.dim() != d) {
      throw ValidationError("unitary path: piece " + std::to_string(j) +
                            " has dim " + std::to_string(piece.generator.dim()) +
                            ", expected " + std::to_string(d));
    }
    const bool last = (j + 1 == pieces.size());
    if (!last || std::isfinite(piece.t_end)) {
      if (!std::isfinite(piece.t_end) || piece.t_end <= prev_end) {
        throw ValidationError(
            "unitary path: piece boundaries must be finite and strictly "
            "increasing from 0, got t_end " +
            std::to_string(piece.t_end) + " at piece " + std::to_string(j));
      }
    }
    const double res = anti_hermiticity_residual(piece.generator.mat());
    if (res > tol) {
      throw ValidationError("unitary path: generator " + std::to_string(j) +
                            " anti-hermiticity residual " +
                            format_residual(res) + " exceeds tol " +
                            format_residual(tol));
    }
    if (frobenius(piece.generator.mat()) > 0.0) all_zero = false;

    Segment s;
    s.start = prev_end;
    s.end = last ? std::numeric_limits<double>::infinity() : piece.t_end;
    s.gen = piece.generator.mat();
    // G = iK with K Hermitian, so e^{G dt} = basis e^{i kappa dt} basis†.
    const Matrix k_mat = Complex(0.0, -1.0) * s.gen;
    Eigen::SelfAdjointEigenSolver<Matrix> es(k_mat);
    if (es.info() != Eigen::Success) {
      throw NumericalQualityError(
          "unitary path: generator eigendecomposition failed");
    }
    s.spec = es.eigenvalues();
    s.basis = es.eigenvectors();
    s.u_start = u_start;
    if (!last) {
      u_start = phase_sandwich(s.basis, s.spec, piece.t_end - s.start) *
                s.u_start;
      p.breakpoints_.push_back(piece.t_end);
    }
    p.segments_.push_back(std::move(s));
    prev_end = piece.t_end;
  }
  p.identity_ = all_zero;
  return p;
}

const UnitaryPath::Segment& UnitaryPath::segment_for(double t) const {
  for (const Segment& s : segments_) {
    if (t <= s.end) return s;
  }
  return segments_.back();
}

Matrix UnitaryPath::segment_exp(const Segment& s, double dt) const {
  return phase_sandwich(s.basis, s.spec, dt);
}

Matrix UnitaryPath::at(double t) const {
  if (identity_) return Matrix::Identity(dim_, dim_);
  const Segment& s = segment_for(t);
  return segment_exp(s, t - s.start) * s.u_start;
}

Matrix UnitaryPath::generator_at(double t, std::optional<Side> side) const {
  if (identity_) return Matrix::Zero(dim_, dim_);
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    if (near_breakpoint(t, breakpoints_[j])) {
      if (!side.has_value()) {
        throw ValidationError(
            "unitary path: generator is discontinuous at t = " +
            std::to_string(breakpoints_[j]) +
            "; request the left or right limit explicitly");
      }
      // Segment j ends at this breakpoint, segment j+1 starts at it.
      return *side == Side::left ? segments_[j].gen : segments_[j + 1].gen;
    }
  }
  return segment_for(t).gen;
}

ProjectorPath::ProjectorPath(Projector base, UnitaryPath path)
    : base_(std::move(base)), path_(std::move(path)) {
  if (base_.dim() != path_.dim()) {
    throw ValidationError("projector path: dimension mismatch, projector " +
                          std::to_string(base_.dim()) + " vs path " +
                          std::to_string(path_.dim()));
  }
}

Projector ProjectorPath::at(double t) const {
  if (path_.is_identity()) return base_;
  const Matrix u = path_.at(t);
  return validate_projector(Operator(u * base_.mat() * u.adjoint()),
                            8 * kTolProj);
}

Matrix ProjectorPath::rate_at(double t, std::optional<Side> side) const {
  if (path_.is_identity()) return Matrix::Zero(dim(), dim());
  const Matrix g = path_.generator_at(t, side);
  const Matrix u = path_.at(t);
  const Matrix es = u * base_.mat() * u.adjoint();
  return g * es - es * g;
}

Vector evolve_state(const Hamiltonian& h, double t, const Vector& psi0) {
  if (psi0.size() != h.dim()) {
    throw ValidationError("evolve_state: state dim " +
                          std::to_string(psi0.size()) +
                          " mismatches hamiltonian dim " +
                          std::to_string(h.dim()));
  }
  const double norm_err = std::abs(psi0.norm() - 1.0);
  if (norm_err > kTolTrace) {
    throw ValidationError("evolve_state: state norm residual " +
                          format_residual(norm_err) + " exceeds tol_trace " +
                          format_residual(kTolTrace));
  }
  return h.evolution(t) * psi0;
}

DensityOp evolve_density(const Hamiltonian& h, double t,
                         const DensityOp& rho0) {
  if (rho0.dim() != h.dim()) {
    throw ValidationError("evolve_density: dimension mismatch");
  }
  const Matrix u = h.evolution(t);
  return validate_density(Operator(u * rho0.mat() * u.adjoint()));
}

Matrix frame_unitary(const Hamiltonian& h, const UnitaryPath& path, double t) {
  if (h.dim() != path.dim()) {
    throw ValidationError("frame_unitary: dimension mismatch");
  }
  Matrix f = h.heisenberg_frame(t);
  if (path.is_identity()) return f;
  return f * path.at(t);
}

Projector heisenberg_projector(const Hamiltonian& h, const ProjectorPath& path,
                               double t) {
  const Matrix v = frame_unitary(h, path.path(), t);
  return validate_projector(Operator(v * path.base().mat() * v.adjoint()),
                            10 * kTolProj);
}

Operator heisenberg_rate(const Hamiltonian& h, const ProjectorPath& path,
                         double t, std::optional<Side> side) {
  if (h.dim() != path.dim()) {
    throw ValidationError("heisenberg_rate: dimension mismatch");
  }
  // dE_H/dt = [iH + F G F†, E_H] with F = e^{+iHt}; a commutator of an
  // anti-Hermitian with a Hermitian operator, hence exactly Hermitian.
  const Matrix f = h.heisenberg_frame(t);
  Matrix x = Complex(0.0, 1.0) * h.op().mat();
  Matrix eh;
  if (path.path().is_identity()) {
    eh = f * path.base().mat() * f.adjoint();
  } else {
    const Matrix g = path.path().generator_at(t, side);
    const Matrix v = f * path.path().at(t);
    eh = v * path.base().mat() * v.adjoint();
    x += f * g * f.adjoint();
  }
  return Operator(x * eh - eh * x);
}

Operator drag_generator(const Hamiltonian& h, const UnitaryPath& path,
                        double t, std::optional<Side> side) {
  if (h.dim() != path.dim()) {
    throw ValidationError("drag_generator: dimension mismatch");
  }
  // M(t) = -U†(t) (G(t) + iH) U(t); reduces to -iH on the identity path.
  if (path.is_identity()) {
    return Operator(Complex(0.0, -1.0) * h.op().mat());
  }
  const Matrix g = path.generator_at(t, side);
  const Matrix u = path.at(t);
  const Matrix c = g + Complex(0.0, 1.0) * h.op().mat();
  return Operator(-(u.adjoint() * c * u));
}

}  // namespace kw
