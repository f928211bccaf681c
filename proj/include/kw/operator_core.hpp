#pragma once

#include <utility>

#include "kw/types.hpp"

namespace kw {

/// Dense complex square matrix with finite entries. The common carrier for
/// Hamiltonians, unitaries, projectors, densities and propagators.
class Operator {
 public:
  explicit Operator(Matrix m);

  static Operator identity(Index dim);
  static Operator zero(Index dim);

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }

 private:
  Matrix mat_;
};

/// Hermitian idempotent operator. Obtain through validate_projector,
/// basis_projector or pure_projector; the constructor is not public so a
/// Projector always satisfies its bounds.
class Projector {
 public:
  const Operator& op() const { return op_; }
  const Matrix& mat() const { return op_.mat(); }
  Index dim() const { return op_.dim(); }
  Index rank() const;  // rounded real trace

 private:
  friend Projector validate_projector(const Operator&, double);
  explicit Projector(Operator op) : op_(std::move(op)) {}
  Operator op_;
};

class UnitaryOp {
 public:
  const Operator& op() const { return op_; }
  const Matrix& mat() const { return op_.mat(); }
  Index dim() const { return op_.dim(); }

 private:
  friend UnitaryOp validate_unitary(const Operator&, double);
  explicit UnitaryOp(Operator op) : op_(std::move(op)) {}
  Operator op_;
};

class DensityOp {
 public:
  const Operator& op() const { return op_; }
  const Matrix& mat() const { return op_.mat(); }
  Index dim() const { return op_.dim(); }

 private:
  friend DensityOp validate_density(const Operator&, double, double);
  explicit DensityOp(Operator op) : op_(std::move(op)) {}
  Operator op_;
};

/// e^A by scaling and squaring. Relative accuracy well below 1e-12 for
/// operator norms up to ~50.
Operator mat_exp(const Operator& a);

/// Checks hermiticity and idempotence against tol; the error names the
/// violated bound and its residual.
Projector validate_projector(const Operator& a, double tol = kTolProj);

UnitaryOp validate_unitary(const Operator& a, double tol = kTolUnit);

/// Checks hermiticity, min eigenvalue >= -tol_psd and unit trace.
DensityOp validate_density(const Operator& a, double tol_psd = kTolPsd,
                           double tol_trace = kTolTrace);

/// U E U†. Preserves rank; the result is revalidated at a small multiple of
/// kTolProj.
Projector conjugate(const Projector& e, const UnitaryOp& u);

/// Projector onto the span of the first `rank` basis vectors.
Projector basis_projector(Index dim, Index rank);

/// |psi><psi| for a unit vector psi (norm checked within kTolTrace).
Projector pure_projector(const Vector& psi);

}  // namespace kw
