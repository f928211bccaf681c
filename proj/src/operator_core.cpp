#include "kw/operator_core.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <unsupported/Eigen/MatrixFunctions>

namespace kw {

double frobenius(const Matrix& a) { return a.norm(); }

double frobenius_distance(const Matrix& a, const Matrix& b) {
  return (a - b).norm();
}

double hermiticity_residual(const Matrix& a) {
  return (a - a.adjoint()).norm();
}

double anti_hermiticity_residual(const Matrix& a) {
  return (a + a.adjoint()).norm();
}

double unitarity_residual(const Matrix& u) {
  const Matrix id = Matrix::Identity(u.rows(), u.cols());
  return std::max((u.adjoint() * u - id).norm(), (u * u.adjoint() - id).norm());
}

double idempotency_residual(const Matrix& p) { return (p * p - p).norm(); }

bool all_finite(const Matrix& a) { return a.allFinite(); }

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", r);
  return buf;
}

bool verbose_logging() {
  static const bool on = [] {
    const char* v = std::getenv("KETTLEWATCH_LOG");
    if (v == nullptr) return false;
    const std::string s(v);
    return s == "debug" || s == "1";
  }();
  return on;
}

void log_note(const std::string& message) {
  if (verbose_logging()) std::cerr << "NOTE: " << message << "\n";
}

Operator::Operator(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() < 1 || mat_.rows() != mat_.cols()) {
    throw ValidationError("operator must be a square matrix with dim >= 1, got " +
                          std::to_string(mat_.rows()) + "x" +
                          std::to_string(mat_.cols()));
  }
  if (!all_finite(mat_)) {
    throw ValidationError("operator entries must be finite");
  }
}

Operator Operator::identity(Index dim) {
  return Operator(Matrix::Identity(dim, dim));
}

Operator Operator::zero(Index dim) { return Operator(Matrix::Zero(dim, dim)); }

Index Projector::rank() const {
  return static_cast<Index>(std::llround(op_.mat().trace().real()));
}

Operator mat_exp(const Operator& a) {
  Matrix e = a.mat().exp();
  if (!all_finite(e)) {
    throw NumericalQualityError("mat_exp produced non-finite entries");
  }
  return Operator(std::move(e));
}

Projector validate_projector(const Operator& a, double tol) {
  const double herm = hermiticity_residual(a.mat());
  if (herm > tol) {
    throw ValidationError("projector validation: hermiticity residual " +
                          format_residual(herm) + " exceeds tol " +
                          format_residual(tol));
  }
  const double idem = idempotency_residual(a.mat());
  if (idem > tol) {
    throw ValidationError("projector validation: idempotence residual " +
                          format_residual(idem) + " exceeds tol " +
                          format_residual(tol));
  }
  return Projector(a);
}

UnitaryOp validate_unitary(const Operator& a, double tol) {
  const double res = unitarity_residual(a.mat());
  if (res > tol) {
    throw ValidationError("unitary validation: unitarity residual " +
                          format_residual(res) + " exceeds tol " +
                          format_residual(tol));
  }
  return UnitaryOp(a);
}

DensityOp validate_density(const Operator& a, double tol_psd,
                           double tol_trace) {
  const double herm = hermiticity_residual(a.mat());
  if (herm > kTolProj) {
    throw ValidationError("density validation: hermiticity residual " +
                          format_residual(herm) + " exceeds tol " +
                          format_residual(kTolProj));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat(),
                                           Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol_psd) {
    throw ValidationError("density validation: min eigenvalue " +
                          format_residual(min_eig) + " below -tol_psd " +
                          format_residual(tol_psd));
  }
  const double trace_err = std::abs(a.mat().trace().real() - 1.0) +
                           std::abs(a.mat().trace().imag());
  if (trace_err > tol_trace) {
    throw ValidationError("density validation: trace residual " +
                          format_residual(trace_err) + " exceeds tol_trace " +
                          format_residual(tol_trace));
  }
  return DensityOp(a);
}

Projector conjugate(const Projector& e, const UnitaryOp& u) {
  if (e.dim() != u.dim()) {
    throw ValidationError("conjugate: dimension mismatch, projector " +
                          std::to_string(e.dim()) + " vs unitary " +
                          std::to_string(u.dim()));
  }
  Matrix m = u.mat() * e.mat() * u.mat().adjoint();
  return validate_projector(Operator(std::move(m)), 8 * kTolProj);
}

Projector basis_projector(Index dim, Index rank) {
  if (rank < 0 || rank > dim) {
    throw ValidationError("basis_projector: rank " + std::to_string(rank) +
                          " outside [0, " + std::to_string(dim) + "]");
  }
  Matrix m = Matrix::Zero(dim, dim);
  for (Index k = 0; k < rank; ++k) m(k, k) = 1.0;
  return validate_projector(Operator(std::move(m)));
}

Projector pure_projector(const Vector& psi) {
  if (psi.size() < 1) throw ValidationError("pure_projector: empty state");
  const double norm_err = std::abs(psi.norm() - 1.0);
  if (norm_err > kTolTrace) {
    throw ValidationError("pure_projector: norm residual " +
                          format_residual(norm_err) + " exceeds tol_trace " +
                          format_residual(kTolTrace));
  }
  Matrix m = psi * psi.adjoint();
  return validate_projector(Operator(std::move(m)));
}

}  // namespace kw
