#include "kw/random_matrices.hpp"

#include <cmath>

namespace kw {

Matrix random_gaussian_complex(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

Operator random_hermitian(Rng& rng, Index dim) {
  const Matrix a = random_gaussian_complex(rng, dim, dim);
  return Operator((a + a.adjoint()) / (2.0 * std::sqrt(double(dim))));
}

Operator random_anti_hermitian(Rng& rng, Index dim) {
  const Matrix a = random_gaussian_complex(rng, dim, dim);
  return Operator((a - a.adjoint()) / (2.0 * std::sqrt(double(dim))));
}

Projector random_projector(Rng& rng, Index dim, Index rank) {
  if (rank < 0 || rank > dim) {
    throw ValidationError("random_projector: rank outside [0, dim]");
  }
  if (rank == 0) return basis_projector(dim, 0);
  const Matrix a = random_gaussian_complex(rng, dim, dim);
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, rank);
  return validate_projector(Operator(q * q.adjoint()));
}

DensityOp random_density_in_range(Rng& rng, const Projector& e) {
  if (e.rank() < 1) {
    throw ValidationError("random_density_in_range: projector rank must be >= 1");
  }
  const Index d = e.dim();
  const Matrix b = random_gaussian_complex(rng, d, d);
  Matrix rho = e.mat() * (b * b.adjoint()) * e.mat();
  const double tr = rho.trace().real();
  rho /= tr;
  // Symmetrize away the last few ulps of product-order asymmetry.
  rho = 0.5 * (rho + rho.adjoint().eval());
  return validate_density(Operator(std::move(rho)));
}

Vector random_unit_vector(Rng& rng, Index dim) {
  Vector v = random_gaussian_complex(rng, dim, 1);
  v /= v.norm();
  return v;
}

}  // namespace kw
