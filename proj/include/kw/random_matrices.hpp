#pragma once

#include <random>

#include "kw/operator_core.hpp"

namespace kw {

using Rng = std::mt19937_64;

/// iid standard complex Gaussian entries, filled column-major.
Matrix random_gaussian_complex(Rng& rng, Index rows, Index cols);

/// (A + A†) / (2 sqrt(d)) for Gaussian A; spectrum is O(1) for any d.
Operator random_hermitian(Rng& rng, Index dim);

/// (A - A†) / (2 sqrt(d)) for Gaussian A.
Operator random_anti_hermitian(Rng& rng, Index dim);

/// Rank-`rank` projector from the leading Q columns of a Gaussian QR.
Projector random_projector(Rng& rng, Index dim, Index rank);

/// Density operator supported on the range of e: normalize(E B B† E) for
/// Gaussian B, so E rho E = rho holds to roundoff.
DensityOp random_density_in_range(Rng& rng, const Projector& e);

Vector random_unit_vector(Rng& rng, Index dim);

}  // namespace kw
