#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kw {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Default validation tolerances. Double precision keeps residuals far below
// these bounds for the dimensions we care about (d up to ~64).
inline constexpr double kTolProj = 1e-10;
inline constexpr double kTolUnit = 1e-10;
inline constexpr double kTolPsd = 1e-10;
inline constexpr double kTolTrace = 1e-12;

/// An input failed a structural or physics validation bound.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation finished but missed its numerical quality target
/// (integration residual, probability range, non-finite intermediate).
class NumericalQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collapse onto an outcome whose probability is numerically zero.
class ZeroProbabilityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

double frobenius(const Matrix& a);
double frobenius_distance(const Matrix& a, const Matrix& b);
double hermiticity_residual(const Matrix& a);       // |A - A†|_F
double anti_hermiticity_residual(const Matrix& a);  // |A + A†|_F
double unitarity_residual(const Matrix& u);         // max(|U†U-1|_F, |UU†-1|_F)
double idempotency_residual(const Matrix& p);       // |P² - P|_F
bool all_finite(const Matrix& a);

/// Short scientific form used in diagnostics, e.g. "3.20e-01".
std::string format_residual(double r);

/// True when the KETTLEWATCH_LOG environment variable requests verbose
/// diagnostics ("debug" or "1").
bool verbose_logging();
void log_note(const std::string& message);

}  // namespace kw
