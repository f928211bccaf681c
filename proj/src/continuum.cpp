#include "kw/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace kw {

namespace ode {

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: need n >= 1");
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;  // P_k(x)
      double p1 = 0.0;  // P_{k-1}(x)
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    out[static_cast<std::size_t>(i)] = {-x, w};
    out[static_cast<std::size_t>(n - 1 - i)] = {x, w};
  }
  return out;
}

namespace {

std::vector<std::pair<double, double>> smooth_spans(
    double t1, double t, const std::vector<double>& breaks) {
  std::vector<double> cuts{t1};
  const double tiny = 1e-12 * std::max(1.0, std::abs(t) + std::abs(t1));
  for (double b : breaks) {
    if (b > t1 + tiny && b < t - tiny) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(t);
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    spans.emplace_back(cuts[i], cuts[i + 1]);
  }
  return spans;
}

}  // namespace

Matrix propagate(const SidedRate& rate, Matrix a0, double t1, double t,
                 const OdeSettings& settings,
                 const std::vector<double>& breaks) {
  if (!(t > t1)) {
    throw ValidationError("ode: interval end must exceed its start");
  }
  const double span_len = t - t1;
  const double h_req = settings.step > 0.0 ? settings.step : 1e-4 * span_len;
  if (!(h_req > 0.0) || !std::isfinite(h_req)) {
    throw ValidationError("ode: step must be positive and finite");
  }
  if (h_req > span_len / 10.0 * (1.0 + 1e-12)) {
    throw NumericalQualityError(
        "ode step " + format_residual(h_req) + " too large: must divide (t - t1) = " +
        format_residual(span_len) + " into at least 10 intervals");
  }

  Matrix a = std::move(a0);
  for (const auto& [sa, sb] : smooth_spans(t1, t, breaks)) {
    const double len = sb - sa;
    const auto m = static_cast<std::int64_t>(
        std::ceil(len / h_req - 1e-12));
    const std::int64_t steps = std::max<std::int64_t>(1, m);
    const double h = len / static_cast<double>(steps);

    Matrix cached_right;  // rate at the right edge of the previous step
    bool have_cache = false;
    for (std::int64_t k = 0; k < steps; ++k) {
      const double s0 = sa + h * static_cast<double>(k);
      const bool last = (k + 1 == steps);
      const double s1 = last ? sb : s0 + h;
      if (settings.method == OdeMethod::ordered_product) {
        // Rates taken at the left endpoint of each step (the t_- rule).
        const Matrix r = have_cache ? cached_right : rate(s0, Side::right);
        a = (Matrix::Identity(a.rows(), a.cols()) + h * r) * a;
        cached_right = rate(s1, last ? Side::left : Side::right);
        have_cache = true;
      } else {
        const Matrix r1 = have_cache ? cached_right : rate(s0, Side::right);
        const Matrix r2 = rate(s0 + 0.5 * h, Side::right);
        const Matrix r4 = rate(s1, last ? Side::left : Side::right);
        const Matrix k1 = r1 * a;
        const Matrix k2 = r2 * (a + (0.5 * h) * k1);
        const Matrix k3 = r2 * (a + (0.5 * h) * k2);
        const Matrix k4 = r4 * (a + h * k3);
        a += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        cached_right = r4;
        have_cache = !last;  // the next span starts on the other limit
      }
    }
    if (!all_finite(a)) {
      throw NumericalQualityError(
          "ode: non-finite intermediate near t = " + std::to_string(sb));
    }
  }
  return a;
}

Matrix time_ordered_series(const SidedRate& rate, const Matrix& a0, double t1,
                           double t, int order, int quad_points) {
  if (!(t > t1)) {
    throw ValidationError("series: interval end must exceed its start");
  }
  const auto nodes = gauss_legendre(quad_points);
  const Index d = a0.rows();

  // J_l(upper) = integral over [t1, upper] of rate(s) J_{l-1}(s) ds.
  std::function<Matrix(int, double)> nested = [&](int level,
                                                  double upper) -> Matrix {
    if (level == 0) return Matrix::Identity(d, d);
    Matrix acc = Matrix::Zero(d, d);
    const double mid = 0.5 * (upper + t1);
    const double halfw = 0.5 * (upper - t1);
    for (const auto& [x, w] : nodes) {
      const double s = mid + halfw * x;
      acc += (w * halfw) * (rate(s, Side::right) * nested(level - 1, s));
    }
    return acc;
  };

  Matrix sum = Matrix::Identity(d, d);
  for (int k = 1; k <= order; ++k) sum += nested(k, t);
  return sum * a0;
}

}  // namespace ode

namespace {

ode::SidedRate chain_rate(const Hamiltonian& h, const ProjectorPath& path) {
  return [&h, &path](double s, Side side) {
    return heisenberg_rate(h, path, s, side).mat();
  };
}

void check_interval(double t1, double t) {
  if (!std::isfinite(t1) || !std::isfinite(t) || !(t > t1)) {
    throw ValidationError("interval: need finite t1 < t");
  }
}

}  // namespace

Operator integrate_chain_ode(const Hamiltonian& h, const ProjectorPath& path,
                             double t1, double t,
                             const OdeSettings& settings) {
  check_interval(t1, t);
  const Matrix a0 = heisenberg_projector(h, path, t1).mat();
  Matrix a = ode::propagate(chain_rate(h, path), a0, t1, t, settings,
                            path.path().breakpoints());
  return Operator(std::move(a));
}

Operator complement_chain_ode(const Hamiltonian& h, const ProjectorPath& path,
                              double t1, double t,
                              const OdeSettings& settings) {
  check_interval(t1, t);
  const auto base = chain_rate(h, path);
  const ode::SidedRate negated = [&base](double s, Side side) {
    return (-base(s, side)).eval();
  };
  const Matrix id = Matrix::Identity(path.dim(), path.dim());
  const Matrix a0 = id - heisenberg_projector(h, path, t1).mat();
  Matrix a = ode::propagate(negated, a0, t1, t, settings,
                            path.path().breakpoints());
  return Operator(std::move(a));
}

Operator dyson_series(const Hamiltonian& h, const ProjectorPath& path,
                      double t1, double t, const SeriesSettings& settings) {
  check_interval(t1, t);
  if (settings.order < 0 || settings.order > 3) {
    throw ValidationError("series order must lie in [0, 3], got " +
                          std::to_string(settings.order));
  }
  if (settings.quad_points < 16) {
    throw ValidationError("series quadrature needs >= 16 points per level, got " +
                          std::to_string(settings.quad_points));
  }
  const Matrix a0 = heisenberg_projector(h, path, t1).mat();
  Matrix a = ode::time_ordered_series(chain_rate(h, path), a0, t1, t,
                                      settings.order, settings.quad_points);
  return Operator(std::move(a));
}

Operator zeno_closed_form(const Hamiltonian& h, const Vector& psi0, double t1,
                          double t) {
  if (psi0.size() != h.dim()) {
    throw ValidationError("zeno_closed_form: state dim mismatch");
  }
  const double norm_err = std::abs(psi0.norm() - 1.0);
  if (norm_err > kTolTrace) {
    throw ValidationError("zeno_closed_form: state norm residual " +
                          format_residual(norm_err) + " exceeds tol_trace " +
                          format_residual(kTolTrace));
  }
  // A = e^{+i(H - hbar)t} |psi0><psi0| e^{-i(H - hbar)t1}; the mean energy
  // hbar = <psi0|H|psi0> only contributes a global phase factor.
  const double hbar = (psi0.adjoint() * h.op().mat() * psi0)(0, 0).real();
  const Matrix p = psi0 * psi0.adjoint();
  const Complex phase = std::exp(Complex(0.0, hbar * (t1 - t)));
  return Operator(phase * (h.heisenberg_frame(t) * p * h.evolution(t1)));
}

UnitaryOp w_operator(const Hamiltonian& h, const UnitaryPath& path,
                     const Projector& e, double t1, double t,
                     const OdeSettings& settings) {
  check_interval(t1, t);
  if (e.dim() != path.dim() || e.dim() != h.dim()) {
    throw ValidationError("w_operator: dimension mismatch");
  }
  const ode::SidedRate rate = [&](double s, Side side) {
    const Matrix m = drag_generator(h, path, s, side).mat();
    return (e.mat() * m * e.mat()).eval();
  };
  OdeSettings rk4 = settings;
  rk4.method = OdeMethod::rk4_fixed;
  Matrix w = ode::propagate(rate, Matrix::Identity(e.dim(), e.dim()), t1, t,
                            rk4, path.breakpoints());
  const double res = unitarity_residual(w);
  constexpr double quality_bound = 1e-6;
  if (res > quality_bound) {
    throw NumericalQualityError("w integration unitarity residual " +
                                format_residual(res) +
                                " exceeds 1e-06; reduce the ode step");
  }
  return validate_unitary(Operator(std::move(w)), quality_bound);
}

Operator anti_zeno_propagator(const Hamiltonian& h, const UnitaryPath& path,
                              const Projector& e, double t1, double t,
                              const OdeSettings& settings) {
  const UnitaryOp w = w_operator(h, path, e, t1, t, settings);
  const Matrix v_t = frame_unitary(h, path, t);
  const Matrix v_t1 = frame_unitary(h, path, t1);
  return Operator(v_t * w.mat() * e.mat() * v_t1.adjoint());
}

}  // namespace kw
