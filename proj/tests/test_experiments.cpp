#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kw/experiments.hpp"
#include "kw/json_io.hpp"
#include "kw/random_matrices.hpp"
#include "oracles.hpp"

using namespace kw;

namespace {

ExperimentConfig zeno_qubit_config(std::vector<std::int64_t> n_list) {
  const Projector e = basis_projector(2, 1);
  return ExperimentConfig{Hamiltonian(Operator(oracle::sigma_x())),
                          e,
                          UnitaryPath::identity(2),
                          validate_density(Operator(e.mat())),
                          std::nullopt,
                          0.0,
                          1.0,
                          std::move(n_list),
                          0.0,
                          0};
}

ExperimentConfig drag_config() {
  const Projector e = basis_projector(2, 1);
  return ExperimentConfig{Hamiltonian(Operator::zero(2)),
                          e,
                          UnitaryPath::constant(Operator(oracle::rot2(M_PI / 2.0))),
                          validate_density(Operator(e.mat())),
                          std::nullopt,
                          0.0,
                          1.0,
                          {11, 101, 1001},
                          0.0,
                          0};
}

ExperimentConfig random_config(std::uint64_t seed, Index dim, Index rank,
                               std::vector<std::int64_t> n_list,
                               bool moving_path) {
  Rng rng(seed);
  Operator hop = random_hermitian(rng, dim);
  Operator g = random_anti_hermitian(rng, dim);
  Projector e = random_projector(rng, dim, rank);
  DensityOp rho0 = random_density_in_range(rng, e);
  UnitaryPath path = moving_path ? UnitaryPath::constant(std::move(g))
                                 : UnitaryPath::identity(dim);
  return ExperimentConfig{Hamiltonian(std::move(hop)),
                          std::move(e),
                          std::move(path),
                          std::move(rho0),
                          std::nullopt,
                          0.0,
                          1.0,
                          std::move(n_list),
                          0.0,
                          seed};
}

}  // namespace

TEST_CASE("log-log fit") {
  SUBCASE("recovers an exact power law") {
    std::vector<double> ns, errs;
    for (double n : {10.0, 100.0, 1000.0}) {
      ns.push_back(n);
      errs.push_back(5.0 * std::pow(n, -2.0));
    }
    const FitResult fit = fit_loglog(ns, errs);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-10));
    CHECK(fit.residual < 1e-12);
  }

  SUBCASE("roundoff-level errors make the fit degenerate") {
    const FitResult fit =
        fit_loglog({100.0, 1000.0, 10000.0}, {1e-16, 2e-16, 5e-17});
    CHECK(fit.degenerate);
    const FitResult almost =
        fit_loglog({100.0, 1000.0, 10000.0}, {1e-5, 1e-16, 1e-16});
    CHECK(almost.degenerate);  // a single live point is not a line
  }

  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(fit_loglog({1.0}, {1.0}), ValidationError);
}

TEST_CASE("static-watch run: qubit survival against the textbook law") {
  const ExperimentReport r = run_zeno(zeno_qubit_config({11, 101, 1001}));

  CHECK(r.scenario == "zeno");
  CHECK(r.dim == 2);
  CHECK(r.path_breakpoints.empty());
  REQUIRE(r.rows.size() == 3);
  for (const SeriesRow& row : r.rows) {
    // sequential-product roundoff grows ~ n * eps, so the bound scales with n
    CHECK(std::abs(row.p_discrete - oracle::zeno_qubit_probability(row.n)) <
          1e-12);
    CHECK(row.p_closed_form == doctest::Approx(1.0).epsilon(1e-12));
  }
  REQUIRE(r.closed_form_probability.has_value());
  CHECK(std::abs(*r.closed_form_probability - 1.0) < 1e-12);

  REQUIRE(r.convergence.has_value());
  CHECK_FALSE(r.convergence->degenerate);
  CHECK(r.convergence->slope == doctest::Approx(-1.0).epsilon(0.1));

  REQUIRE(r.survival_deficit_coefficient.has_value());
  CHECK(*r.survival_deficit_coefficient > 0.9);
  CHECK(*r.survival_deficit_coefficient < 1.1);

  REQUIRE(r.ode_residual.has_value());
  CHECK(*r.ode_residual < 1e-8);

  CHECK(r.timings.count("total") == 1);
  CHECK(r.timings.at("total") > 0.0);
}

TEST_CASE("static-watch run: frozen dynamics is exactly preserved") {
  ExperimentConfig cfg = zeno_qubit_config({100, 1000, 10000});
  cfg.hamiltonian = Hamiltonian(Operator::zero(2));
  const ExperimentReport r = run_zeno(cfg);
  for (const SeriesRow& row : r.rows) {
    CHECK(std::abs(row.p_discrete - 1.0) < 1e-14);
  }
  REQUIRE(r.convergence.has_value());
  CHECK(r.convergence->degenerate);
}

TEST_CASE("static-watch preconditions") {
  // the watcher must not move
  ExperimentConfig moving = zeno_qubit_config({11});
  moving.path = UnitaryPath::constant(Operator(oracle::rot2(0.3)));
  CHECK_THROWS_WITH_AS(run_zeno(moving), doctest::Contains("identity"),
                       ValidationError);

  // only a rank-1 watched line has the frozen closed form
  ExperimentConfig wide = zeno_qubit_config({11});
  wide.projector = basis_projector(2, 2);
  wide.rho0 = validate_density(Operator(Matrix(wide.projector.mat() / 2.0)));
  CHECK_THROWS_WITH_AS(run_zeno(wide), doctest::Contains("rank"),
                       ValidationError);

  // rho0 must be the watched projector itself
  ExperimentConfig shifted = zeno_qubit_config({11});
  shifted.rho0 =
      validate_density(Operator(Matrix(0.5 * Matrix::Identity(2, 2))));
  CHECK_THROWS_AS(run_zeno(shifted), ValidationError);
}

TEST_CASE("dragged-watch run: planar drag carries the state along") {
  const ExperimentReport r = run_anti_zeno(drag_config());

  REQUIRE(r.closed_form_probability.has_value());
  CHECK(std::abs(*r.closed_form_probability - 1.0) < 1e-12);

  REQUIRE(r.final_state.has_value());
  const Matrix& sigma = *r.final_state;
  // the watcher steered |0> to |1>: full overlap with the dragged target,
  // none left on the starting line
  CHECK(sigma(1, 1).real() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sigma(0, 0).real() < 1e-9);
  REQUIRE(r.final_state_deviation.has_value());
  CHECK(*r.final_state_deviation ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

  REQUIRE(r.w_unitarity_residual.has_value());
  CHECK(*r.w_unitarity_residual < 1e-10);
  REQUIRE(r.ode_residual.has_value());
  CHECK(*r.ode_residual < 1e-5);

  // finite chains trail the moving line at the usual 1/n rate
  REQUIRE(r.convergence.has_value());
  CHECK(r.convergence->slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("dragged-watch run: random instance keeps probability 1") {
  const ExperimentReport r =
      run_anti_zeno(random_config(17, 4, 2, {100, 1000}, true));
  REQUIRE(r.closed_form_probability.has_value());
  CHECK(std::abs(*r.closed_form_probability - 1.0) < 1e-8);
  REQUIRE(r.final_state_deviation.has_value());
  // the state is dragged but stays inside the moving subspace; the final
  // state is a valid density operator by construction (validated inside)
  CHECK(r.rows.size() == 2);
  CHECK(r.rows[1].p_discrete > r.rows[0].p_discrete);
}

TEST_CASE("dragged-watch precondition: rho0 must live on the watched range") {
  ExperimentConfig cfg = drag_config();
  cfg.rho0 = validate_density(Operator(Matrix(0.5 * Matrix::Identity(2, 2))));
  CHECK_THROWS_WITH_AS(run_anti_zeno(cfg), doctest::Contains("supported"),
                       ValidationError);
}

TEST_CASE("still path makes the two runners agree") {
  const ExperimentConfig cfg = random_config(23, 3, 1, {101, 1001}, false);
  ExperimentConfig zcfg = cfg;
  // run_zeno wants rho0 equal to the projector (they differ by roundoff
  // after the range-normalization, so rebuild it exactly)
  zcfg.rho0 = validate_density(Operator(zcfg.projector.mat()));
  ExperimentConfig acfg = cfg;
  acfg.rho0 = zcfg.rho0;

  const ExperimentReport rz = run_zeno(zcfg);
  const ExperimentReport ra = run_anti_zeno(acfg);

  REQUIRE(rz.closed_form_probability.has_value());
  REQUIRE(ra.closed_form_probability.has_value());
  CHECK(std::abs(*rz.closed_form_probability - *ra.closed_form_probability) <
        1e-8);
  REQUIRE(rz.rows.size() == ra.rows.size());
  for (std::size_t i = 0; i < rz.rows.size(); ++i) {
    CHECK(std::abs(rz.rows[i].p_discrete - ra.rows[i].p_discrete) < 1e-12);
    CHECK(std::abs(rz.rows[i].op_error - ra.rows[i].op_error) < 1e-8);
  }
}

TEST_CASE("convergence study") {
  SUBCASE("validates the grid list") {
    ExperimentConfig two = random_config(31, 2, 1, {100, 10000}, true);
    CHECK_THROWS_WITH_AS(convergence_study(two), doctest::Contains("3"),
                         ValidationError);
    ExperimentConfig narrow = random_config(31, 2, 1, {100, 200, 300}, true);
    CHECK_THROWS_WITH_AS(convergence_study(narrow),
                         doctest::Contains("decades"), ValidationError);
  }

  SUBCASE("reports a clean first-order slope") {
    const ExperimentReport r =
        convergence_study(random_config(31, 3, 1, {100, 1000, 10000}, true));
    REQUIRE(r.convergence.has_value());
    CHECK_FALSE(r.convergence->degenerate);
    CHECK(r.convergence->slope == doctest::Approx(-1.0).epsilon(0.1));
    REQUIRE(r.w_unitarity_residual.has_value());
    CHECK(*r.w_unitarity_residual < 1e-8);
  }

  SUBCASE("piecewise drag path, joints flagged in the report") {
    std::vector<UnitaryPath::Piece> pieces;
    pieces.push_back({0.5, Operator(oracle::rot2(0.8))});
    pieces.push_back({1.0, Operator(oracle::rot2(-0.4))});
    ExperimentConfig cfg = random_config(37, 2, 1, {100, 1000, 10000}, false);
    cfg.path = UnitaryPath::piecewise(std::move(pieces));
    const ExperimentReport r = convergence_study(cfg);
    CHECK(r.path_breakpoints == std::vector<double>{0.5});
    REQUIRE(r.convergence.has_value());
    CHECK(r.convergence->slope == doctest::Approx(-1.0).epsilon(0.1));
  }
}

TEST_CASE("residual certification") {
  SUBCASE("requires a smooth path") {
    std::vector<UnitaryPath::Piece> pieces;
    pieces.push_back({0.5, Operator(oracle::rot2(0.8))});
    pieces.push_back({1.0, Operator(oracle::rot2(-0.4))});
    ExperimentConfig cfg = random_config(41, 2, 1, {100}, false);
    cfg.path = UnitaryPath::piecewise(std::move(pieces));
    CHECK_THROWS_WITH_AS(residual_certify(cfg), doctest::Contains("smooth"),
                         ValidationError);
  }

  SUBCASE("certifies the dragged closed form") {
    const ExperimentReport r =
        residual_certify(random_config(43, 3, 1, {100}, true));
    CHECK(r.scenario == "residual");
    CHECK(r.rows.empty());
    REQUIRE(r.ode_residual.has_value());
    CHECK(*r.ode_residual < 1e-5);
    REQUIRE(r.w_unitarity_residual.has_value());
    CHECK(*r.w_unitarity_residual < 1e-8);
  }
}

TEST_CASE("reports serialize deterministically") {
  const ExperimentConfig cfg = random_config(47, 3, 1, {100, 1000}, true);
  const std::string a = report_to_json(run_anti_zeno(cfg), false).dump(2);
  const std::string b = report_to_json(run_anti_zeno(cfg), false).dump(2);
  CHECK(a == b);

  // and the csv round mirrors the rows
  const ExperimentReport r = run_anti_zeno(cfg);
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("n,p_discrete,op_error,p_closed_form\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<std::ptrdiff_t>(r.rows.size()) + 1);
}
