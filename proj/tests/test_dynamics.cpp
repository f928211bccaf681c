#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kw/dynamics.hpp"
#include "kw/random_matrices.hpp"
#include "oracles.hpp"

using namespace kw;

namespace {

const Complex kI(0.0, 1.0);

Hamiltonian qubit_x() { return Hamiltonian(Operator(oracle::sigma_x())); }

UnitaryPath two_piece_path(double g1 = 0.8, double g2 = -0.4,
                           double joint = 0.5) {
  std::vector<UnitaryPath::Piece> pieces;
  pieces.push_back({joint, Operator(oracle::rot2(g1))});
  pieces.push_back({1.5, Operator(oracle::rot2(g2))});
  return UnitaryPath::piecewise(std::move(pieces));
}

}  // namespace

TEST_CASE("hamiltonian evolution matches analytic and Taylor oracles") {
  SUBCASE("diagonal hamiltonian, analytic phases") {
    const Hamiltonian h(Operator(oracle::sigma_z()));
    const double t = 0.9;
    Matrix want(2, 2);
    want << std::exp(-kI * t), 0.0, 0.0, std::exp(kI * t);
    CHECK(frobenius_distance(h.evolution(t), want) < 1e-14);
    CHECK(frobenius_distance(h.heisenberg_frame(t), want.adjoint()) < 1e-14);
  }

  SUBCASE("random hamiltonian against the Taylor oracle") {
    Rng rng(31);
    const Operator hop = random_hermitian(rng, 4);
    const Hamiltonian h(hop);
    for (double t : {0.3, 1.7, -2.2}) {
      const Matrix want = oracle::taylor_exp(Matrix(-kI * t * hop.mat()));
      CHECK(frobenius_distance(h.evolution(t), want) < 1e-13);
    }
  }

  SUBCASE("group and adjoint properties") {
    Rng rng(32);
    const Hamiltonian h(random_hermitian(rng, 5));
    const Matrix u = h.evolution(0.4) * h.evolution(1.1);
    CHECK(frobenius_distance(u, h.evolution(1.5)) < 1e-14);
    CHECK(unitarity_residual(h.evolution(2.3)) < 1e-14);
    CHECK(frobenius_distance(h.heisenberg_frame(0.7),
                             Matrix(h.evolution(0.7).adjoint())) < 1e-15);
  }

  SUBCASE("rejects non-hermitian generators") {
    Matrix bad = oracle::sigma_x();
    bad(0, 1) += Complex(0.0, 1e-3);
    CHECK_THROWS_WITH_AS(Hamiltonian(Operator(bad)),
                         doctest::Contains("hermiticity"), ValidationError);
  }
}

TEST_CASE("state and density evolution") {
  const Hamiltonian h = qubit_x();
  // e^{-i (pi/2) sigma_x} |0> = -i |1>
  const Vector psi = evolve_state(h, M_PI / 2.0, oracle::ket(2, 0));
  Vector want(2);
  want << 0.0, -kI;
  CHECK((psi - want).norm() < 1e-14);

  const DensityOp rho0 = validate_density(
      Operator(Matrix(oracle::ket(2, 0) * oracle::ket(2, 0).adjoint())));
  const DensityOp rho = evolve_density(h, 0.6, rho0);
  const Vector phi = evolve_state(h, 0.6, oracle::ket(2, 0));
  CHECK(frobenius_distance(rho.mat(), Matrix(phi * phi.adjoint())) < 1e-14);
}

TEST_CASE("identity path") {
  const UnitaryPath p = UnitaryPath::identity(3);
  CHECK(p.is_identity());
  CHECK(p.breakpoints().empty());
  CHECK(frobenius_distance(p.at(0.0), Matrix::Identity(3, 3)) == 0.0);
  CHECK(frobenius_distance(p.at(17.3), Matrix::Identity(3, 3)) == 0.0);
  CHECK(frobenius(p.generator_at(2.0)) == 0.0);
}

TEST_CASE("constant-generator path") {
  const double theta = 0.8;
  const UnitaryPath p = UnitaryPath::constant(Operator(oracle::rot2(theta)));
  CHECK_FALSE(p.is_identity());
  CHECK(p.breakpoints().empty());
  CHECK(frobenius_distance(p.at(0.0), Matrix::Identity(2, 2)) < 1e-15);

  for (double t : {0.2, 1.0, 3.7}) {
    Matrix want(2, 2);
    want << std::cos(theta * t), -std::sin(theta * t), std::sin(theta * t),
        std::cos(theta * t);
    CHECK(frobenius_distance(p.at(t), want) < 1e-13);
    CHECK(unitarity_residual(p.at(t)) < 1e-14);
  }

  Rng rng(71);
  const Operator g = random_anti_hermitian(rng, 4);
  const UnitaryPath q = UnitaryPath::constant(g);
  CHECK(frobenius_distance(q.at(1.3),
                           oracle::taylor_exp(Matrix(1.3 * g.mat()))) < 1e-13);

  CHECK_THROWS_WITH_AS(UnitaryPath::constant(Operator(oracle::sigma_x())),
                       doctest::Contains("anti-hermiticity"), ValidationError);
}

TEST_CASE("piecewise path: continuity, composition and joint rules") {
  const UnitaryPath p = two_piece_path();

  REQUIRE(p.breakpoints() == std::vector<double>{0.5});
  CHECK_FALSE(p.is_identity());

  // continuous across the joint
  CHECK(frobenius_distance(p.at(0.5 - 1e-9), p.at(0.5)) < 1e-8);
  CHECK(frobenius_distance(p.at(0.5 + 1e-9), p.at(0.5)) < 1e-8);

  // manual composition on the second piece
  const Matrix want =
      oracle::taylor_exp(Matrix(0.3 * oracle::rot2(-0.4))) * p.at(0.5);
  CHECK(frobenius_distance(p.at(0.8), want) < 1e-13);

  // generator lookup: unambiguous inside a piece, sided at the joint
  CHECK(frobenius_distance(p.generator_at(0.3), oracle::rot2(0.8)) == 0.0);
  CHECK(frobenius_distance(p.generator_at(0.5, Side::left),
                           oracle::rot2(0.8)) == 0.0);
  CHECK(frobenius_distance(p.generator_at(0.5, Side::right),
                           oracle::rot2(-0.4)) == 0.0);
  CHECK_THROWS_WITH_AS(p.generator_at(0.5),
                       doctest::Contains("discontinuous"), ValidationError);
}

TEST_CASE("piecewise path validation") {
  std::vector<UnitaryPath::Piece> dec;
  dec.push_back({0.7, Operator(oracle::rot2(1.0))});
  dec.push_back({0.4, Operator(oracle::rot2(2.0))});
  CHECK_THROWS_AS(UnitaryPath::piecewise(std::move(dec)), ValidationError);

  std::vector<UnitaryPath::Piece> mixed;
  mixed.push_back({0.5, Operator(oracle::rot2(1.0))});
  mixed.push_back({1.0, Operator::zero(3)});
  CHECK_THROWS_AS(UnitaryPath::piecewise(std::move(mixed)), ValidationError);

  CHECK_THROWS_AS(UnitaryPath::piecewise({}), ValidationError);
}

TEST_CASE("path derivative is the generator (central-difference order 2)") {
  Rng rng(55);
  const UnitaryPath p = UnitaryPath::constant(random_anti_hermitian(rng, 3));
  const double t = 0.63;

  auto fd_error = [&](double delta) {
    const Matrix fd = (p.at(t + delta) - p.at(t - delta)) / (2.0 * delta);
    return frobenius_distance(fd, Matrix(p.generator_at(t) * p.at(t)));
  };

  const double e1 = fd_error(1e-3);
  const double e2 = fd_error(5e-4);
  CHECK(e1 < 1e-6);
  const double order = std::log2(e1 / e2);
  CHECK(order > 1.9);
  CHECK(order < 2.1);
}

TEST_CASE("projector path and its rate") {
  Rng rng(17);
  const Projector e = random_projector(rng, 3, 1);
  const UnitaryPath u = UnitaryPath::constant(random_anti_hermitian(rng, 3));
  const ProjectorPath ep(e, u);

  const double t = 0.42;
  CHECK(frobenius_distance(ep.at(t).mat(),
                           oracle::naive_conjugate(u.at(t), e.mat())) < 1e-13);

  // rate = [G, E_s(t)] equals the derivative of at()
  const double delta = 1e-6;
  const Matrix fd =
      (ep.at(t + delta).mat() - ep.at(t - delta).mat()) / (2.0 * delta);
  CHECK(frobenius_distance(fd, ep.rate_at(t)) < 1e-9);
  CHECK(hermiticity_residual(ep.rate_at(t)) < 1e-14);

  // identity path: static projector, zero rate
  const ProjectorPath still(e, UnitaryPath::identity(3));
  CHECK(frobenius_distance(still.at(9.0).mat(), e.mat()) == 0.0);
  CHECK(frobenius(still.rate_at(9.0)) == 0.0);

  CHECK_THROWS_AS(ProjectorPath(e, UnitaryPath::identity(4)),
                  ValidationError);
}

TEST_CASE("frame unitary and the watched projector in the moving frame") {
  Rng rng(23);
  const Operator hop = random_hermitian(rng, 3);
  const Hamiltonian h(hop);
  const UnitaryPath u = UnitaryPath::constant(random_anti_hermitian(rng, 3));
  const Projector e = random_projector(rng, 3, 1);
  const ProjectorPath ep(e, u);

  const double t = 0.77;
  const Matrix v = frame_unitary(h, u, t);
  CHECK(frobenius_distance(v, Matrix(h.heisenberg_frame(t) * u.at(t))) <
        1e-14);
  CHECK(unitarity_residual(v) < 1e-13);
  CHECK(frobenius_distance(frame_unitary(h, u, 0.0), Matrix::Identity(3, 3)) <
        1e-14);

  const Projector eh = heisenberg_projector(h, ep, t);
  CHECK(frobenius_distance(eh.mat(), oracle::naive_conjugate(v, e.mat())) <
        1e-13);
}

TEST_CASE("heisenberg rate equals the frame-projector derivative") {
  Rng rng(29);
  const Hamiltonian h(random_hermitian(rng, 3));
  const UnitaryPath u = UnitaryPath::constant(random_anti_hermitian(rng, 3));
  const Projector e = random_projector(rng, 3, 1);
  const ProjectorPath ep(e, u);

  const double t = 0.36, delta = 1e-5;
  const Matrix fd = (heisenberg_projector(h, ep, t + delta).mat() -
                     heisenberg_projector(h, ep, t - delta).mat()) /
                    (2.0 * delta);
  const Operator rate = heisenberg_rate(h, ep, t);
  CHECK(frobenius_distance(fd, rate.mat()) < 1e-9);
  CHECK(hermiticity_residual(rate.mat()) < 1e-13);

  // static-path special case: rate = i[H, E_H]
  const ProjectorPath still(e, UnitaryPath::identity(3));
  const Matrix ehm = heisenberg_projector(h, still, t).mat();
  const Matrix want = kI * (h.op().mat() * ehm - ehm * h.op().mat());
  CHECK(frobenius_distance(heisenberg_rate(h, still, t).mat(), want) < 1e-13);
}

TEST_CASE("drag generator") {
  Rng rng(41);
  const Operator hop = random_hermitian(rng, 3);
  const Hamiltonian h(hop);

  // identity path: M = -iH, constant
  const UnitaryPath id = UnitaryPath::identity(3);
  CHECK(frobenius_distance(drag_generator(h, id, 0.4).mat(),
                           Matrix(-kI * hop.mat())) < 1e-15);

  // moving path: M = (dU†/dt) U - i U† H U, checked with a finite difference
  const UnitaryPath u = UnitaryPath::constant(random_anti_hermitian(rng, 3));
  const double t = 0.58, delta = 1e-5;
  const Matrix dudagger =
      (u.at(t + delta).adjoint() - u.at(t - delta).adjoint()) / (2.0 * delta);
  const Matrix want = dudagger * u.at(t) - kI * (u.at(t).adjoint() *
                                                 hop.mat() * u.at(t));
  const Operator m = drag_generator(h, u, t);
  CHECK(frobenius_distance(m.mat(), want) < 1e-9);
  CHECK(anti_hermiticity_residual(m.mat()) < 1e-13);
}

TEST_CASE("sided evaluation at a piecewise joint") {
  const UnitaryPath p = two_piece_path();
  Rng rng(61);
  const Hamiltonian h(random_hermitian(rng, 2));
  const Projector e = basis_projector(2, 1);
  const ProjectorPath ep(e, p);

  CHECK_THROWS_AS(ep.rate_at(0.5), ValidationError);
  CHECK_NOTHROW(ep.rate_at(0.5, Side::left));
  CHECK_THROWS_AS(heisenberg_rate(h, ep, 0.5), ValidationError);
  CHECK_THROWS_AS(drag_generator(h, p, 0.5), ValidationError);

  // the two one-sided rates genuinely differ at the joint
  const Matrix left = heisenberg_rate(h, ep, 0.5, Side::left).mat();
  const Matrix right = heisenberg_rate(h, ep, 0.5, Side::right).mat();
  CHECK(frobenius_distance(left, right) > 1e-3);
}
