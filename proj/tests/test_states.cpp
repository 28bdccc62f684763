#include "oracles.hpp"
#include "polyloc/states.hpp"

#include <doctest.h>

#include <cmath>

using namespace polyloc;

namespace {

ComplexMatrix projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

}  // namespace

TEST_CASE("bell vectors are orthonormal and parse by name") {
  const std::array<BellKind, 4> kinds{BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const cplx ip = bell_vector(kinds[i]).dot(bell_vector(kinds[j]));
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-15);
    }
    CHECK(parse_bell_kind(to_string(kinds[i])) == kinds[i]);
  }
  CHECK_THROWS_AS(parse_bell_kind("omega"), std::invalid_argument);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(bell_vector(BellKind::PhiMinus)(0) - r) < 1e-15);
  CHECK(std::abs(bell_vector(BellKind::PhiMinus)(3) + r) < 1e-15);
}

TEST_CASE("schmidt state normalization") {
  const DensityMatrix rho = make_state(state::Schmidt{0.6, 0.8});
  CHECK(rho.purity() == doctest::Approx(1.0));
  CHECK(std::abs(rho.matrix()(0, 3) - 0.48) < 1e-15);
  CHECK_THROWS_AS(make_state(state::Schmidt{0.6, 0.7}), std::invalid_argument);
}

TEST_CASE("product state carries its Bloch vectors") {
  const Vec3 u(0.3, -0.2, 0.5);
  const Vec3 v(0.0, 0.6, -0.7);
  const BlochForm f = bloch_decompose(make_state(state::Product{u, v}));
  CHECK((f.a - u).norm() < 1e-14);
  CHECK((f.b - v).norm() < 1e-14);
  CHECK((f.corr - u * v.transpose()).norm() < 1e-14);
  CHECK_THROWS_AS(make_state(state::Product{Vec3(1, 1, 0), v}), std::invalid_argument);
}

TEST_CASE("separable classically correlated state") {
  const ComplexMatrix m = make_state(state::SeparableCc{}).matrix();
  CHECK(std::abs(m(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(m(3, 3) - 0.5) < 1e-15);
  CHECK(std::abs(m(0, 3)) < 1e-15);
}

TEST_CASE("noisy gate state matches the channel composition written out by hand") {
  // Hadamard on qubit 0 then CNOT (control 0) applied to |10>, each followed
  // by its own depolarizing mix.
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd had;
  had << h, h, h, -h;
  Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  for (double p1 : {0.0, 0.3, 1.0}) {
    for (double p2 : {0.0, 0.45, 1.0}) {
      Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
      rho(2, 2) = 1.0;
      const Eigen::Matrix4cd u1 = oracle::kron(had, Eigen::Matrix2cd::Identity());
      Eigen::Matrix2cd reduced;  // trace over qubit 0
      reduced << rho(0, 0) + rho(2, 2), rho(0, 1) + rho(2, 3), rho(1, 0) + rho(3, 2), rho(1, 1) + rho(3, 3);
      Eigen::Matrix4cd step = p1 * u1 * rho * u1.adjoint() +
                              (1 - p1) / 2 * Eigen::Matrix4cd(oracle::kron(Eigen::Matrix2cd::Identity(), reduced));
      step = p2 * cnot * step * cnot.adjoint() + (1 - p2) / 4 * Eigen::Matrix4cd::Identity();
      CHECK(max_abs_diff(noisy_gate_state(p1, p2).matrix(), step) < 1e-14);
    }
  }
  CHECK(max_abs_diff(noisy_gate_state(1, 1).matrix(), bell_state(BellKind::PhiMinus).matrix()) < 1e-14);
  CHECK_THROWS_AS(noisy_gate_state(1.2, 0.5), std::invalid_argument);
}

TEST_CASE("noisy gate correlation tensor") {
  for (double p1 : {0.1, 0.7}) {
    for (double p2 : {0.2, 0.9}) {
      const BlochForm f = bloch_decompose(noisy_gate_state(p1, p2));
      Mat3 expected = Mat3::Zero();
      expected.diagonal() << -p1 * p2, p1 * p2, p2;
      CHECK((f.corr - expected).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(f.a.norm() < 1e-14);
      CHECK(f.b.norm() < 1e-14);
    }
  }
}

TEST_CASE("depolarized bell state endpoints") {
  CHECK(max_abs_diff(depolarize_bell(1.0).matrix(), bell_state(BellKind::PhiMinus).matrix()) < 1e-15);
  CHECK(max_abs_diff(depolarize_bell(0.0).matrix(), ComplexMatrix::Identity(4, 4) / 4.0) < 1e-15);
  CHECK_THROWS_AS(depolarize_bell(-0.1), std::invalid_argument);
}

TEST_CASE("bell diagonal mixture and its correlation tensor") {
  const std::array<double, 4> w{0.1, 0.2, 0.3, 0.4};
  const DensityMatrix rho = make_state(state::BellDiagonal{w});
  const ComplexMatrix expected = w[0] * projector(bell_vector(BellKind::PsiMinus)) +
                                 w[1] * projector(bell_vector(BellKind::PhiPlus)) +
                                 w[2] * projector(bell_vector(BellKind::PhiMinus)) +
                                 w[3] * projector(bell_vector(BellKind::PsiPlus));
  CHECK(max_abs_diff(rho.matrix(), expected) < 1e-15);

  const Mat3 t = bloch_decompose(rho).corr;
  CHECK(t(0, 0) == doctest::Approx(1 - 2 * (w[0] + w[2])));
  CHECK(t(1, 1) == doctest::Approx(1 - 2 * (w[0] + w[1])));
  CHECK(t(2, 2) == doctest::Approx(-(1 - 2 * (w[1] + w[2]))));

  CHECK_THROWS_AS(make_state(state::BellDiagonal{{0.5, 0.5, 0.5, -0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(make_state(state::BellDiagonal{{0.5, 0.2, 0.2, 0.2}}), std::invalid_argument);
  CHECK_NOTHROW(make_state(state::BellDiagonal{{0.3, 0.7, 0.0, 1.0 - 0.3 - 0.7}}));
}

TEST_CASE("noisy unitaries at p = 1 are plain conjugation") {
  const DensityMatrix rho = bell_state(BellKind::PsiPlus);
  const ComplexMatrix x = pauli(1);
  CHECK(max_abs_diff(noisy_local_unitary(rho, x, 1.0).matrix(), bell_state(BellKind::PhiPlus).matrix()) < 1e-15);
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  CHECK(max_abs_diff(noisy_two_qubit_unitary(rho, id, 0.0).matrix(), id / 4.0) < 1e-15);
}

TEST_CASE("describe names every kind") {
  CHECK(describe(state::Bell{BellKind::PhiPlus}).find("phi+") != std::string::npos);
  CHECK(describe(state::DepolarizedBell{0.5}).find("depolarized") != std::string::npos);
}
