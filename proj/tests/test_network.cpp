#include "oracles.hpp"
#include "polyloc/network.hpp"
#include "polyloc/states.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace polyloc;

namespace {

struct PureNetwork {
  std::vector<oracle::Vec4> sources;
  std::vector<std::array<oracle::Vec4, 4>> bases;

  [[nodiscard]] NetworkSpec spec() const {
    std::vector<DensityMatrix> rhos;
    for (const auto& v : sources) rhos.emplace_back(ComplexMatrix(v * v.adjoint()));
    std::vector<FourOutcomePovm> povms;
    for (const auto& b : bases) povms.push_back(projective(b));
    return {rhos, povms};
  }
};

PureNetwork random_network(std::mt19937_64& rng, int n) {
  PureNetwork net;
  for (int i = 0; i < n; ++i) {
    net.sources.push_back(oracle::random_unit_vector(rng));
    net.bases.push_back(oracle::random_basis(rng));
  }
  return net;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

}  // namespace

TEST_CASE("joint distribution matches statevector contraction on the triangle") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const PureNetwork net = random_network(rng, 3);
    const ProbabilityTable p = joint_distribution(net.spec());
    CHECK(max_gap(p.values(), oracle::statevector_distribution(net.sources, net.bases)) < 1e-12);
  }
}

TEST_CASE("joint distribution matches statevector contraction on the square") {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 5; ++trial) {
    const PureNetwork net = random_network(rng, 4);
    const ProbabilityTable p = joint_distribution(net.spec());
    CHECK(max_gap(p.values(), oracle::statevector_distribution(net.sources, net.bases)) < 1e-12);
  }
}

TEST_CASE("global state trace route agrees with the contraction") {
  std::mt19937_64 rng(303);
  const PureNetwork net = random_network(rng, 3);
  const NetworkSpec spec = net.spec();
  const ComplexMatrix rho = global_state(spec).matrix();
  const ProbabilityTable p = joint_distribution(spec);
  for (std::size_t flat = 0; flat < p.size(); flat += 7) {
    ComplexMatrix e = spec.povms()[0].element(p.outcome_of(flat, 0));
    for (int k = 1; k < 3; ++k) e = oracle::kron(e, spec.povms()[static_cast<std::size_t>(k)].element(p.outcome_of(flat, k)));
    CHECK(std::abs((rho * e).trace().real() - p[flat]) < 1e-13);
  }
}

TEST_CASE("wiring permutation") {
  CHECK(wiring_permutation(3) == std::vector<int>{5, 0, 1, 2, 3, 4});
  CHECK(wiring_permutation(4) == std::vector<int>{7, 0, 1, 2, 3, 4, 5, 6});
}

TEST_CASE("product sources give a product distribution") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<DensityMatrix> rhos;
  for (int i = 0; i < 3; ++i) {
    rhos.push_back(make_state(state::Product{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))}));
  }
  std::vector<FourOutcomePovm> povms(3, entangled_basis(0.6));
  const ProbabilityTable p = joint_distribution(NetworkSpec(rhos, povms));
  const auto m0 = p.marginal(0);
  const auto m1 = p.marginal(1);
  const auto m2 = p.marginal(2);
  for (std::size_t flat = 0; flat < p.size(); ++flat) {
    const double expected = m0[static_cast<std::size_t>(p.outcome_of(flat, 0))] *
                            m1[static_cast<std::size_t>(p.outcome_of(flat, 1))] *
                            m2[static_cast<std::size_t>(p.outcome_of(flat, 2))];
    CHECK(std::abs(p[flat] - expected) < 1e-14);
  }
}

TEST_CASE("identical sources and measurements give a rotation-invariant table") {
  std::vector<DensityMatrix> rhos(4, noisy_gate_state(0.8, 0.7));
  std::vector<FourOutcomePovm> povms(4, entangled_basis(0.3));
  const ProbabilityTable p = joint_distribution(NetworkSpec(rhos, povms));
  for (int shift = 1; shift < 4; ++shift) {
    const ProbabilityTable r = p.rotated(shift);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - r[i]) < 1e-14);
  }
}

TEST_CASE("probability table basics") {
  const ProbabilityTable u = ProbabilityTable::uniform(3);
  CHECK(u.size() == 64);
  const std::array<int, 3> o{1, 2, 3};
  CHECK(u.flat_index(o) == 1 * 16 + 2 * 4 + 3);
  CHECK(u.at(o) == doctest::Approx(1.0 / 64));
  CHECK(u.outcome_of(27, 0) == 1);
  CHECK(u.outcome_of(27, 2) == 3);

  std::vector<double> bad(64, 1.0 / 64);
  bad[0] += 0.01;
  CHECK_THROWS_AS(ProbabilityTable(3, bad), std::invalid_argument);
  std::vector<double> tiny_negative(64, 1.0 / 64);
  tiny_negative[0] = -1e-13;
  tiny_negative[1] += 1.0 / 64 + 1e-13;
  CHECK(ProbabilityTable(3, tiny_negative)[0] == 0.0);
  CHECK_THROWS_AS(ProbabilityTable(3, std::vector<double>(63, 1.0 / 63)), std::invalid_argument);
}

TEST_CASE("network spec validation") {
  std::vector<DensityMatrix> rhos(3, bell_state(BellKind::PhiPlus));
  std::vector<FourOutcomePovm> povms(2, product_basis());
  CHECK_THROWS_AS(NetworkSpec(rhos, povms), std::invalid_argument);
  CHECK_THROWS_AS(NetworkSpec(std::vector<DensityMatrix>(2, bell_state(BellKind::PhiPlus)),
                              std::vector<FourOutcomePovm>(2, product_basis())),
                  std::invalid_argument);
}

TEST_CASE("csv output") {
  std::ostringstream os;
  write_csv(os, ProbabilityTable::uniform(3));
  const std::string text = os.str();
  CHECK(text.rfind("o1,o2,o3,p\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 65);
}
