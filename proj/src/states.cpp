#include "polyloc/states.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace polyloc {
namespace {

void require_unit_interval(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

ComplexMatrix projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

ComplexMatrix cnot() {
  ComplexMatrix c = ComplexMatrix::Zero(4, 4);
  c(0, 0) = 1.0;
  c(1, 1) = 1.0;
  c(2, 3) = 1.0;
  c(3, 2) = 1.0;
  return c;
}

ComplexMatrix bloch_qubit(const Vec3& r) {
  ComplexMatrix m = pauli(0);
  for (int i = 0; i < 3; ++i) m += r(i) * pauli(i + 1);
  return m / 2.0;
}

struct Maker {
  DensityMatrix operator()(const state::Bell& s) const { return bell_state(s.which); }

  DensityMatrix operator()(const state::Schmidt& s) const {
    if (std::abs(s.tau1 * s.tau1 + s.tau2 * s.tau2 - 1.0) > 1e-12) {
      throw std::invalid_argument("schmidt coefficients must satisfy tau1^2 + tau2^2 = 1");
    }
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = s.tau1;
    v(3) = s.tau2;
    return DensityMatrix(projector(v));
  }

  DensityMatrix operator()(const state::SeparableCc&) const {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = 0.5;
    m(3, 3) = 0.5;
    return DensityMatrix(std::move(m));
  }

  DensityMatrix operator()(const state::Product& s) const {
    if (s.u.norm() > 1.0 + 1e-12 || s.v.norm() > 1.0 + 1e-12) {
      throw std::invalid_argument("product-state Bloch vectors must have norm <= 1");
    }
    return DensityMatrix(kron(bloch_qubit(s.u), bloch_qubit(s.v)));
  }

  DensityMatrix operator()(state::BellDiagonal s) const {
    // weights like 1 - w1 - w2 can land a rounding step below zero
    for (double& w : s.w) {
      if (w < 0.0 && w > -1e-12) w = 0.0;
      require_unit_interval(w, "bell-diagonal weight");
    }
    if (std::abs(std::accumulate(s.w.begin(), s.w.end(), 0.0) - 1.0) > 1e-12) {
      throw std::invalid_argument("bell-diagonal weights must sum to 1");
    }
    constexpr std::array<BellKind, 4> order{BellKind::PsiMinus, BellKind::PhiPlus,
                                            BellKind::PhiMinus, BellKind::PsiPlus};
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    for (std::size_t i = 0; i < 4; ++i) m += s.w[i] * projector(bell_vector(order[i]));
    return DensityMatrix(std::move(m));
  }

  DensityMatrix operator()(const state::NoisyGate& s) const {
    return noisy_gate_state(s.p1, s.p2);
  }

  DensityMatrix operator()(const state::DepolarizedBell& s) const {
    return depolarize_bell(s.p3);
  }
};

}  // namespace

BellKind parse_bell_kind(std::string_view name) {
  if (name == "phi+") return BellKind::PhiPlus;
  if (name == "phi-") return BellKind::PhiMinus;
  if (name == "psi+") return BellKind::PsiPlus;
  if (name == "psi-") return BellKind::PsiMinus;
  throw std::invalid_argument("unknown Bell state '" + std::string(name) + "'");
}

std::string_view to_string(BellKind kind) {
  switch (kind) {
    case BellKind::PhiPlus: return "phi+";
    case BellKind::PhiMinus: return "phi-";
    case BellKind::PsiPlus: return "psi+";
    case BellKind::PsiMinus: return "psi-";
  }
  return "?";
}

Eigen::Vector4cd bell_vector(BellKind kind) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (kind) {
    case BellKind::PhiPlus: v(0) = s; v(3) = s; break;
    case BellKind::PhiMinus: v(0) = s; v(3) = -s; break;
    case BellKind::PsiPlus: v(1) = s; v(2) = s; break;
    case BellKind::PsiMinus: v(1) = s; v(2) = -s; break;
  }
  return v;
}

DensityMatrix bell_state(BellKind kind) { return DensityMatrix(projector(bell_vector(kind))); }

DensityMatrix make_state(const StateSpec& spec) { return std::visit(Maker{}, spec); }

DensityMatrix noisy_local_unitary(const DensityMatrix& rho, const ComplexMatrix& u, double p) {
  require_unit_interval(p, "gate fidelity");
  const ComplexMatrix full = kron(u, pauli(0));
  const std::array<int, 1> second{1};
  const DensityMatrix marginal = partial_trace(rho, second);
  ComplexMatrix out = p * (full * rho.matrix() * full.adjoint()) +
                      0.5 * (1.0 - p) * kron(pauli(0), marginal.matrix());
  return DensityMatrix::trusted(std::move(out));
}

DensityMatrix noisy_two_qubit_unitary(const DensityMatrix& rho, const ComplexMatrix& u, double p) {
  require_unit_interval(p, "gate fidelity");
  ComplexMatrix out = p * (u * rho.matrix() * u.adjoint()) +
                      0.25 * (1.0 - p) * ComplexMatrix::Identity(4, 4);
  return DensityMatrix::trusted(std::move(out));
}

DensityMatrix noisy_gate_state(double p1, double p2) {
  require_unit_interval(p1, "p1");
  require_unit_interval(p2, "p2");
  ComplexMatrix initial = ComplexMatrix::Zero(4, 4);
  initial(2, 2) = 1.0;  // |10><10|
  const DensityMatrix start = DensityMatrix::trusted(std::move(initial));
  const DensityMatrix after_h = noisy_local_unitary(start, hadamard(), p1);
  return noisy_two_qubit_unitary(after_h, cnot(), p2);
}

DensityMatrix depolarize_bell(double p3) {
  require_unit_interval(p3, "p3");
  ComplexMatrix m = p3 * projector(bell_vector(BellKind::PhiMinus)) +
                    0.25 * (1.0 - p3) * ComplexMatrix::Identity(4, 4);
  return DensityMatrix::trusted(std::move(m));
}

std::string describe(const StateSpec& spec) {
  std::ostringstream os;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, state::Bell>) {
          os << "bell(" << to_string(s.which) << ")";
        } else if constexpr (std::is_same_v<T, state::Schmidt>) {
          os << "schmidt(" << s.tau1 << "," << s.tau2 << ")";
        } else if constexpr (std::is_same_v<T, state::SeparableCc>) {
          os << "separable_cc";
        } else if constexpr (std::is_same_v<T, state::Product>) {
          os << "product(u=[" << s.u.transpose() << "],v=[" << s.v.transpose() << "])";
        } else if constexpr (std::is_same_v<T, state::BellDiagonal>) {
          os << "bell_diagonal(" << s.w[0] << "," << s.w[1] << "," << s.w[2] << "," << s.w[3] << ")";
        } else if constexpr (std::is_same_v<T, state::NoisyGate>) {
          os << "noisy_gate(" << s.p1 << "," << s.p2 << ")";
        } else {
          os << "depolarized_bell(" << s.p3 << ")";
        }
      },
      spec);
  return os.str();
}

}  // namespace polyloc
