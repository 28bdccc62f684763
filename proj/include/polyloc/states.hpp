// Two-qubit source states and the source-side noise channels.
#pragma once

#include "polyloc/linalg.hpp"

#include <array>
#include <string>
#include <string_view>
#include <variant>

namespace polyloc {

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

BellKind parse_bell_kind(std::string_view name);
std::string_view to_string(BellKind kind);

namespace state {

struct Bell {
  BellKind which = BellKind::PhiPlus;
};

/// tau1 |00> + tau2 |11>
struct Schmidt {
  double tau1 = 1.0;
  double tau2 = 0.0;
};

/// (|00><00| + |11><11|) / 2
struct SeparableCc {};

/// (I + u.sigma)/2 (x) (I + v.sigma)/2
struct Product {
  Vec3 u = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

/// w[0] psi- + w[1] phi+ + w[2] phi- + w[3] psi+
struct BellDiagonal {
  std::array<double, 4> w{1.0, 0.0, 0.0, 0.0};
};

/// Hadamard-then-CNOT preparation with imperfection parameters p1, p2.
struct NoisyGate {
  double p1 = 1.0;
  double p2 = 1.0;
};

/// p3 |phi-><phi-| + (1 - p3) I/4
struct DepolarizedBell {
  double p3 = 1.0;
};

}  // namespace state

using StateSpec = std::variant<state::Bell, state::Schmidt, state::SeparableCc, state::Product,
                               state::BellDiagonal, state::NoisyGate, state::DepolarizedBell>;

/// Column vector of the named Bell state.
Eigen::Vector4cd bell_vector(BellKind kind);
DensityMatrix bell_state(BellKind kind);

DensityMatrix make_state(const StateSpec& spec);

/// Composes the noisy Hadamard channel on qubit 0 with the noisy CNOT
/// (control qubit 0), starting from |10><10| so that p1 = p2 = 1 gives
/// |phi-><phi-|.
DensityMatrix noisy_gate_state(double p1, double p2);

DensityMatrix depolarize_bell(double p3);

/// Noisy single-qubit unitary on qubit 0 of a two-qubit state:
/// p U rho U^dag + (1 - p)/2 I (x) tr_0(rho).
DensityMatrix noisy_local_unitary(const DensityMatrix& rho, const ComplexMatrix& u, double p);

/// Noisy two-qubit unitary: p U rho U^dag + (1 - p)/4 I.
DensityMatrix noisy_two_qubit_unitary(const DensityMatrix& rho, const ComplexMatrix& u, double p);

std::string describe(const StateSpec& spec);

}  // namespace polyloc
