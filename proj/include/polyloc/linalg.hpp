// Dense complex linear algebra for small multi-qubit operators.
//
// Basis ordering is big-endian: qubit 0 is the most significant bit of a
// computational-basis index, so |q0 q1 ... q_{k-1}> has index
// q0 * 2^{k-1} + ... + q_{k-1}. kron() follows the same convention: the left
// factor owns the most significant qubits.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace polyloc {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-9;

/// Largest qubit count accepted anywhere in the library (2n for n = 6 sources).
inline constexpr int kMaxQubits = 12;

/// A validated density operator on `qubits()` qubits.
///
/// Construction checks squareness, power-of-two dimension, finiteness,
/// Hermiticity, unit trace and positivity (eigenvalues >= -1e-9). Operators
/// produced by composing already-valid states (tensor products, qubit
/// permutations, partial traces) use the `trusted` factory, which skips the
/// eigen-decomposition.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix trusted(ComplexMatrix m);

  [[nodiscard]] int qubits() const noexcept { return qubits_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }
  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return m_; }

  /// tr(rho^2)
  [[nodiscard]] double purity() const;

 private:
  struct TrustedTag {};
  DensityMatrix(ComplexMatrix m, TrustedTag);

  int qubits_ = 0;
  ComplexMatrix m_;
};

/// Local Bloch vectors and correlation tensor of a two-qubit state.
struct BlochForm {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  Mat3 corr = Mat3::Zero();
};

/// Singular values of the correlation tensor, descending.
struct SingularTriple {
  double t11 = 0.0;
  double t22 = 0.0;
  double t33 = 0.0;
};

/// sigma_0 = identity, sigma_1..3 = X, Y, Z.
const ComplexMatrix& pauli(int index);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);

/// Reduced state on `keep`, in the listed order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// Output qubit j is input qubit perm[j].
DensityMatrix permute_qubits(const DensityMatrix& rho, std::span<const int> perm);

/// Returns the inverse permutation; throws if `perm` is not a bijection on
/// {0..size-1}.
std::vector<int> invert_permutation(std::span<const int> perm);

BlochForm bloch_decompose(const DensityMatrix& rho);
ComplexMatrix bloch_reconstruct(const BlochForm& form);

SingularTriple correlation_singular_values(const DensityMatrix& rho);

/// t11^2 + t22^2, the squared maximal CHSH value divided by 4.
double chsh_quantity(const DensityMatrix& rho);
bool chsh_local(const DensityMatrix& rho);

/// Largest entrywise |a - b|.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace polyloc
