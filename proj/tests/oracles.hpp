// Independent reference computations used by the tests. Nothing here calls
// into the library's contraction or enumeration code.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Vec4 = Eigen::Vector4cd;

inline Vec4 random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec4 v;
  for (int i = 0; i < 4; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

/// Columns form a Haar-ish random orthonormal basis of C^4.
inline std::array<Vec4, 4> random_basis(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix4cd m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = cplx(g(rng), g(rng));
  }
  const Eigen::Matrix4cd q = Eigen::HouseholderQR<Eigen::Matrix4cd>(m).householderQ();
  return {q.col(0), q.col(1), q.col(2), q.col(3)};
}

/// Brute-force Kronecker product from the index definition.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Outcome distribution of a pure polygon network by summing amplitudes over
/// every computational-basis assignment of the 2n source qubits. Source i
/// emits amplitude psi_i(x, y) with x going to party i and y to party i+1;
/// party i projects its (y of source i-1, x of source i) pair onto basis[i][o].
/// Party 0 is the most significant base-4 digit of the returned index.
inline std::vector<double> statevector_distribution(const std::vector<Vec4>& sources,
                                                    const std::vector<std::array<Vec4, 4>>& bases) {
  const int n = static_cast<int>(sources.size());
  std::size_t outcomes = 1;
  for (int i = 0; i < n; ++i) outcomes *= 4;
  std::vector<double> probs(outcomes, 0.0);
  for (std::size_t flat = 0; flat < outcomes; ++flat) {
    std::vector<int> o(static_cast<std::size_t>(n));
    std::size_t rem = flat;
    for (int k = n - 1; k >= 0; --k) {
      o[static_cast<std::size_t>(k)] = static_cast<int>(rem % 4);
      rem /= 4;
    }
    cplx amp = 0.0;
    for (std::size_t bits = 0; bits < (std::size_t{1} << (2 * n)); ++bits) {
      auto x = [&](int i) { return static_cast<int>((bits >> (2 * i + 1)) & 1U); };
      auto y = [&](int i) { return static_cast<int>((bits >> (2 * i)) & 1U); };
      cplx term = 1.0;
      for (int i = 0; i < n; ++i) term *= sources[static_cast<std::size_t>(i)](2 * x(i) + y(i));
      for (int i = 0; i < n; ++i) {
        const int prev = (i + n - 1) % n;
        const Vec4& b = bases[static_cast<std::size_t>(i)][static_cast<std::size_t>(o[static_cast<std::size_t>(i)])];
        term *= std::conj(b(2 * y(prev) + x(i)));
      }
      amp += term;
    }
    probs[flat] = std::norm(amp);
  }
  return probs;
}

}  // namespace oracle
