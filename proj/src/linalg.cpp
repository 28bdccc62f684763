#include "polyloc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polyloc {
namespace {

int qubit_count_for(Eigen::Index dim) {
  if (dim <= 0 || !std::has_single_bit(static_cast<unsigned long>(dim))) {
    throw std::invalid_argument("density matrix dimension " + std::to_string(dim) +
                                " is not a power of two");
  }
  const int k = std::countr_zero(static_cast<unsigned long>(dim));
  if (k > kMaxQubits) {
    throw std::invalid_argument("density matrix on " + std::to_string(k) +
                                " qubits exceeds the supported maximum");
  }
  return k;
}

// Bit of qubit q (big-endian) inside an index over k qubits.
constexpr int bit_of(unsigned idx, int q, int k) { return (idx >> (k - 1 - q)) & 1U; }

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("density matrix must be square");
  }
  qubits_ = qubit_count_for(m_.rows());
  if (!m_.allFinite()) {
    throw std::invalid_argument("density matrix has non-finite entries");
  }
  if (max_abs_diff(m_, m_.adjoint()) > kHermitianTol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  const cplx tr = m_.trace();
  if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  const ComplexMatrix herm = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPositivityTol) {
    throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix m, TrustedTag) : m_(std::move(m)) {
  qubits_ = qubit_count_for(m_.rows());
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix m) {
  return DensityMatrix(std::move(m), TrustedTag{});
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho.
  return m_.cwiseAbs2().sum();
}

const ComplexMatrix& pauli(int index) {
  static const std::array<ComplexMatrix, 4> paulis = [] {
    std::array<ComplexMatrix, 4> p;
    for (auto& m : p) m = ComplexMatrix::Zero(2, 2);
    p[0](0, 0) = 1.0;
    p[0](1, 1) = 1.0;
    p[1](0, 1) = 1.0;
    p[1](1, 0) = 1.0;
    p[2](0, 1) = cplx(0.0, -1.0);
    p[2](1, 0) = cplx(0.0, 1.0);
    p[3](0, 0) = 1.0;
    p[3](1, 1) = -1.0;
    return p;
  }();
  if (index < 0 || index > 3) throw std::out_of_range("pauli index must be 0..3");
  return paulis[static_cast<std::size_t>(index)];
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) return ComplexMatrix::Identity(1, 1);
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

std::vector<int> invert_permutation(std::span<const int> perm) {
  const int k = static_cast<int>(perm.size());
  std::vector<int> inv(perm.size(), -1);
  for (int j = 0; j < k; ++j) {
    const int p = perm[static_cast<std::size_t>(j)];
    if (p < 0 || p >= k || inv[static_cast<std::size_t>(p)] != -1) {
      throw std::invalid_argument("malformed qubit permutation");
    }
    inv[static_cast<std::size_t>(p)] = j;
  }
  return inv;
}

DensityMatrix permute_qubits(const DensityMatrix& rho, std::span<const int> perm) {
  const int k = rho.qubits();
  if (static_cast<int>(perm.size()) != k) {
    throw std::invalid_argument("permutation length does not match qubit count");
  }
  invert_permutation(perm);  // validates

  const auto dim = static_cast<unsigned>(rho.dim());
  // source[i]: input index whose qubit perm[j] carries output bit j.
  std::vector<unsigned> source(dim);
  for (unsigned out = 0; out < dim; ++out) {
    unsigned in = 0;
    for (int j = 0; j < k; ++j) {
      if (bit_of(out, j, k)) in |= 1U << (k - 1 - perm[static_cast<std::size_t>(j)]);
    }
    source[out] = in;
  }
  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out(rho.dim(), rho.dim());
  for (unsigned c = 0; c < dim; ++c) {
    for (unsigned r = 0; r < dim; ++r) out(r, c) = m(source[r], source[c]);
  }
  return DensityMatrix::trusted(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int k = rho.qubits();
  std::vector<bool> kept(static_cast<std::size_t>(k), false);
  for (const int q : keep) {
    if (q < 0 || q >= k) throw std::out_of_range("partial_trace: qubit index out of range");
    if (kept[static_cast<std::size_t>(q)]) {
      throw std::invalid_argument("partial_trace: duplicate qubit index");
    }
    kept[static_cast<std::size_t>(q)] = true;
  }
  std::vector<int> traced;
  for (int q = 0; q < k; ++q) {
    if (!kept[static_cast<std::size_t>(q)]) traced.push_back(q);
  }

  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  const unsigned dk = 1U << nk;
  const unsigned dt = 1U << nt;

  auto compose = [&](unsigned kept_bits, unsigned traced_bits) {
    unsigned idx = 0;
    for (int j = 0; j < nk; ++j) {
      if ((kept_bits >> (nk - 1 - j)) & 1U) idx |= 1U << (k - 1 - keep[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < nt; ++j) {
      if ((traced_bits >> (nt - 1 - j)) & 1U) idx |= 1U << (k - 1 - traced[static_cast<std::size_t>(j)]);
    }
    return idx;
  };

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (unsigned t = 0; t < dt; ++t) {
    for (unsigned c = 0; c < dk; ++c) {
      const unsigned mc = compose(c, t);
      for (unsigned r = 0; r < dk; ++r) out(r, c) += m(compose(r, t), mc);
    }
  }
  return DensityMatrix::trusted(std::move(out));
}

BlochForm bloch_decompose(const DensityMatrix& rho) {
  if (rho.qubits() != 2) throw std::invalid_argument("bloch_decompose needs a two-qubit state");
  const ComplexMatrix& m = rho.matrix();
  BlochForm form;
  for (int i = 1; i <= 3; ++i) {
    form.a(i - 1) = (m * kron(pauli(i), pauli(0))).trace().real();
    form.b(i - 1) = (m * kron(pauli(0), pauli(i))).trace().real();
    for (int j = 1; j <= 3; ++j) {
      form.corr(i - 1, j - 1) = (m * kron(pauli(i), pauli(j))).trace().real();
    }
  }
  return form;
}

ComplexMatrix bloch_reconstruct(const BlochForm& form) {
  ComplexMatrix out = kron(pauli(0), pauli(0));
  for (int i = 1; i <= 3; ++i) {
    out += form.a(i - 1) * kron(pauli(i), pauli(0));
    out += form.b(i - 1) * kron(pauli(0), pauli(i));
    for (int j = 1; j <= 3; ++j) out += form.corr(i - 1, j - 1) * kron(pauli(i), pauli(j));
  }
  return out / 4.0;
}

SingularTriple correlation_singular_values(const DensityMatrix& rho) {
  const BlochForm form = bloch_decompose(rho);
  const Vec3 sv = Eigen::JacobiSVD<Mat3>(form.corr).singularValues();  // descending
  return {sv(0), sv(1), sv(2)};
}

double chsh_quantity(const DensityMatrix& rho) {
  const SingularTriple t = correlation_singular_values(rho);
  return t.t11 * t.t11 + t.t22 * t.t22;
}

bool chsh_local(const DensityMatrix& rho) { return chsh_quantity(rho) <= 1.0 + 1e-9; }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace polyloc
