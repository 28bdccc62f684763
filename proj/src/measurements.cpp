#include "polyloc/measurements.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace polyloc {
namespace {

Eigen::Vector4cd basis_ket(int index) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(index) = 1.0;
  return v;
}

Eigen::Vector4cd superpose(double c0, int i0, double c1, int i1) {
  return c0 * basis_ket(i0) + c1 * basis_ket(i1);
}

double complement(double a) { return std::sqrt(std::max(0.0, 1.0 - a * a)); }

}  // namespace

FourOutcomePovm::FourOutcomePovm(std::array<ComplexMatrix, 4> elements)
    : elements_(std::move(elements)) {
  ComplexMatrix total = ComplexMatrix::Zero(4, 4);
  for (const auto& e : elements_) {
    if (e.rows() != 4 || e.cols() != 4) {
      throw std::invalid_argument("POVM elements must be 4x4");
    }
    if (max_abs_diff(e, e.adjoint()) > kHermitianTol) {
      throw std::invalid_argument("POVM element is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (e + e.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPositivityTol) {
      throw std::invalid_argument("POVM element is not positive semidefinite");
    }
    total += e;
  }
  if (max_abs_diff(total, ComplexMatrix::Identity(4, 4)) > kPovmCompletenessTol) {
    throw std::invalid_argument("POVM elements do not sum to the identity");
  }
}

FourOutcomePovm projective(std::span<const Eigen::Vector4cd, 4> basis) {
  std::array<ComplexMatrix, 4> elements;
  for (std::size_t k = 0; k < 4; ++k) elements[k] = basis[k] * basis[k].adjoint();
  return FourOutcomePovm(std::move(elements));
}

FourOutcomePovm entangled_basis(double alpha1) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0)) {
    throw std::invalid_argument("entangled_basis: alpha1 must lie in (0, 1)");
  }
  const double alpha2 = complement(alpha1);
  const std::array<Eigen::Vector4cd, 4> b{basis_ket(1), basis_ket(2),
                                          superpose(alpha1, 0, alpha2, 3),
                                          superpose(alpha2, 0, -alpha1, 3)};
  return projective(b);
}

FourOutcomePovm entangled_basis_from_alpha2(double alpha2) {
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) {
    throw std::invalid_argument("entangled_basis: alpha2 must lie in (0, 1)");
  }
  return entangled_basis(complement(alpha2));
}

FourOutcomePovm product_basis() {
  const std::array<Eigen::Vector4cd, 4> b{basis_ket(1), basis_ket(2), basis_ket(3), basis_ket(0)};
  return projective(b);
}

FourOutcomePovm two_param_basis(double alpha2, double alpha4) {
  if (!(alpha2 >= 0.0 && alpha2 <= 1.0 && alpha4 >= 0.0 && alpha4 <= 1.0)) {
    throw std::invalid_argument("two_param_basis: alpha2 and alpha4 must lie in [0, 1]");
  }
  const double alpha1 = complement(alpha2);
  const double alpha3 = complement(alpha4);
  const std::array<Eigen::Vector4cd, 4> b{
      superpose(alpha1, 1, alpha2, 2), superpose(alpha2, 1, -alpha1, 2),
      superpose(alpha3, 0, alpha4, 3), superpose(alpha4, 0, -alpha3, 3)};
  return projective(b);
}

FourOutcomePovm inefficient_povm(const FourOutcomePovm& basis, double p4) {
  if (!(p4 >= 0.0 && p4 <= 1.0)) {
    throw std::invalid_argument("inefficient_povm: p4 must lie in [0, 1]");
  }
  std::array<ComplexMatrix, 4> elements;
  for (int k = 0; k < 4; ++k) {
    elements[static_cast<std::size_t>(k)] =
        p4 * basis.element(k) + 0.25 * (1.0 - p4) * ComplexMatrix::Identity(4, 4);
  }
  return FourOutcomePovm(std::move(elements));
}

FourOutcomePovm relabel_outcomes(const FourOutcomePovm& povm, const OutcomeLabels& labels) {
  std::array<bool, 4> seen{};
  std::array<ComplexMatrix, 4> elements;
  for (std::size_t k = 0; k < 4; ++k) {
    const int src = labels[k];
    if (src < 0 || src > 3 || seen[static_cast<std::size_t>(src)]) {
      throw std::invalid_argument("outcome labels must be a permutation of 0..3");
    }
    seen[static_cast<std::size_t>(src)] = true;
    elements[k] = povm.element(src);
  }
  return FourOutcomePovm(std::move(elements));
}

}  // namespace polyloc
