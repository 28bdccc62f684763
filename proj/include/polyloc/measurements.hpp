// Four-outcome joint measurements on a party's two qubits.
//
// Outcome k in 0..3 encodes the bit pair (o1, o2) = (k >> 1, k & 1). Basis
// constructors assign their listed vectors b1..b4 to outcomes 0..3 in order.
#pragma once

#include "polyloc/linalg.hpp"

#include <array>
#include <span>

namespace polyloc {

inline constexpr double kPovmCompletenessTol = 1e-10;

class FourOutcomePovm {
 public:
  /// Validates PSD (eigenvalues >= -1e-9) and completeness (sum = I4 within 1e-10).
  explicit FourOutcomePovm(std::array<ComplexMatrix, 4> elements);

  [[nodiscard]] const ComplexMatrix& element(int outcome) const {
    return elements_.at(static_cast<std::size_t>(outcome));
  }
  [[nodiscard]] const std::array<ComplexMatrix, 4>& elements() const noexcept { return elements_; }

 private:
  std::array<ComplexMatrix, 4> elements_;
};

using OutcomeLabels = std::array<int, 4>;

inline constexpr OutcomeLabels kNaturalLabels{0, 1, 2, 3};
/// b1..b4 -> (0,0), (0,1), (1,1), (1,0)
inline constexpr OutcomeLabels kGrayLabels{0, 1, 3, 2};

/// Projective measurement onto four orthonormal vectors, in outcome order.
FourOutcomePovm projective(std::span<const Eigen::Vector4cd, 4> basis);

/// |01>, |10>, a1|00> + a2|11>, a2|00> - a1|11> with a2 = sqrt(1 - a1^2);
/// requires 0 < alpha1 < 1.
FourOutcomePovm entangled_basis(double alpha1);

/// Same family parameterised by alpha2 = sqrt(1 - alpha1^2), 0 < alpha2 < 1.
FourOutcomePovm entangled_basis_from_alpha2(double alpha2);

/// |01>, |10>, |11>, |00>
FourOutcomePovm product_basis();

/// a1|01> + a2|10>, a2|01> - a1|10>, a3|00> + a4|11>, a4|00> - a3|11>
/// with a1 = sqrt(1 - a2^2), a3 = sqrt(1 - a4^2); alpha2, alpha4 in [0, 1].
FourOutcomePovm two_param_basis(double alpha2, double alpha4);

/// Detection inefficiency: E -> p4 E + (1 - p4)/4 I.
FourOutcomePovm inefficient_povm(const FourOutcomePovm& basis, double p4);

/// Outcome k of the result is outcome labels[k] of `povm`.
FourOutcomePovm relabel_outcomes(const FourOutcomePovm& povm, const OutcomeLabels& labels);

}  // namespace polyloc
