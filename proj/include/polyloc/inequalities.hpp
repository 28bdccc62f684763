// Sign functions, correlators and the polygon inequality family.
#pragma once

#include "polyloc/linalg.hpp"
#include "polyloc/measurements.hpp"
#include "polyloc/network.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polyloc {

inline constexpr double kViolationTol = 1e-9;

/// (-1)^{f(s, o)} for s in {0,1} and a four-valued outcome o = 2 r1 + r2.
/// Stored as an 8-bit mask; bit s*4+o set means sign -1.
class SignFunction {
 public:
  constexpr SignFunction() = default;
  constexpr explicit SignFunction(std::uint8_t minus_mask) : mask_(minus_mask) {}

  /// Eight characters '+'/'-' in (s, r1, r2) lexicographic order.
  static SignFunction parse(std::string_view text);
  /// Sign table of an integer-valued f(s, r1, r2); only its parity is kept.
  static SignFunction from_integer(const std::function<long(int, int, int)>& f);

  [[nodiscard]] constexpr int sign(int s, int outcome) const noexcept {
    return ((mask_ >> (s * 4 + outcome)) & 1U) ? -1 : 1;
  }
  [[nodiscard]] constexpr std::uint8_t mask() const noexcept { return mask_; }
  [[nodiscard]] std::string to_string() const;

  /// Negates the whole table.
  [[nodiscard]] constexpr SignFunction flipped() const noexcept {
    return SignFunction(static_cast<std::uint8_t>(~mask_));
  }
  /// Table seen through relabeled outcomes: result(s, k) = this(s, labels[k]).
  [[nodiscard]] SignFunction relabeled(const OutcomeLabels& labels) const;

  friend constexpr bool operator==(SignFunction, SignFunction) = default;

 private:
  std::uint8_t mask_ = 0;
};

/// F11, H11, F17, F40.
SignFunction named_sign_function(std::string_view name);

struct SignTriple {
  SignFunction f, g, h;
};

/// Dash-separated names such as "F11-F11-H11", or a single 8-char table.
std::vector<SignFunction> parse_sign_list(std::string_view text);

/// Three-entry form of parse_sign_list.
SignTriple parse_sign_triple(std::string_view text);

struct InequalityResult {
  double i1 = 0.0;
  double i2 = 0.0;
  double s_value = 0.0;
  bool violated = false;
};

InequalityResult make_result(double i1, double i2);

/// Signed sum over all 64 outcomes with exponents (e1, e2, e3) passed to
/// f, g, h respectively.
double correlator(const ProbabilityTable& p, const SignFunction& f, const SignFunction& g,
                  const SignFunction& h, int e1, int e2, int e3);

/// Same for an n-party table with one exponent per party.
double correlator(const ProbabilityTable& p, std::span<const SignFunction> fs,
                  std::span<const int> exponents);

/// I_j = 1/4 sum_{i,k} (-1)^{j(i+k)} <C1^i C2^{j-1} C3^k>, j = 1, 2.
InequalityResult evaluate_trilocal(const ProbabilityTable& p, const SignFunction& f,
                                   const SignFunction& g, const SignFunction& h);
InequalityResult evaluate_trilocal(const ProbabilityTable& p, const SignTriple& signs);

/// I_{j,n} = 2^{1-n} sum over bits i_s (s != center) of
/// (-1)^{j sum i_s} <prod C_s^{i_s} C_center^{j-1}>.
InequalityResult evaluate_ngon(const ProbabilityTable& p, std::span<const SignFunction> fs,
                               int center);

/// sqrt(prod t_i11 + prod t_i22) over the two largest singular values per state.
double linear_nlocal_value(std::span<const DensityMatrix> states);

struct SignSearchResult {
  InequalityResult result;
  std::vector<SignFunction> fs;
  int center = 0;
};

/// Maximizes s_value over every sign assignment for the table. The center
/// party's table is chosen optimally in closed form; the remaining parties
/// are enumerated up to a global flip each. Supported for n <= 4.
SignSearchResult search_signs(const ProbabilityTable& p, int center);

}  // namespace polyloc
