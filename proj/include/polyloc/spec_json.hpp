// JSON network templates.
//
//   {
//     "n": 3,
//     "sources": {"kind": "bell", "which": "phi+"},          // or a list of n
//     "povms":   {"kind": "entangled", "alpha1": "$a1"},     // or a list of n
//     "labels":  "reference",                                // "natural" | "reference" | [[...4], ...]
//     "signs":   "F11-F11-H11",                              // names, 8-char tables, or "search"
//     "t": 2,                                                // 1-based distinguished party
//     "params":  {"a1": 0.9}
//   }
//
// Numeric fields accept numbers or expression strings over $-prefixed
// parameters, e.g. "1 - $w1 - $w2" or "sqrt(1 - $a^2)".
//
// State kinds: bell {which}, schmidt {tau1[, tau2]}, separable_cc,
// product {u: [x,y,z], v: [x,y,z]}, bell_diagonal {w: [psi-, phi+, phi-, psi+]},
// noisy_gate {p1, p2}, depolarized_bell {p3}.
// POVM kinds: entangled {alpha1 | alpha2}, product, two_param {alpha2, alpha4};
// any POVM may carry "p4" for detection inefficiency.
#pragma once

#include "polyloc/inequalities.hpp"
#include "polyloc/measurements.hpp"
#include "polyloc/network.hpp"
#include "polyloc/states.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polyloc {

using ParamMap = std::map<std::string, double, std::less<>>;

/// Evaluates an arithmetic expression: + - * / ^, parentheses, unary minus,
/// sqrt/sin/cos/abs, the constant pi and $name parameter references.
double eval_expression(std::string_view text, const ParamMap& params);

/// Per-party outcome labels of the named convention. "reference" is the
/// assignment under which the closed-form discrepancy targets come out:
/// b3/b4 swapped at the first and third party of the
/// triangle; at the square, b3/b4 swapped at the first party and both
/// pairs swapped at the third and fourth.
std::vector<OutcomeLabels> label_convention(std::string_view name, int n);

struct SignChoice {
  bool search = false;
  std::vector<SignFunction> fs;
  int center = 1;  // 0-based
};

/// "F11-F11-H11" style name lists or 8-character tables, or "search".
SignChoice parse_signs(const nlohmann::json& node, int n, std::optional<int> t_one_based);

StateSpec parse_state(const nlohmann::json& node, const ParamMap& params);
FourOutcomePovm parse_povm(const nlohmann::json& node, const ParamMap& params);

struct NetworkInstance {
  NetworkSpec spec;
  std::vector<StateSpec> state_specs;
  SignChoice signs;
};

class NetworkTemplate {
 public:
  explicit NetworkTemplate(nlohmann::json doc);
  static NetworkTemplate parse(std::string_view text);
  static NetworkTemplate load(const std::string& path);

  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] const ParamMap& defaults() const noexcept { return defaults_; }
  [[nodiscard]] const nlohmann::json& document() const noexcept { return doc_; }
  [[nodiscard]] const SignChoice& signs() const noexcept { return signs_; }

  /// Builds the network with `overrides` layered over the template's params.
  /// Throws std::invalid_argument when a parameter point is outside a
  /// constructor's domain.
  [[nodiscard]] NetworkInstance instantiate(const ParamMap& overrides = {}) const;

  /// Parameter names referenced anywhere in the template.
  [[nodiscard]] std::vector<std::string> referenced_params() const;

 private:
  nlohmann::json doc_;
  int n_ = 3;
  ParamMap defaults_;
  SignChoice signs_;
  std::vector<OutcomeLabels> labels_;
};

}  // namespace polyloc
