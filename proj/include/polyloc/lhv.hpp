// Finite-support n-local hidden-variable models on the polygon.
//
// Source i carries lambda_i; party i responds to (lambda_{i-1}, lambda_i),
// indices mod n, which mirrors the quantum wiring in network.hpp.
#pragma once

#include "polyloc/inequalities.hpp"
#include "polyloc/network.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace polyloc {

inline constexpr std::size_t kMaxHiddenStates = std::size_t{1} << 20;
inline constexpr int kDefaultMaxCardinality = 8;

struct LhvModel {
  std::vector<std::vector<double>> source_dists;
  /// responses[i][l_prev * |Lambda_i| + l_i] = p(outcome | l_prev, l_i) for party i.
  std::vector<std::vector<std::array<double, 4>>> responses;

  [[nodiscard]] int parties() const noexcept { return static_cast<int>(source_dists.size()); }
  [[nodiscard]] int cardinality(int source) const {
    return static_cast<int>(source_dists.at(static_cast<std::size_t>(source)).size());
  }
  [[nodiscard]] const std::array<double, 4>& response(int party, int l_prev, int l_own) const;

  /// Throws std::invalid_argument on shape or normalization errors (1e-12).
  void validate() const;
};

LhvModel sample_model(int n, int max_cardinality, std::uint64_t seed);

/// Exact sum over all hidden-variable tuples.
ProbabilityTable model_distribution(const LhvModel& model);

std::string to_json(const LhvModel& model);
LhvModel lhv_model_from_json(std::string_view text);

struct LhvSuiteOptions {
  int n = 3;
  int models = 10000;
  int sign_draws = 20;
  int max_cardinality = kDefaultMaxCardinality;
  std::uint64_t seed = 1;
  /// Where violating models are written; empty disables dumping.
  std::filesystem::path dump_dir;
};

struct LhvViolation {
  int model_index = 0;
  std::uint64_t model_seed = 0;
  std::vector<SignFunction> fs;
  int center = 0;
  InequalityResult result;
};

struct LhvSuiteReport {
  long evaluations = 0;
  double max_s = 0.0;
  std::vector<LhvViolation> violations;
  std::vector<std::filesystem::path> dumped;
};

/// Samples models, draws random sign assignments and checks the polygon
/// bound for every choice of distinguished party (only the middle party
/// for n = 3, which is the trilocal form).
LhvSuiteReport run_lhv_suite(const LhvSuiteOptions& options);

/// Per-model seed derived from the suite seed.
std::uint64_t model_seed(std::uint64_t suite_seed, int index);

}  // namespace polyloc
