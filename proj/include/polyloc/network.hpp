// Polygon networks: n two-qubit sources on the edges of an n-gon, one
// four-outcome measurement per vertex.
//
// Wiring: source i (0-based) sits between party i and party i+1 (mod n). Its
// first qubit goes to party i, its second to party i+1. Party i holds the
// local pair (second qubit of source i-1, first qubit of source i).
#pragma once

#include "polyloc/linalg.hpp"
#include "polyloc/measurements.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace polyloc {

inline constexpr int kMinParties = 3;
inline constexpr int kMaxParties = 6;

class NetworkSpec {
 public:
  NetworkSpec(std::vector<DensityMatrix> sources, std::vector<FourOutcomePovm> povms);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(sources_.size()); }
  [[nodiscard]] const std::vector<DensityMatrix>& sources() const noexcept { return sources_; }
  [[nodiscard]] const std::vector<FourOutcomePovm>& povms() const noexcept { return povms_; }

 private:
  std::vector<DensityMatrix> sources_;
  std::vector<FourOutcomePovm> povms_;
};

/// Joint distribution over n four-valued outcomes. Party 0 is the most
/// significant base-4 digit of the flat index.
class ProbabilityTable {
 public:
  /// Entries in [-1e-12, 0) are clamped to 0; anything lower, or a total
  /// farther than 1e-9 from 1, throws.
  ProbabilityTable(int n, std::vector<double> probs);

  [[nodiscard]] int parties() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
  [[nodiscard]] double operator[](std::size_t flat) const { return probs_[flat]; }
  [[nodiscard]] double at(std::span<const int> outcomes) const;
  [[nodiscard]] const std::vector<double>& values() const noexcept { return probs_; }

  [[nodiscard]] std::size_t flat_index(std::span<const int> outcomes) const;
  /// Outcome of `party` encoded in a flat index.
  [[nodiscard]] int outcome_of(std::size_t flat, int party) const noexcept {
    return static_cast<int>((flat >> (2 * (n_ - 1 - party))) & 3U);
  }

  [[nodiscard]] std::array<double, 4> marginal(int party) const;

  /// Table with party k of the result equal to party (k + shift) mod n of this one.
  [[nodiscard]] ProbabilityTable rotated(int shift) const;

  static ProbabilityTable uniform(int n);

 private:
  int n_;
  std::vector<double> probs_;
};

/// perm[j] = tensor-order qubit that becomes network-order qubit j.
std::vector<int> wiring_permutation(int n);

/// Sources tensored in order and rearranged so party i owns qubits 2i, 2i+1.
DensityMatrix global_state(const NetworkSpec& spec);

ProbabilityTable joint_distribution(const NetworkSpec& spec);

/// Header `o1,...,on,p`, one row per outcome tuple in flat-index order.
void write_csv(std::ostream& os, const ProbabilityTable& table);

}  // namespace polyloc
