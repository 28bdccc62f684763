#include "polyloc/network.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace polyloc {
namespace {

constexpr double kClampTol = 1e-12;
constexpr double kSumTol = 1e-9;

// Contract party by party: Y holds the unmeasured parties' block, E acts on
// the leading two qubits. Tr[(E (x) R) Y] = Tr[R Z] with
// Z = sum_{a,a'} E(a,a') Y[a' block, a block].
void contract(const ComplexMatrix& y, std::span<const FourOutcomePovm> povms, std::size_t offset,
              std::size_t stride, std::vector<double>& out) {
  if (povms.empty()) {
    out[offset] = y(0, 0).real();
    return;
  }
  const Eigen::Index d = y.rows() / 4;
  for (int o = 0; o < 4; ++o) {
    const ComplexMatrix& e = povms.front().element(o);
    ComplexMatrix z = ComplexMatrix::Zero(d, d);
    for (Eigen::Index a = 0; a < 4; ++a) {
      for (Eigen::Index ap = 0; ap < 4; ++ap) {
        const cplx c = e(a, ap);
        if (c == cplx(0.0, 0.0)) continue;
        z.noalias() += c * y.block(ap * d, a * d, d, d);
      }
    }
    contract(z, povms.subspan(1), offset + static_cast<std::size_t>(o) * stride, stride / 4, out);
  }
}

}  // namespace

NetworkSpec::NetworkSpec(std::vector<DensityMatrix> sources, std::vector<FourOutcomePovm> povms)
    : sources_(std::move(sources)), povms_(std::move(povms)) {
  const auto n = static_cast<int>(sources_.size());
  if (n < kMinParties || n > kMaxParties) {
    throw std::invalid_argument("network size " + std::to_string(n) + " outside [" +
                                std::to_string(kMinParties) + ", " +
                                std::to_string(kMaxParties) + "]");
  }
  if (povms_.size() != sources_.size()) {
    throw std::invalid_argument("network needs one POVM per source");
  }
  for (const auto& s : sources_) {
    if (s.qubits() != 2) throw std::invalid_argument("network sources must be two-qubit states");
  }
}

ProbabilityTable::ProbabilityTable(int n, std::vector<double> probs)
    : n_(n), probs_(std::move(probs)) {
  if (n < 1 || n > kMaxParties) throw std::invalid_argument("probability table: bad party count");
  if (probs_.size() != (std::size_t{1} << (2 * n))) {
    throw std::invalid_argument("probability table needs 4^n entries");
  }
  double total = 0.0;
  for (double& p : probs_) {
    if (!std::isfinite(p) || p < -kClampTol) {
      throw std::invalid_argument("probability table has a negative or non-finite entry");
    }
    if (p < 0.0) p = 0.0;
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTol) {
    throw std::invalid_argument("probability table does not sum to 1");
  }
}

std::size_t ProbabilityTable::flat_index(std::span<const int> outcomes) const {
  if (static_cast<int>(outcomes.size()) != n_) {
    throw std::invalid_argument("outcome tuple length does not match party count");
  }
  std::size_t idx = 0;
  for (const int o : outcomes) {
    if (o < 0 || o > 3) throw std::out_of_range("outcome must be 0..3");
    idx = idx * 4 + static_cast<std::size_t>(o);
  }
  return idx;
}

double ProbabilityTable::at(std::span<const int> outcomes) const {
  return probs_[flat_index(outcomes)];
}

std::array<double, 4> ProbabilityTable::marginal(int party) const {
  if (party < 0 || party >= n_) throw std::out_of_range("party index out of range");
  std::array<double, 4> m{};
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    m[static_cast<std::size_t>(outcome_of(i, party))] += probs_[i];
  }
  return m;
}

ProbabilityTable ProbabilityTable::rotated(int shift) const {
  shift = ((shift % n_) + n_) % n_;
  std::vector<double> out(probs_.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    std::size_t j = 0;
    for (int k = 0; k < n_; ++k) j = j * 4 + static_cast<std::size_t>(outcome_of(i, (k + shift) % n_));
    out[j] = probs_[i];
  }
  return ProbabilityTable(n_, std::move(out));
}

ProbabilityTable ProbabilityTable::uniform(int n) {
  const std::size_t size = std::size_t{1} << (2 * n);
  return ProbabilityTable(n, std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

std::vector<int> wiring_permutation(int n) {
  std::vector<int> perm(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    perm[static_cast<std::size_t>(2 * i)] = 2 * ((i - 1 + n) % n) + 1;
    perm[static_cast<std::size_t>(2 * i + 1)] = 2 * i;
  }
  return perm;
}

DensityMatrix global_state(const NetworkSpec& spec) {
  std::vector<ComplexMatrix> factors;
  factors.reserve(spec.sources().size());
  for (const auto& s : spec.sources()) factors.push_back(s.matrix());
  const DensityMatrix tensor = DensityMatrix::trusted(kron_all(factors));
  const std::vector<int> perm = wiring_permutation(spec.size());
  return permute_qubits(tensor, perm);
}

ProbabilityTable joint_distribution(const NetworkSpec& spec) {
  const int n = spec.size();
  const DensityMatrix rho = global_state(spec);
  std::vector<double> probs(std::size_t{1} << (2 * n), 0.0);
  contract(rho.matrix(), spec.povms(), 0, std::size_t{1} << (2 * (n - 1)), probs);
  return ProbabilityTable(n, std::move(probs));
}

void write_csv(std::ostream& os, const ProbabilityTable& table) {
  const int n = table.parties();
  for (int k = 0; k < n; ++k) os << 'o' << (k + 1) << ',';
  os << "p\n";
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (int k = 0; k < n; ++k) os << table.outcome_of(i, k) << ',';
    os << table[i] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace polyloc
