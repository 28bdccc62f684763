#include "polyloc/lhv.hpp"

#include "polyloc/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace polyloc {
namespace {

constexpr double kNormTol = 1e-12;

template <std::size_t N>
std::array<double, N> dirichlet_fixed(std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::array<double, N> out{};
  double total = 0.0;
  for (auto& x : out) total += (x = ex(rng));
  for (auto& x : out) x /= total;
  return out;
}

std::vector<double> dirichlet(std::mt19937_64& rng, int k) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> out(static_cast<std::size_t>(k));
  double total = 0.0;
  for (auto& x : out) total += (x = ex(rng));
  for (auto& x : out) x /= total;
  return out;
}

void check_distribution(std::span<const double> d, const char* what) {
  double total = 0.0;
  for (const double x : d) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + " has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kNormTol) {
    throw std::invalid_argument(std::string(what) + " does not sum to 1");
  }
}

}  // namespace

const std::array<double, 4>& LhvModel::response(int party, int l_prev, int l_own) const {
  return responses.at(static_cast<std::size_t>(party))
      .at(static_cast<std::size_t>(l_prev * cardinality(party) + l_own));
}

void LhvModel::validate() const {
  const int n = parties();
  if (n < kMinParties || n > kMaxParties) throw std::invalid_argument("LHV model: bad party count");
  if (static_cast<int>(responses.size()) != n) {
    throw std::invalid_argument("LHV model needs one response table per party");
  }
  std::size_t states = 1;
  for (int i = 0; i < n; ++i) {
    if (cardinality(i) < 1) throw std::invalid_argument("LHV model: empty hidden-variable support");
    check_distribution(source_dists[static_cast<std::size_t>(i)], "source distribution");
    states *= static_cast<std::size_t>(cardinality(i));
    if (states > kMaxHiddenStates) throw std::invalid_argument("LHV model: hidden state space too large");
  }
  for (int i = 0; i < n; ++i) {
    const int prev = (i - 1 + n) % n;
    const auto& rows = responses[static_cast<std::size_t>(i)];
    if (rows.size() != static_cast<std::size_t>(cardinality(prev) * cardinality(i))) {
      throw std::invalid_argument("LHV model: response table has the wrong number of rows");
    }
    for (const auto& row : rows) check_distribution(row, "response row");
  }
}

LhvModel sample_model(int n, int max_cardinality, std::uint64_t seed) {
  if (n < kMinParties || n > kMaxParties) throw std::invalid_argument("sample_model: bad party count");
  if (max_cardinality < 1) throw std::invalid_argument("sample_model: max_cardinality must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> card(1, max_cardinality);
  LhvModel m;
  std::vector<int> cards(static_cast<std::size_t>(n));
  for (auto& c : cards) c = card(rng);
  for (int i = 0; i < n; ++i) m.source_dists.push_back(dirichlet(rng, cards[static_cast<std::size_t>(i)]));
  m.responses.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int prev = (i - 1 + n) % n;
    const int rows = cards[static_cast<std::size_t>(prev)] * cards[static_cast<std::size_t>(i)];
    auto& r = m.responses[static_cast<std::size_t>(i)];
    r.reserve(static_cast<std::size_t>(rows));
    for (int k = 0; k < rows; ++k) r.push_back(dirichlet_fixed<4>(rng));
  }
  return m;
}

ProbabilityTable model_distribution(const LhvModel& model) {
  model.validate();
  const int n = model.parties();
  std::vector<int> lam(static_cast<std::size_t>(n), 0);
  std::vector<double> total(std::size_t{1} << (2 * n), 0.0);
  std::vector<double> joint;
  std::vector<double> grown;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < n; ++i) {
      weight *= model.source_dists[static_cast<std::size_t>(i)][static_cast<std::size_t>(lam[static_cast<std::size_t>(i)])];
    }
    if (weight > 0.0) {
      // Outer product of the conditional party distributions, party 0 most significant.
      joint.assign(1, weight);
      for (int i = 0; i < n; ++i) {
        const int prev = (i - 1 + n) % n;
        const auto& row = model.response(i, lam[static_cast<std::size_t>(prev)], lam[static_cast<std::size_t>(i)]);
        grown.resize(joint.size() * 4);
        for (std::size_t a = 0; a < joint.size(); ++a) {
          for (std::size_t o = 0; o < 4; ++o) grown[a * 4 + o] = joint[a] * row[o];
        }
        joint.swap(grown);
      }
      for (std::size_t k = 0; k < total.size(); ++k) total[k] += joint[k];
    }
    int pos = n - 1;
    while (pos >= 0 && ++lam[static_cast<std::size_t>(pos)] == model.cardinality(pos)) {
      lam[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return ProbabilityTable(n, std::move(total));
}

std::string to_json(const LhvModel& model) {
  nlohmann::json j;
  j["n"] = model.parties();
  j["source_dists"] = model.source_dists;
  nlohmann::json responses = nlohmann::json::array();
  for (const auto& party : model.responses) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : party) rows.push_back(row);
    responses.push_back(rows);
  }
  j["responses"] = responses;
  return j.dump(2);
}

LhvModel lhv_model_from_json(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  LhvModel m;
  m.source_dists = j.at("source_dists").get<std::vector<std::vector<double>>>();
  for (const auto& party : j.at("responses")) {
    std::vector<std::array<double, 4>> rows;
    for (const auto& row : party) rows.push_back(row.get<std::array<double, 4>>());
    m.responses.push_back(std::move(rows));
  }
  if (j.contains("n") && j.at("n").get<int>() != m.parties()) {
    throw std::invalid_argument("LHV model JSON: n disagrees with the source list");
  }
  m.validate();
  return m;
}

std::uint64_t model_seed(std::uint64_t suite_seed, int index) {
  // splitmix64 step
  std::uint64_t z = suite_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

LhvSuiteReport run_lhv_suite(const LhvSuiteOptions& options) {
  const int n = options.n;
  if (options.models < 0 || options.sign_draws < 1) {
    throw std::invalid_argument("LHV suite: model and sign-draw counts must be positive");
  }
  std::vector<int> centers;
  if (n == 3) {
    centers = {1};
  } else {
    for (int t = 0; t < n; ++t) centers.push_back(t);
  }

  struct PerModel {
    double max_s = 0.0;
    long evaluations = 0;
    std::vector<LhvViolation> violations;
  };
  std::vector<PerModel> per(static_cast<std::size_t>(options.models));

  parallel_for(per.size(), [&](std::size_t idx) {
    const int index = static_cast<int>(idx);
    const std::uint64_t seed = model_seed(options.seed, index);
    const LhvModel model = sample_model(n, options.max_cardinality, seed);
    const ProbabilityTable table = model_distribution(model);
    std::mt19937_64 rng(seed ^ 0x5157A7E5ULL);
    std::uniform_int_distribution<int> byte(0, 255);
    PerModel& out = per[idx];
    std::vector<SignFunction> fs(static_cast<std::size_t>(n));
    for (int d = 0; d < options.sign_draws; ++d) {
      for (auto& f : fs) f = SignFunction(static_cast<std::uint8_t>(byte(rng)));
      for (const int t : centers) {
        const InequalityResult r = evaluate_ngon(table, fs, t);
        ++out.evaluations;
        out.max_s = std::max(out.max_s, r.s_value);
        if (r.violated) out.violations.push_back({index, seed, fs, t, r});
      }
    }
  });

  LhvSuiteReport report;
  for (const auto& p : per) {
    report.evaluations += p.evaluations;
    report.max_s = std::max(report.max_s, p.max_s);
    report.violations.insert(report.violations.end(), p.violations.begin(), p.violations.end());
  }

  if (!options.dump_dir.empty() && !report.violations.empty()) {
    std::filesystem::create_directories(options.dump_dir);
    for (const auto& v : report.violations) {
      const LhvModel model = sample_model(n, options.max_cardinality, v.model_seed);
      nlohmann::json j = nlohmann::json::parse(to_json(model));
      nlohmann::json signs = nlohmann::json::array();
      for (const auto& f : v.fs) signs.push_back(f.to_string());
      j["signs"] = signs;
      j["center"] = v.center;
      j["model_seed"] = v.model_seed;
      j["i1"] = v.result.i1;
      j["i2"] = v.result.i2;
      j["s_value"] = v.result.s_value;
      const auto path = options.dump_dir / ("lhv_violation_n" + std::to_string(n) + "_m" +
                                            std::to_string(v.model_index) + "_t" +
                                            std::to_string(v.center) + ".json");
      std::ofstream(path) << j.dump(2) << '\n';
      report.dumped.push_back(path);
    }
  }
  return report;
}

}  // namespace polyloc
