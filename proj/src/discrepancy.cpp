#include "polyloc/discrepancy.hpp"

#include "polyloc/inequalities.hpp"
#include "polyloc/network.hpp"
#include "polyloc/parallel.hpp"
#include "polyloc/spec_json.hpp"
#include "polyloc/states.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>

namespace polyloc {
namespace {

struct Range {
  std::string name;
  double lo;
  double hi;
};

// Either a scalar pair to compare after scale fitting, or (fitted = false)
// a direct pair whose difference is the gap.
using Evaluator = std::function<std::optional<std::pair<double, double>>(const std::vector<double>&)>;

struct Target {
  std::string id;
  std::string description;
  std::vector<Range> ranges;
  Evaluator eval;
  bool fitted = true;
};

double sq(double x) { return x * x; }
// Closed forms vanish exactly where the pipeline leaves ~1e-17 residue; the
// square root would blow that up to ~1e-8, so treat it as zero.
constexpr double kRootFloor = 1e-13;

double root_abs(double x) { return std::abs(x) < kRootFloor ? 0.0 : std::sqrt(std::abs(x)); }

InequalityResult floored(InequalityResult r) {
  r.s_value = root_abs(r.i1) + root_abs(r.i2);
  return r;
}

std::vector<FourOutcomePovm> labeled(const FourOutcomePovm& base, int n) {
  std::vector<FourOutcomePovm> out;
  for (const auto& l : label_convention("reference", n)) out.push_back(relabel_outcomes(base, l));
  return out;
}

InequalityResult triangle(const std::vector<DensityMatrix>& states, const FourOutcomePovm& basis,
                          const char* signs) {
  const ProbabilityTable p = joint_distribution(NetworkSpec(states, labeled(basis, 3)));
  return floored(evaluate_ngon(p, parse_sign_list(signs), 1));
}

InequalityResult identical_triangle(const DensityMatrix& rho, const FourOutcomePovm& basis,
                                    const char* signs) {
  return triangle(std::vector<DensityMatrix>(3, rho), basis, signs);
}

ComplexMatrix printed_noisy_gate(double p1, double p2) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m(2 * i + j, 2 * i + j) = 1.0 + (((i + j) % 2 == 0) ? p2 : -p2);
  }
  m(0, 3) = -2.0 * p1 * p2;
  m(3, 0) = -2.0 * p1 * p2;
  return m / 4.0;
}

DensityMatrix schmidt(double theta) {
  return make_state(state::Schmidt{std::cos(theta), std::sin(theta)});
}

// Two Schmidt sources and one product source whose qubits carry Bloch
// vectors (0, 0, z_first) and (0, 0, z_second).
std::optional<std::pair<double, double>> mixed_row(int product_source, const std::vector<double>& x,
                                                   double printed) {
  std::vector<DensityMatrix> states;
  int used = 0;
  for (int s = 0; s < 3; ++s) {
    if (s == product_source) {
      states.push_back(make_state(state::Product{Vec3(0, 0, x[2]), Vec3(0, 0, x[3])}));
    } else {
      states.push_back(schmidt(x[static_cast<std::size_t>(used++)]));
    }
  }
  const double a2 = x[4];
  const FourOutcomePovm basis = entangled_basis_from_alpha2(a2);
  return std::make_pair(printed, triangle(states, basis, "F17-F11-F11").s_value);
}

std::vector<Target> build_targets() {
  std::vector<Target> t;

  t.push_back({"entangled-basis-bell",
               "three phi+ sources, entangled basis, signs F11-F11-H11; printed sum of roots vs s_value",
               {{"alpha1", 0.02, 0.98}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a1 = x[0];
                 const double a2 = std::sqrt(1 - a1 * a1);
                 const double printed =
                     root_abs(2 * a1 * a1 - a2 * a2) +
                     root_abs(std::pow(a1, 6) - std::pow(a1, 4) * a2 * a2 + std::pow(a2, 6) +
                              a1 * a1 * (3 - std::pow(a2, 4)));
                 return std::make_pair(printed, identical_triangle(bell_state(BellKind::PhiPlus),
                                                                   entangled_basis(a1), "F11-F11-H11")
                                                    .s_value);
               }});

  t.push_back({"separable-two-param",
               "three separable_cc sources, two-parameter basis (orthogonalized fourth vector), signs F17-F11-F11",
               {{"alpha2", 0.0, 1.0}, {"alpha4", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a2 = x[0], a4 = x[1];
                 const double printed =
                     root_abs(1 + a2 * a2 + 2 * std::pow(a2, 4) - a4 * a4 - 6 * a2 * a2 * a4 * a4 +
                              4 * std::pow(a4, 4)) +
                     root_abs((1 - 2 * a2 * a2) * (1 + a2 * a2 - 3 * a4 * a4));
                 return std::make_pair(printed, identical_triangle(make_state(state::SeparableCc{}),
                                                                   two_param_basis(a2, a4), "F17-F11-F11")
                                                    .s_value);
               }});

  t.push_back({"two-param-orthogonality",
               "overlap |<b3|b4>| of the printed two-parameter basis vectors (zero for a valid basis)",
               {{"alpha4", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a4 = x[0];
                 const double a3 = std::sqrt(1 - a4 * a4);
                 // printed: b3 = a3|00> + a4|11>, b4 = a3|00> - a4|11>
                 return std::make_pair(0.0, std::abs(a3 * a3 - a4 * a4));
               },
               false});

  t.push_back({"noisy-gate",
               "three noisy-gate sources at p1 = 1, entangled basis, signs F17-F11-F11",
               {{"alpha2", 0.02, 0.98}, {"p2", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a2 = x[0], p2 = x[1];
                 const double printed = root_abs(p2 * (p2 - 3 * p2 * a2 * a2 - (1 - p2) * std::pow(a2, 4))) +
                                        root_abs(p2 * p2 * (p2 - a2 * a2 + 4 * std::pow(a2, 4)));
                 return std::make_pair(printed, identical_triangle(noisy_gate_state(1.0, p2),
                                                                   entangled_basis_from_alpha2(a2), "F17-F11-F11")
                                                    .s_value);
               }});

  t.push_back({"depolarized-rooted",
               "three depolarized phi- sources, entangled basis, signs F17-F11-F11; printed terms read under roots",
               {{"alpha2", 0.02, 0.98}, {"p3", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a2 = x[0], p3 = x[1];
                 const double printed = root_abs(p3 * p3 * (a2 * a2 - 4 * std::pow(a2, 4) + p3)) +
                                        root_abs(p3 * (p3 - 3 * a2 * a2 * p3 + std::pow(a2, 4) * (1 + p3)));
                 return std::make_pair(printed, identical_triangle(depolarize_bell(p3),
                                                                   entangled_basis_from_alpha2(a2), "F17-F11-F11")
                                                    .s_value);
               }});

  t.push_back({"depolarized-unrooted",
               "as depolarized-rooted but the printed absolute values summed without roots, vs |I1| + |I2|",
               {{"alpha2", 0.02, 0.98}, {"p3", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a2 = x[0], p3 = x[1];
                 const double printed = std::abs(p3 * p3 * (a2 * a2 - 4 * std::pow(a2, 4) + p3)) +
                                        std::abs(p3 * (p3 - 3 * a2 * a2 * p3 + std::pow(a2, 4) * (1 + p3)));
                 const InequalityResult r = identical_triangle(depolarize_bell(p3),
                                                               entangled_basis_from_alpha2(a2), "F17-F11-F11");
                 return std::make_pair(printed, std::abs(r.i1) + std::abs(r.i2));
               }});

  t.push_back({"depolarized-F40",
               "three depolarized phi- sources, entangled basis, signs F40-H11-H11; sqrt|W1| + 2 sqrt|W2| vs s_value",
               {{"alpha2", 0.02, 0.98}, {"p3", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a2 = x[0], p = x[1];
                 const double w1 = 2 + 6 * p + 2 * p * p - 2 * p * p * p + 8 * std::pow(a2, 4) * p * (1 + p) -
                                   8 * a2 * a2 * p * (2 + p);
                 const double w2 = p * (9 + a2 * a2 * (-22 - 4 * p) + p + std::pow(a2, 4) * (14 + 6 * p));
                 return std::make_pair(root_abs(w1) + 2 * root_abs(w2),
                                       identical_triangle(depolarize_bell(p), entangled_basis_from_alpha2(a2),
                                                          "F40-H11-H11")
                                           .s_value);
               }});

  t.push_back({"inefficient-detection",
               "three phi+ sources, entangled basis with detection efficiency p4, signs F17-F11-F11",
               {{"alpha2", 0.02, 0.98}, {"p4", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a2 = x[0], p4 = x[1];
                 const double printed =
                     root_abs(p4 * p4 * (3 * a2 * a2 * p4 - std::pow(a2, 4) * (1 - p4) - p4)) +
                     root_abs((1 - a2 * a2 + 4 * std::pow(a2, 4)) * std::pow(p4, 3));
                 return std::make_pair(printed, identical_triangle(bell_state(BellKind::PhiPlus),
                                                                   inefficient_povm(entangled_basis_from_alpha2(a2), p4),
                                                                   "F17-F11-F11")
                                                    .s_value);
               }});

  t.push_back({"bell-diagonal",
               "three Bell-diagonal sources with zero phi- weight, entangled basis, signs F17-F11-F11",
               {{"w1", 0.0, 1.0}, {"w2", 0.0, 1.0}, {"alpha2", 0.02, 0.98}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double w1 = x[0], w2 = x[1], a2 = x[2];
                 if (w1 + w2 > 1.0 + 1e-12) return std::nullopt;
                 const double w4 = std::max(0.0, 1.0 - w1 - w2);
                 const double c = 1 - 2 * w2;
                 const double printed =
                     root_abs(c * c - 3 * a2 * a2 * c * c + std::pow(a2, 4) * (2 - 6 * w2 + 4 * w2 * w2)) +
                     root_abs(c * c * (-1 - a2 * a2 + 4 * std::pow(a2, 4) + 2 * w2));
                 const DensityMatrix rho = make_state(state::BellDiagonal{{w1, w2, 0.0, w4}});
                 return std::make_pair(printed,
                                       identical_triangle(rho, entangled_basis_from_alpha2(a2), "F17-F11-F11").s_value);
               }});

  t.push_back({"linear-noisy-gate",
               "linear-chain value for three noisy-gate sources vs the printed maximum over axis orderings",
               {{"p1", 0.0, 1.0}, {"p2", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double p1 = x[0], p2 = x[1];
                 const double printed = std::max(std::sqrt(2 * std::pow(p1 * p2, 3)),
                                                 std::pow(p2, 1.5) * std::sqrt(1 + std::pow(p1, 3)));
                 const std::vector<DensityMatrix> states(3, noisy_gate_state(p1, p2));
                 return std::make_pair(printed, linear_nlocal_value(states));
               }});

  t.push_back({"square",
               "four phi+ sources, entangled basis, signs H11-F11-F11-H11 with the second party distinguished",
               {{"alpha2", 0.02, 0.98}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double a2 = x[0];
                 const double printed = root_abs(2 - 5 * a2 * a2 + 8 * std::pow(a2, 4)) +
                                        root_abs(a2 * a2 * (3 - 2 * a2 * a2));
                 const std::vector<DensityMatrix> states(4, bell_state(BellKind::PhiPlus));
                 const ProbabilityTable p =
                     joint_distribution(NetworkSpec(states, labeled(entangled_basis_from_alpha2(a2), 4)));
                 const auto fs = parse_sign_list("H11-F11-F11-H11");
                 return std::make_pair(printed, floored(evaluate_ngon(p, fs, 1)).s_value);
               }});

  t.push_back({"noisy-gate-matrix",
               "printed noisy-gate density matrix vs the channel composition (max entry difference)",
               {{"p1", 0.0, 1.0}, {"p2", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 return std::make_pair(0.0, max_abs_diff(printed_noisy_gate(x[0], x[1]),
                                                         noisy_gate_state(x[0], x[1]).matrix()));
               },
               false});

  t.push_back({"noisy-gate-tensor",
               "correlation tensor diag(-p1 p2, p1 p2, p2) vs bloch_decompose (max entry difference)",
               {{"p1", 0.0, 1.0}, {"p2", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double p1 = x[0], p2 = x[1];
                 Mat3 expected = Mat3::Zero();
                 expected.diagonal() << -p1 * p2, p1 * p2, p2;
                 const Mat3 got = bloch_decompose(noisy_gate_state(p1, p2)).corr;
                 return std::make_pair(0.0, (got - expected).cwiseAbs().maxCoeff());
               },
               false});

  t.push_back({"bell-diagonal-tensor",
               "printed Bell-diagonal correlation matrix vs bloch_decompose (max entry difference)",
               {{"w1", 0.0, 1.0}, {"w2", 0.0, 1.0}, {"w3", 0.0, 1.0}},
               [](const std::vector<double>& x) -> std::optional<std::pair<double, double>> {
                 const double w1 = x[0], w2 = x[1], w3 = x[2];
                 if (w1 + w2 + w3 > 1.0 + 1e-12) return std::nullopt;
                 const double w4 = std::max(0.0, 1.0 - w1 - w2 - w3);
                 Mat3 printed = Mat3::Zero();
                 printed.diagonal() << 1 - 2 * (w1 + w3), 1 - 2 * (w2 + w3), 1 - 2 * (w1 + w2);
                 const Mat3 got = bloch_decompose(make_state(state::BellDiagonal{{w1, w2, w3, w4}})).corr;
                 return std::make_pair(0.0, (got - printed).cwiseAbs().maxCoeff());
               },
               false});

  // Two Schmidt sources tau1|00> + tau2|11> (angles theta) and one product
  // source with z-polarized qubits.
  t.push_back({"mixed-pure-product-third",
               "Schmidt sources 1 and 2, product source 3; signs F17-F11-F11",
               {{"theta1", 0.05, 1.5}, {"theta2", 0.05, 1.5}, {"z5", -1.0, 1.0}, {"z6", -1.0, 1.0}, {"alpha2", 0.02, 0.98}},
               [](const std::vector<double>& x) {
                 const double t11 = sq(std::cos(x[0])), t21 = sq(std::sin(x[0]));
                 const double t12 = sq(std::cos(x[1])), t22 = sq(std::sin(x[1]));
                 const double u53 = x[2], u63 = x[3], a = sq(x[4]);
                 const double printed =
                     (root_abs(t11 * t22 * (1 - a * (1 + u53)) * (1 - a * (1 - u63) + u63)) +
                      root_abs(u53 * ((-1 + 3 * a - 2 * a * a) * t21 * t22 * (-1 + u63) +
                                      (1 - 2 * t21 + 2 * a * (-1 + t21)) * t12 * (-1 + u63 + a * (1 + u63))))) /
                     std::sqrt(2.0);
                 return mixed_row(2, x, printed);
               }});

  t.push_back({"mixed-pure-product-first",
               "Schmidt sources 2 and 3, product source 1; signs F17-F11-F11",
               {{"theta2", 0.05, 1.5}, {"theta3", 0.05, 1.5}, {"z1", -1.0, 1.0}, {"z2", -1.0, 1.0}, {"alpha2", 0.02, 0.98}},
               [](const std::vector<double>& x) {
                 const double t12 = sq(std::cos(x[0])), t22 = sq(std::sin(x[0]));
                 const double t13 = sq(std::cos(x[1])), t23 = sq(std::sin(x[1]));
                 const double u13 = x[2], u23 = x[3], a = sq(x[4]);
                 const double printed =
                     (root_abs(t22 * (-a * a * t23 * (-1 + u13) - t12 * u13 + a * (t23 * u13 + t12 * (1 + u13))) *
                               (1 + u23)) +
                      root_abs(u13 * (t23 * (2 - t22 * (1 + u23)) +
                                      2 * a * a * (t22 * t23 * (1 - u23) - t12 * t13 * (1 + u23)) -
                                      a * (2 * (-t12) * t13 + t23 * (2 + t22 * (1 - 5 * u23) + 2 * u23))))) /
                     std::sqrt(2.0);
                 return mixed_row(0, x, printed);
               }});

  t.push_back({"mixed-pure-product-second",
               "Schmidt sources 1 and 3, product source 2; signs F17-F11-F11",
               {{"theta1", 0.05, 1.5}, {"theta3", 0.05, 1.5}, {"z3", -1.0, 1.0}, {"z4", -1.0, 1.0}, {"alpha2", 0.02, 0.98}},
               [](const std::vector<double>& x) {
                 const double t11 = sq(std::cos(x[0])), t21 = sq(std::sin(x[0]));
                 const double t13 = sq(std::cos(x[1])), t23 = sq(std::sin(x[1]));
                 const double u33 = x[2], u43 = x[3], a = sq(x[4]);
                 const double printed =
                     (root_abs(-t11 * (2 * t13 * u33 + 2 * a * a * t13 * (1 + u33) -
                                       a * (t23 * (-1 + u33) + t13 * (1 + 5 * u33))) *
                               (-1 + u43)) +
                      root_abs((2 * t23 * u33 + a * (-t23 * (-1 + u33) + t13 * (1 + u33))) *
                               (1 + t21 * (-1 - 3 * u43) + u43 + a * (-2 + (-2 + 4 * t21) * u43)))) /
                     std::sqrt(2.0);
                 return mixed_row(1, x, printed);
               }});

  return t;
}

const std::vector<Target>& targets() {
  static const std::vector<Target> all = build_targets();
  return all;
}

const Target& find_target(const std::string& id) {
  for (const auto& t : targets()) {
    if (t.id == id) return t;
  }
  throw std::invalid_argument("unknown discrepancy target '" + id + "'");
}

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

KnownDiscrepancies load_known_discrepancies(const std::filesystem::path& path) {
  KnownDiscrepancies out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string id = trim(line.substr(0, colon));
    if (!id.empty()) out[id] = trim(line.substr(colon + 1));
  }
  return out;
}

std::vector<std::string> discrepancy_targets() {
  std::vector<std::string> ids;
  for (const auto& t : targets()) ids.push_back(t.id);
  return ids;
}

std::string describe_target(const std::string& id) { return find_target(id).description; }

TargetReport discrepancy_report(const std::string& id, int density, const KnownDiscrepancies& known) {
  const Target& target = find_target(id);
  if (density < 2) throw std::invalid_argument("discrepancy grid density must be at least 2");
  const std::size_t d = target.ranges.size();
  const int per_axis = std::clamp(static_cast<int>(std::floor(std::pow(2e4, 1.0 / static_cast<double>(d)))), 3, density);

  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_axis);

  struct Sample {
    std::vector<double> x;
    std::optional<std::pair<double, double>> values;
  };
  std::vector<Sample> samples(total);
  parallel_for(total, [&](std::size_t flat) {
    std::vector<double> x(d);
    std::size_t rem = flat;
    for (std::size_t i = d; i-- > 0;) {
      const auto k = static_cast<double>(rem % static_cast<std::size_t>(per_axis));
      rem /= static_cast<std::size_t>(per_axis);
      const Range& r = target.ranges[i];
      x[i] = r.lo + (r.hi - r.lo) * k / (per_axis - 1);
    }
    samples[flat].values = target.eval(x);
    samples[flat].x = std::move(x);
  });

  TargetReport report;
  report.target = id;
  report.description = target.description;
  report.fitted = target.fitted;
  if (target.fitted) {
    double num = 0.0, den = 0.0;
    for (const auto& s : samples) {
      if (!s.values) continue;
      num += s.values->first * s.values->second;
      den += s.values->second * s.values->second;
    }
    report.scale = den > 0.0 ? num / den : 1.0;
  }
  report.worst.target = id;
  report.worst.gap = -1.0;
  for (const auto& s : samples) {
    if (!s.values) continue;
    ++report.points;
    const auto [printed, computed] = *s.values;
    const double gap = target.fitted ? relative_gap(printed, report.scale * computed) : std::abs(computed);
    if (gap > report.worst.gap) {
      report.worst.gap = gap;
      report.worst.printed_value = printed;
      report.worst.computed_value = computed;
      report.worst.point.clear();
      for (std::size_t i = 0; i < d; ++i) report.worst.point.emplace_back(target.ranges[i].name, s.x[i]);
    }
  }
  report.max_gap = std::max(0.0, report.worst.gap);
  if (const auto it = known.find(id); it != known.end()) {
    report.known = true;
    report.known_note = it->second;
  }
  report.pass = report.max_gap < kDiscrepancyTol || report.known;
  return report;
}

}  // namespace polyloc
