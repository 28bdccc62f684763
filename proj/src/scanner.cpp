#include "polyloc/scanner.hpp"

#include "polyloc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace polyloc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, std::span<const double> x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kNegInf;
  } catch (const std::invalid_argument&) {
    return kNegInf;
  }
}

struct Candidate {
  double value;
  std::vector<double> x;
};

// Box-projected Nelder-Mead on -f. Returns the best vertex.
Candidate nelder_mead(const Objective& f, Candidate start, std::span<const double> lo,
                      std::span<const double> hi, std::span<const double> initial_step,
                      const MaximizeOptions& opt, long& evaluations) {
  const std::size_t d = start.x.size();
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < d; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  };
  auto value = [&](const std::vector<double>& x) {
    ++evaluations;
    return safe_eval(f, x);
  };

  std::vector<Candidate> simplex{start};
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> x = start.x;
    x[i] += initial_step[i];
    if (x[i] > hi[i]) x[i] = start.x[i] - initial_step[i];
    clamp(x);
    simplex.push_back({value(x), std::move(x)});
  }

  auto by_value = [](const Candidate& a, const Candidate& b) { return a.value > b.value; };
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    double size = 0.0;
    for (std::size_t k = 1; k <= d; ++k) {
      for (std::size_t i = 0; i < d; ++i) size = std::max(size, std::abs(simplex[k].x[i] - simplex[0].x[i]));
    }
    if (size < opt.step_tol) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[k].x[i] / static_cast<double>(d);
    }
    auto along = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = centroid[i] + t * (simplex[d].x[i] - centroid[i]);
      clamp(x);
      return x;
    };

    auto xr = along(-1.0);
    const double fr = value(xr);
    if (fr > simplex[0].value) {
      auto xe = along(-2.0);
      const double fe = value(xe);
      simplex[d] = (fe > fr) ? Candidate{fe, std::move(xe)} : Candidate{fr, std::move(xr)};
      continue;
    }
    if (fr > simplex[d - 1].value) {
      simplex[d] = {fr, std::move(xr)};
      continue;
    }
    const bool outside = fr > simplex[d].value;
    auto xc = along(outside ? -0.5 : 0.5);
    const double fc = value(xc);
    if (fc > std::max(outside ? fr : kNegInf, simplex[d].value)) {
      simplex[d] = {fc, std::move(xc)};
      continue;
    }
    for (std::size_t k = 1; k <= d; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        simplex[k].x[i] = simplex[0].x[i] + 0.5 * (simplex[k].x[i] - simplex[0].x[i]);
      }
      simplex[k].value = value(simplex[k].x);
    }
  }
  return *std::max_element(simplex.begin(), simplex.end(),
                           [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
}

std::string format_signs(const std::vector<SignFunction>& fs) {
  std::string out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) out += ' ';
    out += fs[i].to_string();
  }
  return out;
}

void require_pure(const DensityMatrix& rho) {
  if (std::abs(rho.purity() - 1.0) > 1e-9) {
    throw std::invalid_argument("entanglement detection needs pure states; a mixed source was given");
  }
}

}  // namespace

Axis parse_axis(std::string_view text) {
  std::vector<std::string> parts;
  std::stringstream ss{std::string(text)};
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 4) throw std::invalid_argument("axis must look like name:lo:hi:steps");
  Axis a{parts[0], std::stod(parts[1]), std::stod(parts[2]), std::stoi(parts[3])};
  if (!(a.lo < a.hi)) throw std::invalid_argument("axis '" + a.name + "': lo must be below hi");
  if (a.steps < 2) throw std::invalid_argument("axis '" + a.name + "': need at least 2 steps");
  return a;
}

PointResult evaluate_instance(const NetworkInstance& instance) {
  PointResult out;
  const ProbabilityTable table = joint_distribution(instance.spec);
  if (instance.signs.search) {
    SignSearchResult found = search_signs(table, instance.signs.center);
    out.result = found.result;
    out.fs = std::move(found.fs);
  } else {
    out.fs = instance.signs.fs;
    out.result = evaluate_ngon(table, out.fs, instance.signs.center);
  }
  out.valid = true;
  return out;
}

PointResult evaluate_template(const NetworkTemplate& tmpl, const ParamMap& params) {
  try {
    return evaluate_instance(tmpl.instantiate(params));
  } catch (const std::invalid_argument&) {
    return {};
  }
}

std::size_t grid_size(std::span<const Axis> axes) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.steps);
  return total;
}

std::vector<PointResult> sweep(const NetworkTemplate& tmpl, std::span<const Axis> axes,
                               const ParamMap& fixed, std::size_t first_row) {
  if (axes.empty()) throw std::invalid_argument("sweep needs at least one axis");
  const auto known = tmpl.referenced_params();
  for (const auto& a : axes) {
    if (std::find(known.begin(), known.end(), a.name) == known.end()) {
      throw std::invalid_argument("sweep axis '" + a.name + "' is not referenced by the network spec");
    }
  }
  const std::size_t total = grid_size(axes);
  if (first_row > total) throw std::invalid_argument("sweep: resume point past the end of the grid");

  std::vector<PointResult> rows(total - first_row);
  parallel_for(rows.size(), [&](std::size_t offset) {
    const std::size_t flat = first_row + offset;
    ParamMap params = fixed;
    std::vector<double> coords(axes.size());
    std::size_t rem = flat;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const int idx = static_cast<int>(rem % static_cast<std::size_t>(axes[k].steps));
      rem /= static_cast<std::size_t>(axes[k].steps);
      coords[k] = axes[k].at(idx);
      params[axes[k].name] = coords[k];
    }
    PointResult r = evaluate_template(tmpl, params);
    r.params = std::move(coords);
    rows[offset] = std::move(r);
  });
  return rows;
}

void write_sweep_header(std::ostream& os, std::span<const Axis> axes, bool with_signs) {
  for (const auto& a : axes) os << a.name << ',';
  os << "i1,i2,s_value,violated";
  if (with_signs) os << ",signs";
  os << '\n';
}

void write_sweep_rows(std::ostream& os, std::span<const Axis> axes, const std::vector<PointResult>& rows,
                      bool with_signs, bool gnuplot, std::size_t first_row) {
  const auto old_precision = os.precision(12);
  const std::size_t inner = grid_size(axes) / static_cast<std::size_t>(axes.front().steps);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = first_row + k;
    if (gnuplot && axes.size() > 1 && r > 0 && r % inner == 0) os << '\n';
    const auto& row = rows[k];
    for (const double p : row.params) os << p << ',';
    if (row.valid) {
      os << row.result.i1 << ',' << row.result.i2 << ',' << row.result.s_value << ','
         << (row.result.violated ? 1 : 0);
    } else {
      os << "nan,nan,nan,0";
    }
    if (with_signs) os << ',' << (row.valid ? format_signs(row.fs) : std::string());
    os << '\n';
  }
  os.precision(old_precision);
}

void write_sweep_csv(std::ostream& os, std::span<const Axis> axes,
                     const std::vector<PointResult>& rows, bool with_signs, bool gnuplot) {
  write_sweep_header(os, axes, with_signs);
  write_sweep_rows(os, axes, rows, with_signs, gnuplot);
}

double find_threshold(const NetworkTemplate& tmpl, const std::string& param, double lo, double hi,
                      const ParamMap& fixed, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("threshold bracket must satisfy lo < hi");
  auto excess = [&](double x) {
    ParamMap p = fixed;
    p[param] = x;
    const PointResult r = evaluate_template(tmpl, p);
    if (!r.valid) {
      throw std::invalid_argument("threshold: parameter value " + std::to_string(x) +
                                  " is outside the model's domain");
    }
    return r.result.s_value - 1.0;
  };
  double f_lo = excess(lo);
  const double f_hi = excess(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw std::runtime_error("threshold: s_value - 1 does not change sign on [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
  }
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = excess(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MaximizeResult maximize(const Objective& objective, std::span<const double> lo,
                        std::span<const double> hi, const MaximizeOptions& options) {
  const std::size_t d = lo.size();
  if (d == 0 || hi.size() != d) throw std::invalid_argument("maximize: empty or mismatched box");
  for (std::size_t i = 0; i < d; ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("maximize: empty box");
  }
  if (options.levels < 2) throw std::invalid_argument("maximize: need at least 2 levels per axis");

  MaximizeResult out;
  double grid_points = 1.0;
  for (std::size_t i = 0; i < d; ++i) grid_points *= options.levels;
  out.latin_hypercube = grid_points > static_cast<double>(options.grid_budget);
  const std::size_t count = out.latin_hypercube
                                ? static_cast<std::size_t>(std::max<long>(options.grid_budget, options.levels))
                                : static_cast<std::size_t>(grid_points);

  // Coarse points.
  std::vector<std::vector<double>> points(count, std::vector<double>(d));
  if (out.latin_hypercube) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    std::vector<std::size_t> strata(count);
    for (std::size_t i = 0; i < d; ++i) {
      std::iota(strata.begin(), strata.end(), 0);
      std::shuffle(strata.begin(), strata.end(), rng);
      for (std::size_t k = 0; k < count; ++k) {
        const double u = (static_cast<double>(strata[k]) + jitter(rng)) / static_cast<double>(count);
        points[k][i] = lo[i] + u * (hi[i] - lo[i]);
      }
    }
  } else {
    const auto levels = static_cast<std::size_t>(options.levels);
    for (std::size_t k = 0; k < count; ++k) {
      std::size_t rem = k;
      for (std::size_t i = d; i-- > 0;) {
        const std::size_t idx = rem % levels;
        rem /= levels;
        points[k][i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx) / static_cast<double>(levels - 1);
      }
    }
  }
  std::vector<double> values(count);
  parallel_for(count, [&](std::size_t k) { values[k] = safe_eval(objective, points[k]); });
  out.evaluations = static_cast<long>(count);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, options.starts)), count);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] > values[b] || (values[a] == values[b] && a < b);
                    });
  out.coarse_best = values[order[0]];
  out.value = values[order[0]];
  out.argmax = points[order[0]];

  std::vector<double> step(d);
  const double spacing = out.latin_hypercube ? 1.0 / std::pow(static_cast<double>(count), 1.0 / static_cast<double>(d))
                                             : 1.0 / (options.levels - 1);
  for (std::size_t i = 0; i < d; ++i) step[i] = std::max(spacing * (hi[i] - lo[i]), 10 * options.step_tol);

  std::vector<Candidate> refined(keep);
  std::vector<long> evals(keep, 0);
  parallel_for(keep, [&](std::size_t s) {
    const std::size_t k = order[s];
    refined[s] = nelder_mead(objective, {values[k], points[k]}, lo, hi, step, options, evals[s]);
  });
  for (std::size_t s = 0; s < keep; ++s) {
    out.evaluations += evals[s];
    if (refined[s].value > out.value) {
      out.value = refined[s].value;
      out.argmax = refined[s].x;
    }
  }
  return out;
}

DetectionResult entanglement_detect(std::span<const StateSpec> states, const FourOutcomePovm& basis) {
  if (states.size() != 3) throw std::invalid_argument("entanglement detection needs three states");
  std::vector<DensityMatrix> rhos;
  for (const auto& s : states) {
    rhos.push_back(make_state(s));
    require_pure(rhos.back());
  }
  const auto labels = label_convention("reference", 3);
  std::vector<FourOutcomePovm> povms;
  for (const auto& l : labels) povms.push_back(relabel_outcomes(basis, l));
  const ProbabilityTable table = joint_distribution(NetworkSpec(std::move(rhos), std::move(povms)));
  DetectionResult out;
  const SignTriple signs{named_sign_function("F17"), named_sign_function("F11"), named_sign_function("F11")};
  out.result = evaluate_trilocal(table, signs);
  out.verdict = out.result.violated ? Verdict::AllEntangled : Verdict::Inconclusive;
  return out;
}

LinearComparison compare_linear(std::span<const DensityMatrix> states,
                                std::span<const FourOutcomePovm> povms, const SignTriple& signs) {
  if (states.size() != 3 || povms.size() != 3) {
    throw std::invalid_argument("compare_linear needs three states and three measurements");
  }
  LinearComparison out;
  const NetworkSpec spec({states.begin(), states.end()}, {povms.begin(), povms.end()});
  out.triangle = evaluate_trilocal(joint_distribution(spec), signs);
  out.linear_value = linear_nlocal_value(states);
  out.triangle_only = out.triangle.violated && out.linear_value <= 1.0 + kViolationTol;
  return out;
}

LinearComparison compare_linear(const NetworkInstance& instance) {
  if (instance.spec.size() != 3) throw std::invalid_argument("compare_linear needs a triangle network");
  LinearComparison out;
  out.triangle = evaluate_instance(instance).result;
  out.linear_value = linear_nlocal_value(instance.spec.sources());
  out.triangle_only = out.triangle.violated && out.linear_value <= 1.0 + kViolationTol;
  return out;
}

double mixed_pure_objective(int product_source, std::span<const double> x) {
  if (product_source < 0 || product_source > 2) throw std::out_of_range("product source must be 0..2");
  if (x.size() != 7) throw std::invalid_argument("mixed_pure_objective takes 7 parameters");
  auto bloch = [](double polar, double azimuth) {
    return Vec3(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar));
  };
  std::vector<StateSpec> specs;
  int schmidt_used = 0;
  for (int s = 0; s < 3; ++s) {
    if (s == product_source) {
      specs.emplace_back(state::Product{bloch(x[2], x[3]), bloch(x[4], x[5])});
    } else {
      const double theta = x[static_cast<std::size_t>(schmidt_used++)];
      specs.emplace_back(state::Schmidt{std::cos(theta), std::sin(theta)});
    }
  }
  const FourOutcomePovm basis = entangled_basis(std::cos(x[6]));
  return entanglement_detect(specs, basis).result.s_value;
}

MaximizeResult maximize_mixed_pure(int product_source, const MaximizeOptions& options) {
  constexpr double pi = std::numbers::pi;
  constexpr double edge = 1e-6;
  const std::array<double, 7> lo{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, edge};
  const std::array<double, 7> hi{pi, pi, pi, 2 * pi, pi, 2 * pi, pi / 2 - edge};
  return maximize([product_source](std::span<const double> x) { return mixed_pure_objective(product_source, x); },
                  lo, hi, options);
}

}  // namespace polyloc
