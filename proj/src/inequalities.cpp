#include "polyloc/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polyloc {
namespace {

long f11(int s, int r1, int r2) { return (1 - s) * r1 + s * (r2 + 1); }

long h11(int s, int r1, int r2) {
  return (1 - s) * std::abs(r1 + r2 - 1) + s * std::abs(r1 * r2 - 1);
}

long f40(int s, int r1, int r2) { return (s == 1 && r1 * r2 == 0) ? 1 : 0; }

// w_j(o) = (f(0,o) + (-1)^j f(1,o)) / 2, entries in {-1, 0, 1}.
std::array<int, 4> half_weights(const SignFunction& f, int j) {
  std::array<int, 4> w{};
  const int parity = (j % 2 == 0) ? 1 : -1;
  for (int o = 0; o < 4; ++o) w[static_cast<std::size_t>(o)] = (f.sign(0, o) + parity * f.sign(1, o)) / 2;
  return w;
}

void require_parties(const ProbabilityTable& p, std::size_t count) {
  if (static_cast<std::size_t>(p.parties()) != count) {
    throw std::invalid_argument("sign-function count does not match the table's party count");
  }
}

// Table reordered so that `center` becomes the last party.
std::vector<double> center_last(const ProbabilityTable& p, int center) {
  const int n = p.parties();
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::size_t j = 0;
    for (int k = 0; k < n; ++k) {
      if (k != center) j = j * 4 + static_cast<std::size_t>(p.outcome_of(i, k));
    }
    j = j * 4 + static_cast<std::size_t>(p.outcome_of(i, center));
    out[j] = p[i];
  }
  return out;
}

// Contract the leading party of `in` (size 4m) with w into `out` (size m).
void contract_leading(const std::vector<double>& in, const std::array<int, 4>& w,
                      std::vector<double>& out) {
  const std::size_t m = in.size() / 4;
  out.assign(m, 0.0);
  for (std::size_t o = 0; o < 4; ++o) {
    const int c = w[o];
    if (c == 0) continue;
    const double* src = in.data() + o * m;
    for (std::size_t r = 0; r < m; ++r) out[r] += c * src[r];
  }
}

struct SearchState {
  int depth = 0;  // number of non-center parties
  std::array<std::vector<std::vector<double>>, 2> levels;  // [j][level]
  std::vector<std::uint8_t> current;
  double best_s = -1.0;
  std::vector<std::uint8_t> best_masks;
  std::array<std::array<double, 4>, 2> best_residual{};
};

void search_level(SearchState& st, int level) {
  if (level == st.depth) {
    std::array<std::array<double, 4>, 2> residual{};
    double s = 0.0;
    for (int j = 0; j < 2; ++j) {
      double abs_sum = 0.0;
      for (std::size_t o = 0; o < 4; ++o) {
        residual[static_cast<std::size_t>(j)][o] = st.levels[static_cast<std::size_t>(j)][static_cast<std::size_t>(level)][o];
        abs_sum += std::abs(residual[static_cast<std::size_t>(j)][o]);
      }
      s += std::sqrt(abs_sum);
    }
    if (s > st.best_s) {
      st.best_s = s;
      st.best_masks = st.current;
      st.best_residual = residual;
    }
    return;
  }
  // Masks with bit 7 clear: one representative per global-flip pair.
  for (int mask = 0; mask < 128; ++mask) {
    const SignFunction f(static_cast<std::uint8_t>(mask));
    st.current[static_cast<std::size_t>(level)] = static_cast<std::uint8_t>(mask);
    for (int j = 0; j < 2; ++j) {
      auto& lv = st.levels[static_cast<std::size_t>(j)];
      contract_leading(lv[static_cast<std::size_t>(level)], half_weights(f, j + 1),
                       lv[static_cast<std::size_t>(level) + 1]);
    }
    search_level(st, level + 1);
  }
}

}  // namespace

SignFunction SignFunction::parse(std::string_view text) {
  if (text.size() != 8) throw std::invalid_argument("sign function string must have 8 characters");
  std::uint8_t mask = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (text[i] == '-') {
      mask = static_cast<std::uint8_t>(mask | (1U << i));
    } else if (text[i] != '+') {
      throw std::invalid_argument("sign function string may only contain '+' and '-'");
    }
  }
  return SignFunction(mask);
}

SignFunction SignFunction::from_integer(const std::function<long(int, int, int)>& f) {
  std::uint8_t mask = 0;
  for (int s = 0; s < 2; ++s) {
    for (int o = 0; o < 4; ++o) {
      if (((f(s, o >> 1, o & 1) % 2) + 2) % 2 == 1) {
        mask = static_cast<std::uint8_t>(mask | (1U << (s * 4 + o)));
      }
    }
  }
  return SignFunction(mask);
}

std::string SignFunction::to_string() const {
  std::string out(8, '+');
  for (std::size_t i = 0; i < 8; ++i) {
    if ((mask_ >> i) & 1U) out[i] = '-';
  }
  return out;
}

SignFunction SignFunction::relabeled(const OutcomeLabels& labels) const {
  std::uint8_t mask = 0;
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < 4; ++k) {
      const int src = labels[static_cast<std::size_t>(k)];
      if (src < 0 || src > 3) throw std::invalid_argument("outcome label out of range");
      if (sign(s, src) < 0) mask = static_cast<std::uint8_t>(mask | (1U << (s * 4 + k)));
    }
  }
  return SignFunction(mask);
}

SignFunction named_sign_function(std::string_view name) {
  if (name == "F11") return SignFunction::from_integer(f11);
  if (name == "H11" || name == "F17") return SignFunction::from_integer(h11);
  if (name == "F40") return SignFunction::from_integer(f40);
  throw std::invalid_argument("unknown sign function '" + std::string(name) + "'");
}

std::vector<SignFunction> parse_sign_list(std::string_view text) {
  std::vector<SignFunction> out;
  if (text.size() == 8 && text.find_first_not_of("+-") == std::string_view::npos) {
    out.push_back(SignFunction::parse(text));
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t dash = std::min(text.find('-', start), text.size());
    const std::string_view token = text.substr(start, dash - start);
    out.push_back(named_sign_function(token));
    start = dash + 1;
  }
  return out;
}

SignTriple parse_sign_triple(std::string_view text) {
  const auto fs = parse_sign_list(text);
  if (fs.size() != 3) throw std::invalid_argument("expected three sign functions in '" + std::string(text) + "'");
  return {fs[0], fs[1], fs[2]};
}

InequalityResult make_result(double i1, double i2) {
  InequalityResult r;
  r.i1 = i1;
  r.i2 = i2;
  r.s_value = std::sqrt(std::abs(i1)) + std::sqrt(std::abs(i2));
  r.violated = r.s_value > 1.0 + kViolationTol;
  return r;
}

double correlator(const ProbabilityTable& p, std::span<const SignFunction> fs,
                  std::span<const int> exponents) {
  require_parties(p, fs.size());
  if (exponents.size() != fs.size()) {
    throw std::invalid_argument("need one exponent per party");
  }
  for (const int e : exponents) {
    if (e != 0 && e != 1) throw std::invalid_argument("correlator exponents must be 0 or 1");
  }
  const int n = p.parties();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    int sign = 1;
    for (int k = 0; k < n; ++k) {
      sign *= fs[static_cast<std::size_t>(k)].sign(exponents[static_cast<std::size_t>(k)], p.outcome_of(i, k));
    }
    total += sign * p[i];
  }
  return total;
}

double correlator(const ProbabilityTable& p, const SignFunction& f, const SignFunction& g,
                  const SignFunction& h, int e1, int e2, int e3) {
  const std::array<SignFunction, 3> fs{f, g, h};
  const std::array<int, 3> es{e1, e2, e3};
  return correlator(p, fs, es);
}

InequalityResult evaluate_trilocal(const ProbabilityTable& p, const SignFunction& f,
                                   const SignFunction& g, const SignFunction& h) {
  require_parties(p, 3);
  std::array<double, 2> values{};
  for (int j = 1; j <= 2; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) {
        const double sign = ((j * (i + k)) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * correlator(p, f, g, h, i, j - 1, k);
      }
    }
    values[static_cast<std::size_t>(j - 1)] = acc / 4.0;
  }
  return make_result(values[0], values[1]);
}

InequalityResult evaluate_trilocal(const ProbabilityTable& p, const SignTriple& signs) {
  return evaluate_trilocal(p, signs.f, signs.g, signs.h);
}

InequalityResult evaluate_ngon(const ProbabilityTable& p, std::span<const SignFunction> fs,
                               int center) {
  require_parties(p, fs.size());
  const int n = p.parties();
  if (center < 0 || center >= n) throw std::out_of_range("distinguished party out of range");

  // The bit sums factor per party into the half-weights w_j.
  std::array<double, 2> values{};
  for (int j = 1; j <= 2; ++j) {
    std::vector<std::array<int, 4>> w(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
      if (s == center) {
        for (int o = 0; o < 4; ++o) w[static_cast<std::size_t>(s)][static_cast<std::size_t>(o)] = fs[static_cast<std::size_t>(s)].sign(j - 1, o);
      } else {
        w[static_cast<std::size_t>(s)] = half_weights(fs[static_cast<std::size_t>(s)], j);
      }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      int c = 1;
      for (int s = 0; s < n && c != 0; ++s) c *= w[static_cast<std::size_t>(s)][static_cast<std::size_t>(p.outcome_of(i, s))];
      acc += c * p[i];
    }
    values[static_cast<std::size_t>(j - 1)] = acc;
  }
  return make_result(values[0], values[1]);
}

double linear_nlocal_value(std::span<const DensityMatrix> states) {
  if (states.empty()) throw std::invalid_argument("linear_nlocal_value needs at least one state");
  double prod1 = 1.0;
  double prod2 = 1.0;
  for (const auto& rho : states) {
    const SingularTriple t = correlation_singular_values(rho);
    prod1 *= t.t11;
    prod2 *= t.t22;
  }
  return std::sqrt(prod1 + prod2);
}

SignSearchResult search_signs(const ProbabilityTable& p, int center) {
  const int n = p.parties();
  if (center < 0 || center >= n) throw std::out_of_range("distinguished party out of range");
  if (n > 4) throw std::invalid_argument("exhaustive sign search supports at most 4 parties");

  SearchState st;
  st.depth = n - 1;
  st.current.assign(static_cast<std::size_t>(st.depth), 0);
  const std::vector<double> base = center_last(p, center);
  for (auto& lv : st.levels) {
    lv.resize(static_cast<std::size_t>(st.depth) + 1);
    lv[0] = base;
  }
  search_level(st, 0);

  SignSearchResult out;
  out.center = center;
  out.fs.resize(static_cast<std::size_t>(n));
  std::uint8_t center_mask = 0;
  for (int j = 0; j < 2; ++j) {
    for (int o = 0; o < 4; ++o) {
      if (st.best_residual[static_cast<std::size_t>(j)][static_cast<std::size_t>(o)] < 0.0) {
        center_mask = static_cast<std::uint8_t>(center_mask | (1U << (j * 4 + o)));
      }
    }
  }
  int level = 0;
  for (int s = 0; s < n; ++s) {
    out.fs[static_cast<std::size_t>(s)] =
        (s == center) ? SignFunction(center_mask) : SignFunction(st.best_masks[static_cast<std::size_t>(level++)]);
  }
  out.result = evaluate_ngon(p, out.fs, center);
  return out;
}

}  // namespace polyloc
