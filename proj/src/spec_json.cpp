#include "polyloc/spec_json.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

namespace polyloc {
namespace {

using nlohmann::json;

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const ParamMap& params) : text_(text), params_(params) {}

  double run() {
    const double v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression '" + std::string(text_) + "': " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  double expr() {
    double v = term();
    while (true) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    while (true) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (c == '$') {
      ++pos_;
      const std::string name = identifier();
      const auto it = params_.find(name);
      if (name.empty() || it == params_.end()) fail("unknown parameter '" + name + "'");
      return it->second;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(std::string(text_.substr(pos_)), &used);
      pos_ += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string name = identifier();
      if (name == "pi") return std::numbers::pi;
      if (!accept('(')) fail("expected '(' after '" + name + "'");
      const double arg = expr();
      if (!accept(')')) fail("missing ')'");
      if (name == "sqrt") return std::sqrt(arg);
      if (name == "sin") return std::sin(arg);
      if (name == "cos") return std::cos(arg);
      if (name == "abs") return std::abs(arg);
      fail("unknown function '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  const ParamMap& params_;
  std::size_t pos_ = 0;
};

double number(const json& node, const ParamMap& params) {
  if (node.is_number()) return node.get<double>();
  if (node.is_string()) return eval_expression(node.get<std::string>(), params);
  throw std::invalid_argument("expected a number or expression string, got " + node.dump());
}

double field(const json& node, const char* key, const ParamMap& params) {
  if (!node.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return number(node.at(key), params);
}

Vec3 vec3(const json& node, const ParamMap& params) {
  if (!node.is_array() || node.size() != 3) throw std::invalid_argument("expected a 3-vector");
  return Vec3(number(node[0], params), number(node[1], params), number(node[2], params));
}

std::string kind_of(const json& node) {
  if (!node.is_object() || !node.contains("kind")) {
    throw std::invalid_argument("expected an object with a 'kind' field, got " + node.dump());
  }
  return node.at("kind").get<std::string>();
}

// Broadcast a single object to n entries, or check a list of length n.
std::vector<json> per_party(const json& node, int n, const char* what) {
  if (node.is_array()) {
    if (static_cast<int>(node.size()) != n) {
      throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + " entries");
    }
    return {node.begin(), node.end()};
  }
  return std::vector<json>(static_cast<std::size_t>(n), node);
}

SignFunction parse_one_sign(const std::string& token) {
  if (token.size() == 8 && token.find_first_not_of("+-") == std::string::npos) {
    return SignFunction::parse(token);
  }
  return named_sign_function(token);
}

void collect_params(const json& node, std::set<std::string>& out) {
  if (node.is_string()) {
    const std::string& s = node.get_ref<const std::string&>();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '$') continue;
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      if (j > i + 1) out.insert(s.substr(i + 1, j - i - 1));
    }
  } else if (node.is_structured()) {
    for (const auto& child : node) collect_params(child, out);
  }
}

}  // namespace

double eval_expression(std::string_view text, const ParamMap& params) {
  return ExpressionParser(text, params).run();
}

std::vector<OutcomeLabels> label_convention(std::string_view name, int n) {
  if (name == "natural") return std::vector<OutcomeLabels>(static_cast<std::size_t>(n), kNaturalLabels);
  if (name == "reference") {
    constexpr OutcomeLabels both_swapped{1, 0, 3, 2};
    if (n == 3) return {kGrayLabels, kNaturalLabels, kGrayLabels};
    if (n == 4) return {kGrayLabels, kNaturalLabels, both_swapped, both_swapped};
    throw std::invalid_argument("the reference label convention is defined for n = 3 and n = 4 only");
  }
  throw std::invalid_argument("unknown label convention '" + std::string(name) + "'");
}

SignChoice parse_signs(const json& node, int n, std::optional<int> t_one_based) {
  SignChoice choice;
  const int default_center = (n == 3) ? 1 : 0;
  choice.center = t_one_based ? *t_one_based - 1 : default_center;
  if (choice.center < 0 || choice.center >= n) {
    throw std::invalid_argument("distinguished party t out of range");
  }
  std::vector<std::string> tokens;
  if (node.is_string()) {
    const std::string text = node.get<std::string>();
    if (text == "search") {
      choice.search = true;
      return choice;
    }
    choice.fs = parse_sign_list(text);
    if (static_cast<int>(choice.fs.size()) != n) {
      throw std::invalid_argument("need one sign function per party (" + std::to_string(n) + ")");
    }
    return choice;
  } else if (node.is_array()) {
    for (const auto& t : node) tokens.push_back(t.get<std::string>());
  } else if (node.is_object() && n == 3 && node.contains("f")) {
    for (const char* key : {"f", "g", "h"}) tokens.push_back(node.at(key).get<std::string>());
  } else {
    throw std::invalid_argument("signs must be a string or a list of strings");
  }
  if (static_cast<int>(tokens.size()) != n) {
    throw std::invalid_argument("need one sign function per party (" + std::to_string(n) + ")");
  }
  for (const auto& t : tokens) choice.fs.push_back(parse_one_sign(t));
  return choice;
}

StateSpec parse_state(const json& node, const ParamMap& params) {
  const std::string kind = kind_of(node);
  if (kind == "bell") return state::Bell{parse_bell_kind(node.value("which", std::string("phi+")))};
  if (kind == "schmidt") {
    const double t1 = field(node, "tau1", params);
    const double t2 = node.contains("tau2") ? field(node, "tau2", params)
                                            : std::sqrt(std::max(0.0, 1.0 - t1 * t1));
    return state::Schmidt{t1, t2};
  }
  if (kind == "separable_cc") return state::SeparableCc{};
  if (kind == "product") return state::Product{vec3(node.at("u"), params), vec3(node.at("v"), params)};
  if (kind == "bell_diagonal") {
    const json& w = node.at("w");
    if (!w.is_array() || w.size() != 4) throw std::invalid_argument("bell_diagonal needs 4 weights");
    state::BellDiagonal bd;
    for (std::size_t i = 0; i < 4; ++i) bd.w[i] = number(w[i], params);
    return bd;
  }
  if (kind == "noisy_gate") return state::NoisyGate{field(node, "p1", params), field(node, "p2", params)};
  if (kind == "depolarized_bell") return state::DepolarizedBell{field(node, "p3", params)};
  throw std::invalid_argument("unknown state kind '" + kind + "'");
}

FourOutcomePovm parse_povm(const json& node, const ParamMap& params) {
  const std::string kind = kind_of(node);
  auto base = [&]() -> FourOutcomePovm {
    if (kind == "entangled") {
      if (node.contains("alpha1")) return entangled_basis(field(node, "alpha1", params));
      return entangled_basis_from_alpha2(field(node, "alpha2", params));
    }
    if (kind == "product") return product_basis();
    if (kind == "two_param") {
      return two_param_basis(field(node, "alpha2", params), field(node, "alpha4", params));
    }
    throw std::invalid_argument("unknown measurement kind '" + kind + "'");
  }();
  if (node.contains("p4")) return inefficient_povm(base, field(node, "p4", params));
  return base;
}

NetworkTemplate::NetworkTemplate(json doc) : doc_(std::move(doc)) {
  if (!doc_.is_object()) throw std::invalid_argument("network spec must be a JSON object");
  n_ = doc_.value("n", 3);
  if (n_ < kMinParties || n_ > kMaxParties) throw std::invalid_argument("network spec: n out of range");
  if (!doc_.contains("sources") || !doc_.contains("povms")) {
    throw std::invalid_argument("network spec needs 'sources' and 'povms'");
  }
  if (doc_.contains("params")) {
    for (const auto& [k, v] : doc_.at("params").items()) defaults_[k] = v.get<double>();
  }
  std::optional<int> t;
  if (doc_.contains("t")) t = doc_.at("t").get<int>();
  const json default_signs = (n_ == 3) ? json("F11-F11-H11") : json("search");
  signs_ = parse_signs(doc_.value("signs", default_signs), n_, t);

  const json labels = doc_.value("labels", json("natural"));
  if (labels.is_string()) {
    labels_ = label_convention(labels.get<std::string>(), n_);
  } else {
    for (const auto& l : per_party(labels, n_, "labels")) labels_.push_back(l.get<OutcomeLabels>());
  }
}

NetworkTemplate NetworkTemplate::parse(std::string_view text) {
  return NetworkTemplate(json::parse(text));
}

NetworkTemplate NetworkTemplate::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network spec '" + path + "'");
  return NetworkTemplate(json::parse(in));
}

NetworkInstance NetworkTemplate::instantiate(const ParamMap& overrides) const {
  ParamMap params = defaults_;
  for (const auto& [k, v] : overrides) params[k] = v;

  std::vector<StateSpec> specs;
  std::vector<DensityMatrix> sources;
  for (const auto& node : per_party(doc_.at("sources"), n_, "sources")) {
    specs.push_back(parse_state(node, params));
    sources.push_back(make_state(specs.back()));
  }
  std::vector<FourOutcomePovm> povms;
  const auto povm_nodes = per_party(doc_.at("povms"), n_, "povms");
  for (int i = 0; i < n_; ++i) {
    povms.push_back(relabel_outcomes(parse_povm(povm_nodes[static_cast<std::size_t>(i)], params),
                                     labels_[static_cast<std::size_t>(i)]));
  }
  return {NetworkSpec(std::move(sources), std::move(povms)), std::move(specs), signs_};
}

std::vector<std::string> NetworkTemplate::referenced_params() const {
  std::set<std::string> names;
  collect_params(doc_.at("sources"), names);
  collect_params(doc_.at("povms"), names);
  return {names.begin(), names.end()};
}

}  // namespace polyloc
