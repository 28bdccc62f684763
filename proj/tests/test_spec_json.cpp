#include "polyloc/spec_json.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace polyloc;

TEST_CASE("expressions") {
  const ParamMap p{{"a", 0.6}, {"w_1", 0.25}};
  CHECK(eval_expression("1 + 2 * 3", p) == doctest::Approx(7));
  CHECK(eval_expression("(1 + 2) * 3", p) == doctest::Approx(9));
  CHECK(eval_expression("2 ^ 3 ^ 2", p) == doctest::Approx(512));
  CHECK(eval_expression("-$a^2", p) == doctest::Approx(-0.36));
  CHECK(eval_expression("sqrt(1 - $a^2)", p) == doctest::Approx(0.8));
  CHECK(eval_expression("1 - $w_1 - $w_1", p) == doctest::Approx(0.5));
  CHECK(eval_expression("cos(pi) + abs(-2) + sin(0)", p) == doctest::Approx(1));
  CHECK(eval_expression("1e-3", p) == doctest::Approx(0.001));
  CHECK_THROWS_AS(eval_expression("$b", p), std::invalid_argument);
  CHECK_THROWS_AS(eval_expression("1 +", p), std::invalid_argument);
  CHECK_THROWS_AS(eval_expression("foo(1)", p), std::invalid_argument);
  CHECK_THROWS_AS(eval_expression("(1", p), std::invalid_argument);
  CHECK_THROWS_AS(eval_expression("1 2", p), std::invalid_argument);
}

TEST_CASE("label conventions") {
  CHECK(label_convention("natural", 5).size() == 5);
  const auto r3 = label_convention("reference", 3);
  CHECK(r3[0] == kGrayLabels);
  CHECK(r3[1] == kNaturalLabels);
  CHECK(label_convention("reference", 4)[3] == OutcomeLabels{1, 0, 3, 2});
  CHECK_THROWS_AS(label_convention("reference", 5), std::invalid_argument);
  CHECK_THROWS_AS(label_convention("sideways", 3), std::invalid_argument);
}

TEST_CASE("sign choices") {
  const SignChoice a = parse_signs("F11-F11-H11", 3, std::nullopt);
  CHECK_FALSE(a.search);
  CHECK(a.center == 1);
  CHECK(a.fs[2] == named_sign_function("H11"));

  const SignChoice b = parse_signs(nlohmann::json::array({"++++----", "F11", "F40", "H11"}), 4, 3);
  CHECK(b.center == 2);
  CHECK(b.fs[0] == SignFunction::parse("++++----"));

  const SignChoice c = parse_signs(nlohmann::json{{"f", "F40"}, {"g", "H11"}, {"h", "H11"}}, 3, std::nullopt);
  CHECK(c.fs[0] == named_sign_function("F40"));

  CHECK(parse_signs("search", 4, std::nullopt).search);
  CHECK_THROWS_AS(parse_signs("F11-F11", 3, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(parse_signs("F11-F11-F11", 3, 4), std::invalid_argument);
}

TEST_CASE("templates instantiate with defaults and overrides") {
  const auto t = NetworkTemplate::parse(R"js({
    "n": 3,
    "sources": [{"kind": "bell", "which": "psi-"}, {"kind": "schmidt", "tau1": "cos($th)"},
                {"kind": "bell_diagonal", "w": ["$w", 0, 0, "1 - $w"]}],
    "povms": {"kind": "entangled", "alpha2": "$a", "p4": 0.9},
    "labels": "reference",
    "params": {"th": 0.3, "w": 0.25, "a": 0.5}
  })js");
  CHECK(t.size() == 3);
  CHECK(t.referenced_params() == std::vector<std::string>{"a", "th", "w"});
  const NetworkInstance inst = t.instantiate({{"a", 0.7}});
  CHECK(inst.spec.size() == 3);
  CHECK(std::holds_alternative<state::Schmidt>(inst.state_specs[1]));
  CHECK(std::get<state::Schmidt>(inst.state_specs[1]).tau2 == doctest::Approx(std::sin(0.3)));
  CHECK(inst.signs.fs.size() == 3);
  CHECK_THROWS_AS(t.instantiate({{"w", 1.5}}), std::invalid_argument);
}

TEST_CASE("template errors") {
  CHECK_THROWS(NetworkTemplate::parse(R"({"n": 3, "sources": {"kind": "bell"}})"));
  CHECK_THROWS(NetworkTemplate::parse(R"({"n": 9, "sources": {"kind": "bell"}, "povms": {"kind": "product"}})"));
  const auto t = NetworkTemplate::parse(R"({"sources": {"kind": "warp"}, "povms": {"kind": "product"}})");
  CHECK_THROWS_AS(t.instantiate(), std::invalid_argument);
  const auto u = NetworkTemplate::parse(
      R"({"sources": [{"kind": "bell"}, {"kind": "bell"}], "povms": {"kind": "product"}})");
  CHECK_THROWS_AS(u.instantiate(), std::invalid_argument);
}

TEST_CASE("every state and measurement kind parses") {
  const ParamMap p{{"x", 0.5}};
  CHECK_NOTHROW(parse_state(R"({"kind": "separable_cc"})"_json, p));
  CHECK_NOTHROW(parse_state(R"({"kind": "product", "u": [0, 0, 1], "v": [0, "$x", 0]})"_json, p));
  CHECK_NOTHROW(parse_state(R"({"kind": "noisy_gate", "p1": "$x", "p2": 1})"_json, p));
  CHECK_NOTHROW(parse_state(R"({"kind": "depolarized_bell", "p3": "$x"})"_json, p));
  CHECK_NOTHROW(parse_povm(R"({"kind": "product"})"_json, p));
  CHECK_NOTHROW(parse_povm(R"({"kind": "two_param", "alpha2": "$x", "alpha4": 0.1})"_json, p));
  CHECK_NOTHROW(parse_povm(R"({"kind": "entangled", "alpha1": "$x"})"_json, p));
  CHECK_THROWS_AS(parse_state(R"({"kind": "schmidt"})"_json, p), std::invalid_argument);
}
