#include "lhv_oracle.hpp"
#include "polyloc/lhv.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace polyloc;

using oracle::nested_square;
using oracle::nested_triangle;

TEST_CASE("model distribution matches nested-loop enumeration") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const LhvModel m = sample_model(3, 5, seed);
    const ProbabilityTable p = model_distribution(m);
    const auto expected = nested_triangle(m);
    for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(p[i] - expected[i]) < 1e-14);
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const LhvModel m = sample_model(4, 4, seed);
    const ProbabilityTable p = model_distribution(m);
    const auto expected = nested_square(m);
    for (std::size_t i = 0; i < 256; ++i) CHECK(std::abs(p[i] - expected[i]) < 1e-14);
  }
}

TEST_CASE("sampling is deterministic per seed and valid") {
  const LhvModel a = sample_model(3, 8, 42);
  const LhvModel b = sample_model(3, 8, 42);
  CHECK(to_json(a) == to_json(b));
  CHECK_NOTHROW(a.validate());
  for (int i = 0; i < 3; ++i) {
    CHECK(a.cardinality(i) >= 1);
    CHECK(a.cardinality(i) <= 8);
  }
  CHECK(to_json(sample_model(3, 8, 43)) != to_json(a));
  CHECK(model_seed(1, 0) != model_seed(1, 1));
}

TEST_CASE("json round trip") {
  const LhvModel m = sample_model(4, 3, 9);
  const LhvModel back = lhv_model_from_json(to_json(m));
  const ProbabilityTable p = model_distribution(m);
  const ProbabilityTable q = model_distribution(back);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-15));
  CHECK_THROWS(lhv_model_from_json("{\"n\": 3}"));
}

TEST_CASE("validation rejects malformed models") {
  LhvModel m = sample_model(3, 2, 5);
  m.source_dists[0][0] += 0.1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = sample_model(3, 2, 5);
  m.responses[1].pop_back();
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("a shared fair bit already reaches sqrt(2) in the triangle form") {
  // Source 2 carries a fair bit seen by parties 0 and 2; both output (0, bit).
  // Party 1 outputs (0, 1) deterministically.
  LhvModel m;
  m.source_dists = {{1.0}, {1.0}, {0.5, 0.5}};
  const std::array<double, 4> zero{1, 0, 0, 0};
  const std::array<double, 4> one{0, 1, 0, 0};
  m.responses = {{zero, one}, {one}, {zero, one}};
  m.validate();
  const ProbabilityTable p = model_distribution(m);
  const auto f = named_sign_function("F11");
  const std::array<SignFunction, 3> fs{f, f, f};
  const InequalityResult r = evaluate_ngon(p, fs, 1);
  CHECK(r.s_value == doctest::Approx(std::sqrt(2.0)));
  CHECK(r.violated);
}

TEST_CASE("square suite finds no violation") {
  LhvSuiteOptions o;
  o.n = 4;
  o.models = 200;
  o.sign_draws = 10;
  const LhvSuiteReport r = run_lhv_suite(o);
  CHECK(r.violations.empty());
  CHECK(r.evaluations == 200L * 10 * 4);
  CHECK(r.max_s <= 1.0 + kViolationTol);
}

TEST_CASE("triangle suite dumps violating models for replay") {
  LhvSuiteOptions o;
  o.n = 3;
  o.models = 10000;
  o.sign_draws = 20;
  o.seed = 1;
  o.dump_dir = std::filesystem::temp_directory_path() / "polyloc_lhv_dump_test";
  std::filesystem::remove_all(o.dump_dir);
  const LhvSuiteReport r = run_lhv_suite(o);
  REQUIRE_FALSE(r.violations.empty());
  REQUIRE_FALSE(r.dumped.empty());
  const LhvViolation& v = r.violations.front();
  const LhvModel replay = sample_model(3, o.max_cardinality, v.model_seed);
  const InequalityResult again = evaluate_ngon(model_distribution(replay), v.fs, v.center);
  CHECK(again.s_value == doctest::Approx(v.result.s_value));
  std::filesystem::remove_all(o.dump_dir);
}
