// Sweeps, thresholds, maximization and the derived workflows built on them.
#pragma once

#include "polyloc/inequalities.hpp"
#include "polyloc/spec_json.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace polyloc {

struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int steps = 2;

  [[nodiscard]] double at(int k) const {
    return (k == steps - 1) ? hi : lo + (hi - lo) * k / (steps - 1);
  }
};

/// Parses "name:lo:hi:steps".
Axis parse_axis(std::string_view text);

struct PointResult {
  std::vector<double> params;
  bool valid = false;
  InequalityResult result;
  std::vector<SignFunction> fs;  // the functions used (found ones in search mode)
};

/// Evaluates the instance with its own sign choice.
PointResult evaluate_instance(const NetworkInstance& instance);

/// Instantiates and evaluates; a point outside a constructor's domain comes
/// back with valid = false.
PointResult evaluate_template(const NetworkTemplate& tmpl, const ParamMap& params);

std::size_t grid_size(std::span<const Axis> axes);

/// Row-major grid over the axes (last axis fastest). Rows before `first_row`
/// are skipped, which lets an interrupted sweep be resumed.
std::vector<PointResult> sweep(const NetworkTemplate& tmpl, std::span<const Axis> axes,
                               const ParamMap& fixed = {}, std::size_t first_row = 0);

void write_sweep_header(std::ostream& os, std::span<const Axis> axes, bool with_signs);

/// Data rows; `first_row` is the grid index of rows[0]. With `gnuplot` a
/// blank line separates scans of the outermost axis.
void write_sweep_rows(std::ostream& os, std::span<const Axis> axes, const std::vector<PointResult>& rows,
                      bool with_signs, bool gnuplot, std::size_t first_row = 0);

/// Header plus rows.
void write_sweep_csv(std::ostream& os, std::span<const Axis> axes,
                     const std::vector<PointResult>& rows, bool with_signs, bool gnuplot);

/// Bisection on s_value - 1 until the bracket is narrower than `tol`.
/// Throws if s_value - 1 has the same sign at both ends.
double find_threshold(const NetworkTemplate& tmpl, const std::string& param, double lo, double hi,
                      const ParamMap& fixed = {}, double tol = 1e-7);

using Objective = std::function<double(std::span<const double>)>;

struct MaximizeOptions {
  int levels = 21;                  // grid points per axis
  long grid_budget = 200000;        // above levels^d, switch to Latin hypercube
  int starts = 6;                   // simplex refinements from the best coarse points
  double step_tol = 1e-7;
  int max_iterations = 20000;
  std::uint64_t seed = 7;
};

struct MaximizeResult {
  double value = 0.0;
  std::vector<double> argmax;
  double coarse_best = 0.0;
  long evaluations = 0;
  bool latin_hypercube = false;
};

/// Coarse stage (full grid or Latin hypercube) then box-projected
/// Nelder-Mead from several of the best coarse points. Non-finite objective
/// values count as -infinity.
MaximizeResult maximize(const Objective& objective, std::span<const double> lo,
                        std::span<const double> hi, const MaximizeOptions& options = {});

enum class Verdict { AllEntangled, Inconclusive };

struct DetectionResult {
  Verdict verdict = Verdict::Inconclusive;
  InequalityResult result;
};

/// Signs F17-F11-F11 under the reference labels. Refuses mixed states.
DetectionResult entanglement_detect(std::span<const StateSpec> states, const FourOutcomePovm& basis);

struct LinearComparison {
  InequalityResult triangle;
  double linear_value = 0.0;
  bool triangle_only = false;
};

/// `povms` are used as given (labels already applied).
LinearComparison compare_linear(std::span<const DensityMatrix> states,
                                std::span<const FourOutcomePovm> povms, const SignTriple& signs);

/// Same, for a template instance: uses the instance's sign choice (search
/// mode included). The instance must be a triangle.
LinearComparison compare_linear(const NetworkInstance& instance);

/// Two Schmidt states and one pure product state, all parties measuring the
/// entangled basis under the reference labels with signs F17-F11-F11.
/// x = (theta_a, theta_b, pol_u, az_u, pol_v, az_v, phi): Schmidt angles of
/// the two entangled sources, Bloch angles of the product state's qubits and
/// the basis angle (alpha1 = cos phi). `product_source` is 0-based.
double mixed_pure_objective(int product_source, std::span<const double> x);

MaximizeResult maximize_mixed_pure(int product_source, const MaximizeOptions& options = {});

}  // namespace polyloc
