// polyloc: command-line driver for network evaluations, sweeps and checks.
#include "polyloc/discrepancy.hpp"
#include "polyloc/lhv.hpp"
#include "polyloc/scanner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace polyloc;

constexpr int kExitViolation = 2;

ParamMap parse_sets(const std::vector<std::string>& sets) {
  ParamMap out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--set expects name=value, got '" + s + "'");
    out[s.substr(0, eq)] = eval_expression(s.substr(eq + 1), {});
  }
  return out;
}

json signs_json(const std::vector<SignFunction>& fs) {
  json out = json::array();
  for (const auto& f : fs) out.push_back(f.to_string());
  return out;
}

json result_json(const InequalityResult& r) {
  return {{"i1", r.i1}, {"i2", r.i2}, {"s_value", r.s_value}, {"violated", r.violated}};
}

json params_json(const ParamMap& p) {
  json out = json::object();
  for (const auto& [k, v] : p) out[k] = v;
  return out;
}

ParamMap merged(const NetworkTemplate& tmpl, const ParamMap& sets) {
  ParamMap p = tmpl.defaults();
  for (const auto& [k, v] : sets) p[k] = v;
  return p;
}

// CSV either goes to a file or stdout; the JSON summary goes wherever the
// CSV does not.
struct Outputs {
  std::ofstream file;
  std::ostream* csv = &std::cout;
  std::ostream* summary = &std::cout;

  explicit Outputs(const std::string& path, std::ios::openmode mode = std::ios::out) {
    if (path.empty()) {
      csv = nullptr;
    } else if (path == "-") {
      summary = &std::cerr;
    } else {
      file.open(path, mode);
      if (!file) throw std::runtime_error("cannot write '" + path + "'");
      csv = &file;
    }
  }
};

// Number of complete data rows in an earlier sweep output with the same header.
std::size_t resumable_rows(const std::string& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) return 0;
  std::string line;
  if (!std::getline(in, line) || line + "\n" != header) return 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
  }
  return rows;
}

struct Common {
  std::string spec;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--spec", c.spec, "network spec JSON file")->required()->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "parameter override name=value (repeatable)");
}

int cmd_evaluate(const Common& c, const std::string& table_path) {
  const auto tmpl = NetworkTemplate::load(c.spec);
  const ParamMap params = merged(tmpl, parse_sets(c.sets));
  const NetworkInstance inst = tmpl.instantiate(params);
  const PointResult r = evaluate_instance(inst);
  if (!table_path.empty()) {
    std::ofstream out(table_path);
    if (!out) throw std::runtime_error("cannot write '" + table_path + "'");
    write_csv(out, joint_distribution(inst.spec));
  }
  json j = result_json(r.result);
  j["params"] = params_json(params);
  j["signs"] = signs_json(r.fs);
  j["t"] = inst.signs.center + 1;
  j["search"] = inst.signs.search;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& axis_text, const std::string& output,
              bool with_signs, bool gnuplot, bool resume) {
  const auto tmpl = NetworkTemplate::load(c.spec);
  std::vector<Axis> axes;
  for (const auto& a : axis_text) axes.push_back(parse_axis(a));
  const ParamMap fixed = parse_sets(c.sets);

  std::ostringstream header;
  write_sweep_header(header, axes, with_signs);
  std::size_t first = 0;
  if (resume) {
    if (output.empty() || output == "-") throw std::invalid_argument("--resume needs an output file");
    if (gnuplot) throw std::invalid_argument("--resume does not support the gnuplot layout");
    first = std::min(resumable_rows(output, header.str()), grid_size(axes));
  }
  Outputs out(output, first > 0 ? std::ios::app : std::ios::out);
  const auto rows = sweep(tmpl, axes, fixed, first);
  if (out.csv) {
    if (first == 0) *out.csv << header.str();
    write_sweep_rows(*out.csv, axes, rows, with_signs, gnuplot, first);
  }

  long violated = 0;
  long invalid = 0;
  double best = -std::numeric_limits<double>::infinity();
  json argmax = nullptr;
  for (const auto& r : rows) {
    if (!r.valid) {
      ++invalid;
      continue;
    }
    if (r.result.violated) ++violated;
    if (r.result.s_value > best) {
      best = r.result.s_value;
      argmax = json::object();
      for (std::size_t k = 0; k < axes.size(); ++k) argmax[axes[k].name] = r.params[k];
    }
  }
  json j{{"rows", rows.size()}, {"resumed_from", first}, {"violated", violated}, {"invalid", invalid},
         {"max_s", rows.size() > static_cast<std::size_t>(invalid) ? json(best) : json(nullptr)},
         {"argmax", argmax}};
  *out.summary << j.dump(2) << '\n';
  return 0;
}

int cmd_threshold(const Common& c, const std::string& param, double lo, double hi, double tol) {
  const auto tmpl = NetworkTemplate::load(c.spec);
  const double x = find_threshold(tmpl, param, lo, hi, parse_sets(c.sets), tol);
  std::cout << json{{"param", param}, {"threshold", x}, {"bracket", {lo, hi}}, {"tol", tol}}.dump(2) << '\n';
  return 0;
}

int cmd_maximize(const Common& c, const std::vector<std::string>& box, int mixed_row,
                 const MaximizeOptions& options) {
  MaximizeResult r;
  json names = json::array();
  if (mixed_row > 0) {
    r = maximize_mixed_pure(mixed_row - 1, options);
    names = {"theta_a", "theta_b", "polar_u", "azimuth_u", "polar_v", "azimuth_v", "phi"};
  } else {
    if (c.spec.empty()) throw std::invalid_argument("maximize needs --spec or --mixed-pure");
    if (box.empty()) throw std::invalid_argument("maximize needs at least one --param name:lo:hi");
    const auto tmpl = NetworkTemplate::load(c.spec);
    const ParamMap fixed = parse_sets(c.sets);
    std::vector<std::string> keys;
    std::vector<double> lo;
    std::vector<double> hi;
    for (const auto& b : box) {
      const Axis a = parse_axis(b + ":2");
      keys.push_back(a.name);
      lo.push_back(a.lo);
      hi.push_back(a.hi);
      names.push_back(a.name);
    }
    r = maximize(
        [&](std::span<const double> x) {
          ParamMap p = fixed;
          for (std::size_t i = 0; i < keys.size(); ++i) p[keys[i]] = x[i];
          const PointResult pr = evaluate_template(tmpl, p);
          return pr.valid ? pr.result.s_value : std::numeric_limits<double>::quiet_NaN();
        },
        lo, hi, options);
  }
  json argmax = json::object();
  for (std::size_t i = 0; i < r.argmax.size(); ++i) argmax[names[i].get<std::string>()] = r.argmax[i];
  std::cout << json{{"max", r.value}, {"argmax", argmax}, {"coarse_best", r.coarse_best},
                    {"evaluations", r.evaluations}, {"latin_hypercube", r.latin_hypercube}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_lhv(const LhvSuiteOptions& options) {
  const LhvSuiteReport r = run_lhv_suite(options);
  json v = json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"model", x.model_index}, {"model_seed", x.model_seed}, {"signs", signs_json(x.fs)},
                 {"t", x.center + 1}, {"s_value", x.result.s_value}});
  }
  json dumped = json::array();
  for (const auto& p : r.dumped) dumped.push_back(p.string());
  std::cout << json{{"n", options.n}, {"models", options.models}, {"evaluations", r.evaluations},
                    {"max_s", r.max_s}, {"violations", v}, {"dumped", dumped}}
                   .dump(2)
            << '\n';
  return r.violations.empty() ? 0 : kExitViolation;
}

int cmd_detect(const Common& c) {
  const auto tmpl = NetworkTemplate::load(c.spec);
  if (tmpl.size() != 3) throw std::invalid_argument("entanglement detection works on the triangle");
  const ParamMap params = merged(tmpl, parse_sets(c.sets));
  const NetworkInstance inst = tmpl.instantiate(params);
  const json& povms = tmpl.document().at("povms");
  const FourOutcomePovm basis = parse_povm(povms.is_array() ? povms.at(0) : povms, params);
  const DetectionResult d = entanglement_detect(inst.state_specs, basis);
  json j = result_json(d.result);
  j["verdict"] = d.verdict == Verdict::AllEntangled ? "all-entangled" : "inconclusive";
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_compare(const Common& c, const std::vector<std::string>& axis_text, const std::string& output) {
  const auto tmpl = NetworkTemplate::load(c.spec);
  const ParamMap fixed = parse_sets(c.sets);
  if (axis_text.empty()) {
    const LinearComparison r = compare_linear(tmpl.instantiate(merged(tmpl, fixed)));
    std::cout << json{{"triangle", result_json(r.triangle)}, {"linear_value", r.linear_value},
                      {"triangle_only", r.triangle_only}}
                     .dump(2)
              << '\n';
    return 0;
  }
  std::vector<Axis> axes;
  for (const auto& a : axis_text) axes.push_back(parse_axis(a));
  const std::size_t total = grid_size(axes);
  Outputs out(output);
  if (out.csv) {
    for (const auto& a : axes) *out.csv << a.name << ',';
    *out.csv << "triangle_s,linear_value,triangle_only\n";
    out.csv->precision(12);
  }
  long only = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    ParamMap p = fixed;
    std::vector<double> coords(axes.size());
    std::size_t rem = flat;
    for (std::size_t k = axes.size(); k-- > 0;) {
      coords[k] = axes[k].at(static_cast<int>(rem % static_cast<std::size_t>(axes[k].steps)));
      rem /= static_cast<std::size_t>(axes[k].steps);
      p[axes[k].name] = coords[k];
    }
    if (out.csv) {
      for (const double x : coords) *out.csv << x << ',';
    }
    try {
      const LinearComparison r = compare_linear(tmpl.instantiate(p));
      if (r.triangle_only) ++only;
      if (out.csv) *out.csv << r.triangle.s_value << ',' << r.linear_value << ',' << (r.triangle_only ? 1 : 0) << '\n';
    } catch (const std::invalid_argument&) {
      if (out.csv) *out.csv << "nan,nan,0\n";
    }
  }
  *out.summary << json{{"rows", total}, {"triangle_only", only}}.dump(2) << '\n';
  return 0;
}

int cmd_discrepancy(std::vector<std::string> targets, int density, const std::string& known_path,
                    const std::string& output) {
  if (targets.empty()) targets = discrepancy_targets();
  const KnownDiscrepancies known = load_known_discrepancies(known_path);
  Outputs out(output);
  if (out.csv) {
    *out.csv << "target,fitted,scale,max_gap,points,worst_point,printed,computed,known,pass\n";
    out.csv->precision(12);
  }
  json summary = json::array();
  bool all_pass = true;
  for (const auto& t : targets) {
    const TargetReport r = discrepancy_report(t, density, known);
    all_pass = all_pass && r.pass;
    std::string point;
    json point_json = json::object();
    for (const auto& [k, v] : r.worst.point) {
      if (!point.empty()) point += ' ';
      point += k + "=" + std::to_string(v);
      point_json[k] = v;
    }
    if (out.csv) {
      *out.csv << r.target << ',' << r.fitted << ',' << r.scale << ',' << r.max_gap << ',' << r.points << ",\""
               << point << "\"," << r.worst.printed_value << ',' << r.worst.computed_value << ',' << r.known
               << ',' << r.pass << '\n';
    }
    summary.push_back({{"target", r.target}, {"description", r.description}, {"scale", r.scale},
                       {"max_gap", r.max_gap}, {"worst_point", point_json}, {"known", r.known},
                       {"note", r.known_note}, {"pass", r.pass}});
  }
  *out.summary << summary.dump(2) << '\n';
  return all_pass ? 0 : kExitViolation;
}

int cmd_search(const Common& c, int t) {
  const auto tmpl = NetworkTemplate::load(c.spec);
  const ParamMap params = merged(tmpl, parse_sets(c.sets));
  const NetworkInstance inst = tmpl.instantiate(params);
  const int center = t > 0 ? t - 1 : inst.signs.center;
  const SignSearchResult r = search_signs(joint_distribution(inst.spec), center);
  json j = result_json(r.result);
  j["signs"] = signs_json(r.fs);
  j["t"] = r.center + 1;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygon-network nonlocality scanner"};
  app.require_subcommand(1);

  Common common;
  std::string table_path;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate one network point");
  add_common(evaluate, common);
  evaluate->add_option("--table", table_path, "also write the joint distribution as CSV");

  std::vector<std::string> axes;
  std::string output = "-";
  bool with_signs = false;
  bool gnuplot = false;
  bool resume = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep to CSV");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--axis", axes, "name:lo:hi:steps (repeatable)")->required();
  sweep_cmd->add_option("-o,--output", output, "CSV path, '-' for stdout");
  sweep_cmd->add_flag("--signs", with_signs, "add the sign functions used per row");
  sweep_cmd->add_flag("--gnuplot", gnuplot, "blank line between scans of the first axis");
  sweep_cmd->add_flag("--resume", resume, "continue an interrupted sweep in the output file");

  std::string param;
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-7;
  auto* threshold = app.add_subcommand("threshold", "bisect s_value = 1 along one parameter");
  add_common(threshold, common);
  threshold->add_option("--param", param)->required();
  threshold->add_option("--lo", lo)->required();
  threshold->add_option("--hi", hi)->required();
  threshold->add_option("--tol", tol);

  std::vector<std::string> box;
  int mixed_row = 0;
  MaximizeOptions mopt;
  auto* maximize_cmd = app.add_subcommand("maximize", "grid + simplex maximization of s_value");
  maximize_cmd->add_option("--spec", common.spec)->check(CLI::ExistingFile);
  maximize_cmd->add_option("--set", common.sets);
  maximize_cmd->add_option("--param", box, "name:lo:hi (repeatable)");
  maximize_cmd->add_option("--mixed-pure", mixed_row, "two Schmidt + one product source; 1-based product source")
      ->check(CLI::Range(1, 3));
  maximize_cmd->add_option("--levels", mopt.levels);
  maximize_cmd->add_option("--budget", mopt.grid_budget);
  maximize_cmd->add_option("--starts", mopt.starts);
  maximize_cmd->add_option("--seed", mopt.seed);

  LhvSuiteOptions lopt;
  std::string dump_dir;
  auto* lhv = app.add_subcommand("lhv-test", "check the bound on sampled n-local models");
  lhv->add_option("-n,--parties", lopt.n)->check(CLI::Range(3, 6));
  lhv->add_option("--models", lopt.models);
  lhv->add_option("--sign-draws", lopt.sign_draws);
  lhv->add_option("--max-cardinality", lopt.max_cardinality);
  lhv->add_option("--seed", lopt.seed);
  lhv->add_option("--dump-dir", dump_dir, "write violating models here as JSON");

  auto* detect = app.add_subcommand("entanglement-detect", "pure-state entanglement test on the triangle");
  add_common(detect, common);

  std::string compare_output = "-";
  auto* compare = app.add_subcommand("compare-linear", "triangle vs linear-chain detection");
  add_common(compare, common);
  compare->add_option("--axis", axes, "name:lo:hi:steps (repeatable); writes a region CSV");
  compare->add_option("-o,--output", compare_output);

  std::vector<std::string> targets;
  int density = 41;
  std::string known_path = "KNOWN_DISCREPANCIES";
  std::string report_output;
  auto* report = app.add_subcommand("discrepancy-report", "closed forms vs the pipeline");
  report->add_option("--target", targets, "target id (repeatable, default all)");
  report->add_option("--density", density)->check(CLI::Range(2, 10000));
  report->add_option("--known", known_path);
  report->add_option("-o,--output", report_output, "CSV of worst records");
  report->add_flag_callback("--list", [] {
    for (const auto& t : discrepancy_targets()) std::cout << t << "  " << describe_target(t) << '\n';
    throw CLI::Success();
  });

  int t = 0;
  auto* search = app.add_subcommand("search-signs", "best sign functions for one network point");
  add_common(search, common);
  search->add_option("--t", t, "1-based distinguished party");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evaluate) return cmd_evaluate(common, table_path);
    if (*sweep_cmd) return cmd_sweep(common, axes, output, with_signs, gnuplot, resume);
    if (*threshold) return cmd_threshold(common, param, lo, hi, tol);
    if (*maximize_cmd) return cmd_maximize(common, box, mixed_row, mopt);
    if (*lhv) {
      lopt.dump_dir = dump_dir;
      return cmd_lhv(lopt);
    }
    if (*detect) return cmd_detect(common);
    if (*compare) return cmd_compare(common, axes, compare_output);
    if (*report) return cmd_discrepancy(targets, density, known_path, report_output);
    if (*search) return cmd_search(common, t);
  } catch (const std::exception& e) {
    std::cerr << "polyloc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
