// Closed-form reference expressions checked against the first-principles
// pipeline, with a fitted global scale per target.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace polyloc {

struct DiscrepancyRecord {
  std::string target;
  std::vector<std::pair<std::string, double>> point;
  double printed_value = 0.0;
  double computed_value = 0.0;  // before scaling
  double gap = 0.0;             // |a - c b| / max(1, |a|, |c b|)
};

struct TargetReport {
  std::string target;
  std::string description;
  bool fitted = true;   // false: compared at scale 1
  double scale = 1.0;
  double max_gap = 0.0;
  long points = 0;
  DiscrepancyRecord worst;
  bool known = false;
  std::string known_note;
  bool pass = false;
};

inline constexpr double kDiscrepancyTol = 1e-6;

using KnownDiscrepancies = std::map<std::string, std::string>;

/// Lines of the form `target-id: note`; '#' starts a comment.
KnownDiscrepancies load_known_discrepancies(const std::filesystem::path& path);

std::vector<std::string> discrepancy_targets();
std::string describe_target(const std::string& id);

/// Evaluates one target on a grid with `density` points per axis (reduced
/// for high-dimensional targets to keep roughly 2e4 points).
TargetReport discrepancy_report(const std::string& target, int density,
                                const KnownDiscrepancies& known);

}  // namespace polyloc
