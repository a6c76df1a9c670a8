#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace wnls {

/// One pass/fail decision with the statistic and threshold it was taken on.
struct Verdict {
  std::string name;
  double statistic = 0.0;
  std::string comparison;  // "<", "<=", ">", ">=", "in", or "==" (statistic vs threshold)
  double threshold = 0.0;
  double threshold_hi = 0.0;  // upper end for "in"
  bool passed = false;
};

/// Evaluates `statistic comparison threshold` and records the result.
Verdict make_verdict(std::string name, double statistic, const std::string& comparison, double threshold,
                     double threshold_hi = 0.0);

/// Raw per-cell data with a single header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string to_string() const;
};

/// Shortest round-trip text for a double ("nan", "inf" and "-inf" for non-finite values).
std::string format_double(double v);
/// JSON has no non-finite numbers; those go out as strings.
nlohmann::json json_number(double v);

struct ExperimentReport {
  std::string kind;
  nlohmann::json spec;   // resolved study parameters
  nlohmann::json stats;  // named statistics
  std::vector<Verdict> verdicts;
  CsvTable cells;
  long failures = 0;  // integrator failures, counted per trajectory
  std::vector<std::string> notes;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Stable-order JSON text (object keys sorted, 2-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);

}  // namespace wnls
