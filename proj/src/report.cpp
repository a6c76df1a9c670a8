#include "wnls/report.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace wnls {

Verdict make_verdict(std::string name, double statistic, const std::string& comparison, double threshold,
                     double threshold_hi) {
  Verdict v{std::move(name), statistic, comparison, threshold, threshold_hi, false};
  if (comparison == "<") v.passed = statistic < threshold;
  else if (comparison == "<=") v.passed = statistic <= threshold;
  else if (comparison == ">") v.passed = statistic > threshold;
  else if (comparison == ">=") v.passed = statistic >= threshold;
  else if (comparison == "==") v.passed = statistic == threshold;
  else if (comparison == "in") v.passed = statistic >= threshold && statistic <= threshold_hi;
  else throw std::invalid_argument("verdict: unknown comparison '" + comparison + "'");
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::logic_error("csv: row width does not match header");
  rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += r[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

bool ExperimentReport::passed() const {
  if (verdicts.empty()) return false;
  for (const auto& v : verdicts)
    if (!v.passed) return false;
  return true;
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["spec"] = spec;
  j["stats"] = stats;
  j["failures"] = failures;
  j["notes"] = notes;
  j["passed"] = passed();
  auto arr = nlohmann::json::array();
  for (const auto& v : verdicts) {
    nlohmann::json e{{"name", v.name}, {"statistic", json_number(v.statistic)}, {"comparison", v.comparison},
                     {"threshold", json_number(v.threshold)}, {"passed", v.passed}};
    if (v.comparison == "in") e["threshold_hi"] = json_number(v.threshold_hi);
    arr.push_back(std::move(e));
  }
  j["verdicts"] = std::move(arr);
  return j;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace wnls
