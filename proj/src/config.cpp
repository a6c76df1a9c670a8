#include "wnls/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace wnls {

namespace {

using V = ValueType;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& v) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e;
}

bool valid_value(const KeySpec& k, const std::string& v) {
  if (v.empty()) return k.fallback.empty() && k.type != V::choice;
  long l;
  std::uint64_t u;
  double d;
  switch (k.type) {
    case V::integer: return parse_number(v, l);
    case V::unsigned_integer: return v[0] != '-' && parse_number(v, u);
    case V::real: return parse_number(v, d) && std::isfinite(d);
    case V::text: return v.find_first_of("\n#=") == std::string::npos;
    case V::integer_list:
      for (const auto& x : split_list(v))
        if (!parse_number(x, l)) return false;
      return true;
    case V::real_list:
      for (const auto& x : split_list(v))
        if (!parse_number(x, d) || !std::isfinite(d)) return false;
      return true;
    case V::choice: return std::find(k.choices.begin(), k.choices.end(), v) != k.choices.end();
  }
  return false;
}

std::string type_name(ValueType t) {
  switch (t) {
    case V::integer: return "an integer";
    case V::unsigned_integer: return "a non-negative integer";
    case V::real: return "a finite number";
    case V::text: return "a single-line string without # or =";
    case V::integer_list: return "a comma-separated list of integers";
    case V::real_list: return "a comma-separated list of numbers";
    case V::choice: return "one of the listed choices";
  }
  return "";
}

const std::map<std::string, std::vector<KeySpec>>& registry() {
  static const std::map<std::string, std::vector<KeySpec>> r = [] {
    std::map<std::string, std::vector<KeySpec>> m;
    m["sample"] = {
        {"sample.N", V::integer, "16", {}, "cutoff N (modes |n| <= N)"},
        {"sample.alpha", V::real, "0", {}, "decay exponent: g_n <n>^-alpha"},
    };
    m["evolve"] = {
        {"evolve.variant", V::choice, "renormalized",
         {"original", "renormalized", "gauged-truncated", "resonant", "damped-control"}, "flow variant"},
        {"evolve.N", V::integer, "16", {}, "cutoff N"},
        {"evolve.alpha", V::real, "0", {}, "decay exponent of the data"},
        {"evolve.t", V::real, "0.1", {}, "final time"},
        {"evolve.dt", V::real, "0", {}, "time step (0 = automatic)"},
        {"evolve.interval", V::real, "0.01", {}, "time between recorded states"},
        {"evolve.tolerance", V::real, "1e-8", {}, "step-halving tolerance"},
        {"evolve.damping", V::real, "0.5", {}, "damping rate (damped-control only)"},
    };
    m["gauge"] = {
        {"gauge.kind", V::choice, "deterministic", {"deterministic", "random"}, "which gauge to check"},
        {"gauge.N", V::integer, "16", {}, "cutoff N"},
        {"gauge.alpha", V::real, "0", {}, "decay exponent of the data"},
        {"gauge.t", V::real, "0.1", {}, "final time"},
        {"gauge.interval", V::real, "0.01", {}, "time between compared states"},
        {"gauge.tolerance", V::real, "1e-10", {}, "step-halving tolerance"},
        {"gauge.threshold", V::real, "1e-6", {}, "largest accepted L2 gap"},
    };
    m["functional"] = {
        {"functional.j", V::integer, "1", {}, "functional index 1, 2 or 3"},
        {"functional.s", V::real, "-0.1", {}, "Sobolev weight"},
        {"functional.b", V::real, "0.45", {}, "modulation weight"},
        {"functional.delta", V::real, "0.2", {}, "time scale"},
        {"functional.box", V::integer, "8", {}, "frequency box |n| <= box"},
        {"functional.samples", V::unsigned_integer, "20", {}, "number of noise draws"},
    };
    m["study"] = {
        {"study.kind", V::choice, "invariance",
         {"invariance", "convergence", "residual", "z1-scaling", "cancellation", "functional-tails"},
         "study kind"},
        {"study.N", V::integer_list, "", {}, "cutoff(s) or ladder"},
        {"study.t", V::real_list, "", {}, "sample time(s)"},
        {"study.samples", V::unsigned_integer, "", {}, "Monte Carlo samples M"},
        {"study.delta", V::real, "", {}, "time horizon or scale"},
        {"study.alpha", V::real, "", {}, "decay exponent of the data"},
        {"study.s", V::real, "", {}, "Sobolev index"},
        {"study.b", V::real, "", {}, "modulation weight"},
        {"study.box", V::integer, "", {}, "frequency box"},
        {"study.tolerance", V::real, "", {}, "integrator step-halving tolerance"},
        {"study.spacing", V::real, "", {}, "time sampling"},
        {"study.control_samples", V::unsigned_integer, "", {}, "samples of the control flow"},
        {"study.damping", V::real, "", {}, "control damping rate"},
        {"study.q", V::real, "", {}, "false discovery rate"},
        {"study.max_rejections", V::integer, "", {}, "allowed rejections per test family"},
        {"study.corr_factor", V::real, "", {}, "correlation bound factor c (|r| < c/sqrt(M))"},
        {"study.slope_tolerance", V::real, "", {}, "allowed slope deviation"},
        {"study.eps", V::real, "", {}, "exceedance exponent margin"},
        {"study.ratio_bound", V::real, "", {}, "allowed max/min ratio of ladder medians"},
        {"study.violation_bound", V::real, "", {}, "allowed energy identity violation"},
        {"study.duhamel_bound", V::real, "", {}, "allowed Duhamel identity gap"},
        {"study.control_gap", V::real, "", {}, "required control gap"},
        {"study.order_low", V::real, "", {}, "lowest accepted quadrature order"},
        {"study.order_high", V::real, "", {}, "highest accepted quadrature order"},
    };
    m["phase-check"] = {
        {"phase-check.box", V::integer, "50", {}, "check all |n_i| <= box"},
    };
    return m;
  }();
  return r;
}

const KeySpec* find_key(const std::string& command, const std::string& key) {
  static const std::vector<KeySpec> common = {
      {"run.command", V::text, "", {}, "command name"},
      {"run.seed", V::unsigned_integer, "1", {}, "master seed"},
      {"run.out", V::text, "out", {}, "output directory"},
      {"run.threads", V::integer, "0", {}, "worker threads (0 = runtime default)"},
  };
  for (const auto& k : common)
    if (k.name == key) return &k;
  const auto it = registry().find(command);
  if (it == registry().end()) return nullptr;
  for (const auto& k : it->second)
    if (k.name == key) return &k;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c = {"sample", "evolve", "gauge", "functional", "study", "phase-check"};
  return c;
}

std::vector<KeySpec> keys_for(const std::string& command) {
  const auto it = registry().find(command);
  if (it == registry().end()) throw ConfigError("unknown command '" + command + "'");
  std::vector<KeySpec> out;
  for (const char* k : {"run.seed", "run.out", "run.threads"}) out.push_back(*find_key(command, k));
  out.insert(out.end(), it->second.begin(), it->second.end());
  return out;
}

RunConfig::RunConfig(const std::string& command) : command_(command) {
  const auto keys = keys_for(command);
  values_["run.command"] = command;
  for (const auto& k : keys) values_[k.name] = k.fallback;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* k = find_key(command_, key);
  if (!k) throw ConfigError("unknown key '" + key + "' for command '" + command_ + "'");
  if (key == "run.command") {
    if (value != command_) throw ConfigError("run.command: cannot change the command of a config");
    return;
  }
  const std::string v = trim(value);
  if (!valid_value(*k, v)) {
    std::string msg = "invalid value '" + v + "' for key '" + key + "': expected " + type_name(k->type);
    if (k->type == V::choice) {
      msg += " (";
      for (std::size_t i = 0; i < k->choices.size(); ++i) msg += (i ? ", " : "") + k->choices[i];
      msg += ")";
    }
    throw ConfigError(msg);
  }
  values_[key] = v;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "' for command '" + command_ + "'");
  return it->second;
}

long RunConfig::get_int(const std::string& key) const {
  long v = 0;
  if (!parse_number(get(key), v)) throw ConfigError(key + ": not an integer");
  return v;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  std::uint64_t v = 0;
  if (!parse_number(get(key), v)) throw ConfigError(key + ": not a non-negative integer");
  return v;
}

double RunConfig::get_double(const std::string& key) const {
  double v = 0;
  if (!parse_number(get(key), v)) throw ConfigError(key + ": not a number");
  return v;
}

std::vector<int> RunConfig::get_ints(const std::string& key) const {
  std::vector<int> out;
  for (const auto& x : split_list(get(key))) {
    int v = 0;
    if (!parse_number(x, v)) throw ConfigError(key + ": not a list of integers");
    out.push_back(v);
  }
  return out;
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& x : split_list(get(key))) {
    double v = 0;
    if (!parse_number(x, v)) throw ConfigError(key + ": not a list of numbers");
    out.push_back(v);
  }
  return out;
}

RunConfig RunConfig::parse(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string command;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "run.command") command = value;
    else entries.emplace_back(key, value);
  }
  if (command.empty()) throw ConfigError("config: missing run.command");
  RunConfig cfg(command);
  for (const auto& [k, v] : entries) cfg.set(k, v);
  return cfg;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

StudySpec study_spec_from(const RunConfig& cfg) {
  if (cfg.command() != "study") throw ConfigError("study_spec_from: not a study config");
  StudySpec p = StudySpec::defaults(study_kind_from_string(cfg.get("study.kind")));
  p.seed = cfg.seed();
  auto set = [&](const char* key, auto apply) {
    if (!cfg.get(key).empty()) apply(key);
  };
  set("study.N", [&](const char* k) { p.cutoffs = cfg.get_ints(k); });
  set("study.t", [&](const char* k) { p.times = cfg.get_doubles(k); });
  set("study.samples", [&](const char* k) { p.samples = cfg.get_u64(k); });
  set("study.delta", [&](const char* k) { p.delta = cfg.get_double(k); });
  set("study.alpha", [&](const char* k) { p.alpha = cfg.get_double(k); });
  set("study.s", [&](const char* k) { p.s = cfg.get_double(k); });
  set("study.b", [&](const char* k) { p.b = cfg.get_double(k); });
  set("study.box", [&](const char* k) { p.box = static_cast<int>(cfg.get_int(k)); });
  set("study.tolerance", [&](const char* k) { p.step_tolerance = cfg.get_double(k); });
  set("study.spacing", [&](const char* k) { p.spacing = cfg.get_double(k); });
  set("study.control_samples", [&](const char* k) { p.control_samples = cfg.get_u64(k); });
  set("study.damping", [&](const char* k) { p.damping = cfg.get_double(k); });
  set("study.q", [&](const char* k) { p.fdr_q = cfg.get_double(k); });
  set("study.max_rejections", [&](const char* k) { p.max_rejections = static_cast<int>(cfg.get_int(k)); });
  set("study.corr_factor", [&](const char* k) { p.corr_factor = cfg.get_double(k); });
  set("study.slope_tolerance", [&](const char* k) { p.slope_tolerance = cfg.get_double(k); });
  set("study.eps", [&](const char* k) { p.eps = cfg.get_double(k); });
  set("study.ratio_bound", [&](const char* k) { p.ratio_bound = cfg.get_double(k); });
  set("study.violation_bound", [&](const char* k) { p.violation_bound = cfg.get_double(k); });
  set("study.duhamel_bound", [&](const char* k) { p.duhamel_bound = cfg.get_double(k); });
  set("study.control_gap", [&](const char* k) { p.control_gap = cfg.get_double(k); });
  set("study.order_low", [&](const char* k) { p.order_low = cfg.get_double(k); });
  set("study.order_high", [&](const char* k) { p.order_high = cfg.get_double(k); });
  p.validate();
  return p;
}

}  // namespace wnls
