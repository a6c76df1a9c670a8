#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wnls/experiments.hpp"

namespace wnls {

/// Unknown key, malformed value, or missing command.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ValueType { integer, unsigned_integer, real, text, integer_list, real_list, choice };

struct KeySpec {
  std::string name;  // dotted, e.g. "study.samples"
  ValueType type;
  std::string fallback;  // "" means "use the built-in default for this kind"
  std::vector<std::string> choices;
  std::string help;
};

/// Commands the tool accepts, in display order.
const std::vector<std::string>& known_commands();
/// Keys accepted for `command`, run.* keys first.
std::vector<KeySpec> keys_for(const std::string& command);

/*!
 * Resolved configuration of one run.
 *
 * Textual form: one `section.key = value` per line, keys sorted, `#` starts a
 * comment. Every key of the command is present after resolution, so the text
 * round-trips losslessly; unknown keys are rejected.
 */
class RunConfig {
 public:
  /// All keys at their defaults.
  explicit RunConfig(const std::string& command);

  static RunConfig parse(const std::string& text);
  std::string to_text() const;

  const std::string& command() const { return command_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Validates key and value; throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;

  long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  std::uint64_t seed() const { return get_u64("run.seed"); }
  std::string out_dir() const { return get("run.out"); }
  int threads() const { return static_cast<int>(get_int("run.threads")); }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

/// StudySpec for a `study` config: kind defaults, overridden by every non-empty study.* key.
StudySpec study_spec_from(const RunConfig& cfg);

}  // namespace wnls
