#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "holonet/experiments.hpp"

namespace holonet::cli {

// Flat key-value configuration with [sections]:
//
//   [model]
//   widths = 1, 16, 16
//   alpha = 0.5
//
// Every key has a default; unknown sections or keys are rejected.
struct ConfigKey {
  std::string section;
  std::string key;
  std::string default_value;
  std::string help;
};

const std::vector<ConfigKey>& config_schema();

class RunConfig {
 public:
  RunConfig();

  // Throws InputError on syntax errors and unknown keys.
  void merge(std::istream& in, const std::string& source_name);
  void merge_file(const std::string& path);
  // "section.key=value"
  void set(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::string& text(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key) const;
  long integer(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  // Type-checks every key and the cross-key constraints of the selected
  // command. Throws InputError.
  void validate() const;

  // Resolved configuration in schema order; feeding it back reproduces the run.
  void write(std::ostream& out) const;

  FilterBankSpec bank() const;
  ModelSpec model() const;
  OptimizerConfig optimizer() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace holonet::cli
