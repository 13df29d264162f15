#ifndef APSTRIP_EXPERIMENTS_HPP
#define APSTRIP_EXPERIMENTS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace apstrip {

// A finished experiment: fixed column order, cells already in their final
// printed form (shortest round-trip for doubles), metadata echoed as '#'
// comment lines, and the list of violated assertions (empty = pass).
struct ResultTable {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> violations;

  bool passed() const { return violations.empty(); }

  // '#' metadata block (config echo, status, violations, wall time), then
  // the header and rows.  Two runs of the same config agree on every line
  // that does not start with '#'.
  std::string csv() const;
  nlohmann::json json() const;
};

// Flat "key = value" config text: blank lines and '#' comments ignored,
// one experiment per document.  parse_config validates the experiment id,
// rejects unknown and duplicate keys by name, type-checks every value and
// fills defaults, so the returned config is ready to run.
struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> params;

  int get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct ExperimentInfo {
  std::string id;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> defaults;
};

// All runnable experiments with their parameter defaults, in a fixed order.
const std::vector<ExperimentInfo>& experiment_catalog();

ResultTable run_experiment(const ExperimentConfig& cfg);

}  // namespace apstrip

#endif  // APSTRIP_EXPERIMENTS_HPP
