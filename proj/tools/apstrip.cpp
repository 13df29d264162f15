#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "apstrip/experiments.hpp"

namespace {

int run_command(const std::string& config_path, std::string out_dir,
                const std::string& format) {
  apstrip::ExperimentConfig cfg;
  try {
    cfg = apstrip::parse_config_file(config_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (out_dir.empty()) out_dir = cfg.params.at("out");

  apstrip::ResultTable table;
  try {
    table = apstrip::run_experiment(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    // A guarantee the computation relies on failed mid-run; report it as the
    // violated bound.
    std::cerr << cfg.experiment << ": FAIL\n  " << e.what() << "\n";
    return 1;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::filesystem::path base = std::filesystem::path(out_dir) / cfg.experiment;
  if (format == "csv" || format == "both") {
    std::ofstream os(base.string() + ".csv");
    if (!os) {
      std::cerr << "cannot write " << base.string() << ".csv\n";
      return 2;
    }
    os << table.csv();
  }
  if (format == "json" || format == "both") {
    std::ofstream os(base.string() + ".json");
    if (!os) {
      std::cerr << "cannot write " << base.string() << ".json\n";
      return 2;
    }
    os << table.json().dump(2) << "\n";
  }

  if (table.passed()) {
    std::cout << cfg.experiment << ": PASS (" << table.rows.size() << " rows)\n";
    return 0;
  }
  std::cout << cfg.experiment << ": FAIL\n";
  for (const std::string& v : table.violations) std::cout << "  " << v << "\n";
  return 1;
}

int list_command() {
  for (const apstrip::ExperimentInfo& info : apstrip::experiment_catalog()) {
    std::cout << info.id << "\n    " << info.summary << "\n    defaults:";
    for (const auto& [key, value] : info.defaults) std::cout << " " << key << "=" << value;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"almost-periodic strip-function experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format = "both";
  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "path to a key = value config file")->required();
  run->add_option("--out", out_dir, "output directory (default: config 'out' key or .)");
  run->add_option("--format", format, "table format: csv, json, or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  CLI::App* list = app.add_subcommand("list", "list experiments and their defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) return list_command();
  return run_command(config_path, out_dir, format);
}
