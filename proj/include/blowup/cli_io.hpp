#pragma once

#include "blowup/experiments.hpp"
#include "blowup/lifespan_bounds.hpp"
#include "blowup/pde_solvers.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace blowup {

struct SweepSettings {
  std::vector<double> epsilons;
  bool auto_extent = true;
  int max_extent_doublings = 3;
  double slope_tolerance = 0.15;
};

struct RunConfig {
  std::string problem_id = "run";
  EvolutionProblem problem;
  Controls controls;
  SweepSettings sweep;
  std::string out_dir = ".";
  std::uint64_t seed = 7;
};

/// Every schema violation found, each prefixed with its JSON path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Throws ConfigError (schema) or std::runtime_error (missing file, bad JSON).
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_json(const nlohmann::json& j);
/// Complete JSON form; parse_config_json(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const RunConfig& c);

/// Shortest round-trip decimal.
std::string format_double(double v);

/// Raised on I/O failures; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string record_csv_header();
std::string record_csv_row(const BlowupRecord& r);

std::string records_csv(const std::vector<BlowupRecord>& rows);
std::string trace_csv(const FunctionalTrace& tr);
/// {problem_id, slope, intercept, r2_power, exp_slope, r2_exp, verdict, rows}.
nlohmann::json sweep_summary(const SweepResult& sr);
/// "log_eps log_T" lines for the fitted rows, preceded by a comment header.
std::string loglog_dat(const SweepResult& sr);

/// Writes `content` byte-for-byte, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace blowup
