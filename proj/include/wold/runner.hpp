#ifndef WOLD_RUNNER_HPP
#define WOLD_RUNNER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wold/serialization.hpp"

namespace wold {

struct RunOptions {
  Real caps_scale = 1;          // multiplies every truncation cap
  std::uint64_t seed_offset = 0;  // added to every instance seed
  Real tol_scale = 1;           // multiplies every task tolerance
  int jobs = 1;                 // concurrent tasks
};

struct TaskResult {
  std::size_t index = 0;
  std::string op;
  std::string instance;
  Real tol = 0;
  bool pass = false;
  ResidualTable residuals;
  Json details = Json::object();
  std::string error;
  double wall_ms = 0;
};

struct Report {
  std::string scenario;
  Json options = Json::object();
  Json instances = Json::array();
  std::vector<TaskResult> tasks;
  bool pass() const;
  Json to_json() const;
  /// One row per residual: task,op,instance,residual,value,tol,pass.
  std::string to_csv() const;
};

/// Operations understood by the runner, with their default tolerances.
const std::vector<std::pair<std::string, Real>>& task_catalog();

/// Validates and runs a config document. Throws ConfigError for malformed
/// configs and for instances that cannot be built.
Report run_config(const Json& config, const RunOptions& options = {});

enum class OutputFormat { json, csv };

/// Reads the config, runs it and writes the report. Returns the process exit
/// code: 0 all tasks pass, 2 some task failed, 1 config or IO error.
int run_files(const std::string& config_path, const std::string& out_path, const RunOptions& options,
              OutputFormat format);

}  // namespace wold

#endif  // WOLD_RUNNER_HPP
