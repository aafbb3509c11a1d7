#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "iftrace/backend.hpp"

namespace iftrace {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what);
};

struct ToolConfig {
  BackendConfig backend;
  std::vector<std::string> techniques = {"net-level", "gate-level"};
  std::string prompt_dir;  // defaults to <data dir>/templates
  std::size_t context_budget_chars = 24000;
  bool include_clocks = false;
  int workers = 1;
};

// Baked-in location of bundled templates and the benchmark suite.
std::string default_data_dir();

ToolConfig default_config();

// Parses a JSON config file; unset fields keep their defaults.
ToolConfig load_config(const std::string& path);

// Validates directory existence, budget >= 1000, worker count, and
// backend-kind completeness. Throws ConfigError.
void validate_config(const ToolConfig& cfg);

}  // namespace iftrace
