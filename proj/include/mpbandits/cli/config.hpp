#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpbandits/simulator.hpp"

namespace mpbandits::cli {

/// Configuration problem with a "source:line: message" rendering.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<int> repetitions;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  SimulationConfig simulation;
  /// One entry for `run`; the `policies` list for `compare`.
  std::vector<PolicySpec> policies;
  /// Effective configuration after defaults and overrides, for the manifest.
  nlohmann::json echo;
};

/// Keys:
///   means [number] | uniform_arms int, K int (optional cross-check),
///   M int, T int, policy string | policies [string], reps int, seed uint64,
///   model "I"|"II"|"III", exploration "log"|"log+3loglog", tol number,
///   checkpoints "auto"|"every"|"geometric", geometric_ratio number,
///   musical_chairs_t0 int, randtopm_collision_resample bool.
ExperimentConfig parse_config_text(const std::string& text, const std::string& source,
                                   const ConfigOverrides& overrides = {});
ExperimentConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {});

/// "0.1,0.2,0.9" -> {0.1, 0.2, 0.9}.
std::vector<double> parse_number_list(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

}  // namespace mpbandits::cli
