#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpbandits/simulator.hpp"
#include "mpbandits/tree_explorer.hpp"

namespace mpbandits::cli {

inline constexpr int kSchemaVersion = 1;

/// Filesystem failure while writing or reading artifacts.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
/// RFC-4180 field: quoted when it holds a comma, quote or line break.
std::string csv_field(const std::string& value);

/// One row per repetition and policy.
std::string summary_csv(const std::vector<MonteCarloSummary>& runs);
/// One row per checkpoint and policy.
std::string curves_csv(const std::vector<MonteCarloSummary>& runs);
/// Final pseudo-regret histogram per policy on its own equal-width bins.
std::string hist_csv(const std::vector<MonteCarloSummary>& runs, int bins = 40);
/// Bounds for M = 1..K on one instance.
std::string lower_bounds_csv(const BanditInstance& instance);
/// Per (M, M-worst arm) draw rate 1 / kl(mu_k, mu*_M).
std::string draw_rates_csv(const BanditInstance& instance);
std::string tree_csv(const GameTree& tree);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);
std::string utc_timestamp(std::chrono::system_clock::time_point when);
std::string build_identifier();

/// Writes artifacts into one directory and the manifest describing them.
/// Files written through a session that is not committed are removed when
/// the session is destroyed.
class OutputSession {
 public:
  OutputSession(std::filesystem::path dir, std::string command);
  ~OutputSession();
  OutputSession(const OutputSession&) = delete;
  OutputSession& operator=(const OutputSession&) = delete;

  void write(const std::string& name, const std::string& bytes);
  /// Writes manifest.json listing every artifact and keeps the outputs.
  void commit(const nlohmann::json& config_echo);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Artifact {
    std::string name;
    std::string sha256;
    std::uintmax_t bytes = 0;
  };

  std::filesystem::path dir_;
  std::string command_;
  std::chrono::system_clock::time_point started_;
  std::vector<Artifact> artifacts_;
  bool created_dir_ = false;
  bool committed_ = false;
};

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Re-hashes every file listed in dir/manifest.json.
VerifyResult verify_manifest(const std::filesystem::path& dir);

}  // namespace mpbandits::cli
