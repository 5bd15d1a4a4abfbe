#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mpbandits/analysis.hpp"
#include "mpbandits/core_model.hpp"
#include "mpbandits/indices.hpp"
#include "mpbandits/policies.hpp"
#include "mpbandits/rng.hpp"

namespace mpbandits {

enum class CheckpointMode {
  kAuto,        // every round up to T = 10^4, geometric above
  kEveryRound,
  kGeometric,
};

std::string to_string(CheckpointMode mode);

struct SimulationConfig {
  /// Used when uniform_random_instance is false.
  std::vector<double> means;
  /// Draw a fresh mu ~ U[0,1]^K per repetition (rejecting draws outside P_M).
  bool uniform_random_instance = false;
  int uniform_num_arms = 0;

  int num_players = 1;
  Round horizon = 1;
  ObservationModel observation_model = ObservationModel::kSensingAndCollision;
  PolicySpec policy;
  int repetitions = 1;
  std::uint64_t master_seed = 0;
  CheckpointMode checkpoints = CheckpointMode::kAuto;
  double geometric_ratio = 1.1;
  std::string output_dir;

  int num_arms() const;
  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

/// Strictly increasing rounds ending at T.
std::vector<Round> checkpoint_schedule(const SimulationConfig& config);

inline constexpr std::uint64_t kEnvironmentStream = 0x8000000000000000ULL;
inline constexpr std::uint64_t kInstanceStream = 0x8000000000000001ULL;

/// Seed of repetition `rep` (splitmix64 of master + rep).
std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t rep);
/// Seed of player j's private generator within a repetition.
std::uint64_t player_seed(std::uint64_t rep_seed, int player);

/// Instance used by repetition `rep`: the explicit means, or a uniform
/// draw from the repetition's instance stream.
BanditInstance repetition_instance(const SimulationConfig& config, int rep);

struct EpisodeTrace {
  BanditInstance instance{std::vector<double>{0.0}};
  EpisodeCounters counters;
  /// Per-player per-arm statistics at the end of the episode (empty for the
  /// centralized controller, which keeps pooled_stats instead).
  std::vector<std::vector<ArmStatistics>> final_stats;
  std::vector<ArmStatistics> pooled_stats;
  std::int64_t fallback_count = 0;

  friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

/// Called after every round t once the players have absorbed their
/// observations. `players` is empty for the centralized controller.
using RoundObserver = std::function<void(Round t, std::span<const PlayerState> players)>;

EpisodeTrace run_episode(const SimulationConfig& config, int rep_index,
                         const RoundObserver& observer = {});

struct RepetitionRecord {
  int rep = 0;
  std::vector<double> means;
  double pseudo_regret = 0.0;
  double realized_regret = 0.0;
  DecompositionTerms terms;
  std::int64_t collisions = 0;
  std::int64_t switches = 0;
  std::array<std::int64_t, 5> transitions{};
  std::int64_t fallbacks = 0;
  /// T_k(T) per arm summed over players.
  std::vector<std::int64_t> arm_draws;
  double lb_ours = 0.0;
  double lb_zhao = 0.0;

  friend bool operator==(const RepetitionRecord&, const RepetitionRecord&) = default;
};

struct MonteCarloSummary {
  SimulationConfig config;
  std::string generator;

  std::vector<Round> checkpoints;
  std::vector<double> mean_regret;
  std::vector<double> std_regret;
  std::vector<double> mean_cum_collisions;
  /// Bounds averaged over the repetitions' instances (constant for a fixed instance).
  double mean_lb_ours = 0.0;
  double mean_lb_zhao = 0.0;

  std::vector<RepetitionRecord> reps;

  DecompositionTerms mean_terms;
  double mean_final_regret = 0.0;
  double std_final_regret = 0.0;
  double mean_collisions = 0.0;
  double mean_switches = 0.0;
  std::array<double, 5> mean_transitions{};

  friend bool operator==(const MonteCarloSummary& a, const MonteCarloSummary& b) {
    return a.checkpoints == b.checkpoints && a.mean_regret == b.mean_regret &&
           a.std_regret == b.std_regret && a.mean_cum_collisions == b.mean_cum_collisions &&
           a.reps == b.reps && a.mean_lb_ours == b.mean_lb_ours &&
           a.mean_lb_zhao == b.mean_lb_zhao;
  }
};

/// Runs config.repetitions independent episodes on `threads` workers.
/// The result does not depend on the number of threads.
MonteCarloSummary run_monte_carlo(const SimulationConfig& config, int threads = 1);

}  // namespace mpbandits
