#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpbandits/core_model.hpp"
#include "mpbandits/indices.hpp"
#include "mpbandits/rng.hpp"

namespace mpbandits {

enum class Algorithm {
  kRhoRand,
  kRandTopM,
  kMCTopM,
  kSelfish,
  kMusicalChairs,
  kCentralized,
};

/// Which algorithm a player runs and how its indices are computed.
struct PolicySpec {
  Algorithm algorithm = Algorithm::kMCTopM;
  IndexFlavor flavor = IndexFlavor::kKlUcb;
  ExplorationKind exploration = ExplorationKind::kLogPlusLogLog;
  double tol = kDefaultTolerance;
  /// RandTopM only: a collision forces a uniform resample from TopM even when
  /// the current arm stayed in TopM. Off resamples only when the arm left TopM.
  bool collision_switch_in_topm = true;
  /// Musical Chairs only: length of the uniform exploration phase.
  Round musical_chairs_t0 = 0;

  /// Canonical tag, e.g. "mctopm-klucb", "musical-chairs".
  std::string name() const;
  /// True if the algorithm reads sensing information (models I/II only).
  bool needs_sensing() const;

  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// Parses "<algorithm>[-<index>]": rhorand, randtopm, mctopm, selfish,
/// centralized with index ucb|klucb (default klucb), or musical-chairs.
PolicySpec parse_policy(const std::string& tag);
std::string to_string(Algorithm algorithm);

enum class MusicalChairsPhase { kExploring, kSeeking, kSeated };

/// Everything one decentralized player knows. Policies mutate only this.
struct PlayerState {
  PolicySpec policy;
  int num_arms = 0;
  int num_players = 0;

  std::vector<ArmStatistics> stats;
  ArmId current_arm = 0;
  /// MCTopM "chair" flag s^j(t).
  bool chair = false;
  /// rhoRand rank R^j(t), 1-based.
  int rank = 1;
  /// g^j(t) after the latest observation, and g^j(t-1) before it.
  std::vector<double> indices;
  std::vector<double> prev_indices;

  MusicalChairsPhase mc_phase = MusicalChairsPhase::kExploring;
  std::vector<ArmId> mc_top_m;

  /// MCTopM transitions (1)..(5) stored at [0]..[4].
  std::array<std::int64_t, 5> transition_counts{};
  int last_transition = 0;
  std::int64_t switch_count = 0;
  /// Times the constrained TopM subset was empty and uniform-over-TopM was used.
  std::int64_t fallback_count = 0;
  std::int64_t decisions = 0;

  /// Scratch buffers reused across rounds.
  std::vector<std::uint8_t> in_top_m;
  std::vector<ArmId> scratch;
};

/// Fresh state for a player; call initial_arm before the first round.
PlayerState make_player_state(const PolicySpec& policy, int num_arms, int num_players);

/// First decision: uniform arm (and uniform rank for rhoRand).
ArmId initial_arm(PlayerState& state, Rng& rng);

/// Folds the observation of the round just played into the per-arm counters.
void observe(PlayerState& state, const PlayerObservation& obs);

/// Shifts g(t) into g(t-1) and recomputes g(t) from the current counters.
void refresh_indices(PlayerState& state, Round t);

struct TopMSet {
  std::vector<ArmId> arms;  // ascending ids
  std::vector<double> index_values;

  bool contains(ArmId arm) const;
};

/// The M arms with the largest indices; boundary ties broken uniformly.
TopMSet top_m(std::span<const double> indices, int num_players, Rng& rng);

/// Arm at the `rank`-th largest index (1-based); ties broken uniformly.
ArmId arm_at_rank(std::span<const double> indices, int rank, Rng& rng);

/// Uniform argmax.
ArmId argmax_uniform(std::span<const double> indices, Rng& rng);

// Each step consumes the observation of round t and returns A^j(t+1).
ArmId rho_rand_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng);
ArmId rand_topm_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng);

struct McTopMDecision {
  ArmId arm = 0;
  int transition = 0;  // 1..5
};
McTopMDecision mctopm_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng);

ArmId selfish_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng);
ArmId musical_chair_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng);

/// Dispatches on state.policy.algorithm (decentralized algorithms only).
ArmId player_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng);

/// Centralized multiple-play kl-UCB: the M arms with the largest indices on
/// the pooled counters, returned in ascending arm order (player j gets the
/// j-th). With t = 0 all arms are unexplored and the draw is uniform.
std::vector<ArmId> centralized_klucb_step(std::span<const ArmStatistics> pooled, Round t,
                                          int num_players, const PolicySpec& policy, Rng& rng);

/// Index used by a policy for one arm: sensing-based for index policies,
/// reward-based for Selfish (and whenever sensing is censored).
double policy_index(const ArmStatistics& stats, Round t, const PolicySpec& policy);

}  // namespace mpbandits
