#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mpbandits/core_model.hpp"

namespace mpbandits {

/// Counters accumulated over one episode.
struct EpisodeCounters {
  int num_arms = 0;
  int num_players = 0;
  Round horizon = 0;

  /// T_k^j(T), indexed [player][arm].
  std::vector<std::vector<std::int64_t>> draws;
  /// C_k(T): colliding players per arm, counted with multiplicity.
  std::vector<std::int64_t> colliding_players;
  std::vector<std::int64_t> switches;
  /// MCTopM transitions (1)..(5) per player; zero for other policies.
  std::vector<std::array<std::int64_t, 5>> transitions;
  /// Sum of realized rewards r^j(t) over players and rounds.
  std::int64_t realized_reward = 0;

  std::vector<Round> checkpoints;
  std::vector<double> cumulative_pseudo_regret;
  std::vector<std::int64_t> cumulative_collisions;

  EpisodeCounters() = default;
  EpisodeCounters(int arms, int players, Round horizon);

  /// T_k(T) = sum_j T_k^j(T).
  std::int64_t arm_draws(ArmId arm) const;
  std::int64_t total_draws() const;
  std::int64_t total_collisions() const;
  std::int64_t total_switches() const;
  std::array<std::int64_t, 5> total_transitions() const;

  /// Adds one resolved round (actions and collision flags per player).
  void record_round(std::span<const ArmId> actions, std::span<const std::uint8_t> collided,
                    std::span<const std::uint8_t> rewards);

  friend bool operator==(const EpisodeCounters&, const EpisodeCounters&) = default;
};

struct DecompositionTerms {
  double term_a = 0.0;  // sub-optimal selections
  double term_b = 0.0;  // optimal arms not selected; may be negative
  double term_c = 0.0;  // weighted colliding players
  double sum() const { return term_a + term_b + term_c; }

  friend bool operator==(const DecompositionTerms&, const DecompositionTerms&) = default;
};

struct SuboptimalDrawRate {
  ArmId arm = 0;
  double rate = 0.0;  // 1 / kl(mu_k, mu*_M), per player
};

struct LowerBoundReport {
  double ours = 0.0;
  double zhao = 0.0;
  std::vector<SuboptimalDrawRate> per_arm_draw_rate;
};

/// (sum_m mu*_m) T - sum_k mu_k (T_k(T) - C_k(T)).
double pseudo_regret(const EpisodeCounters& counters, const BanditInstance& instance, int num_players);
/// (sum_m mu*_m) T - realized rewards.
double realized_regret(const EpisodeCounters& counters, const BanditInstance& instance,
                       int num_players);
DecompositionTerms decomposition(const EpisodeCounters& counters, const BanditInstance& instance,
                                 int num_players);

/// M * sum_{k in M-worst} (mu*_M - mu_k) / kl(mu_k, mu*_M).
double lower_bound_ours(const BanditInstance& instance, int num_players);
/// sum_{k in M-worst} sum_{j <= M} (mu*_M - mu_k) / kl(mu_k, mu*_j).
double lower_bound_zhao(const BanditInstance& instance, int num_players);
LowerBoundReport lower_bounds(const BanditInstance& instance, int num_players);

/// Finite-horizon bound on E[T_k^j(T)] for one player and a sub-optimal arm k,
/// with the explicit constants (kl' is d/dx kl(x, y)). Requires T >= 3.
double suboptimal_draw_upper_bound(const BanditInstance& instance, int num_players, ArmId arm,
                                   Round horizon);

struct PropertyCheck {
  bool holds = false;
  /// Distance to the boundary; negative when violated.
  double margin = 0.0;
};

/// Expectation-level check that regret >= term (a): the paired difference
/// regret - term_a must have mean >= -3 standard errors.
PropertyCheck check_regret_covers_term_a(std::span<const double> pseudo_regrets, std::span<const double> term_a);

/// Pathwise check: term (b) <= (mu*_1 - mu*_M) (sum_{worst} T_k + sum_{best} C_k).
PropertyCheck check_term_b_bound(const EpisodeCounters& counters, const BanditInstance& instance,
                           int num_players);

}  // namespace mpbandits
