#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpbandits/rng.hpp"

namespace mpbandits {

/// Arms are identified by 0-based positions into the means vector.
using ArmId = int;
/// Rounds are 1-based; round 0 means "before the first play".
using Round = std::int64_t;

enum class ObservationModel {
  kSensingAndCollision,   // I: sensing Y and collision bit C both observed
  kSensingThenCollision,  // II: Y observed, C observed only when Y = 1
  kNoSensing,             // III: only the reward r = Y * !C
};

std::string to_string(ObservationModel model);
ObservationModel parse_observation_model(const std::string& text);

/// K Bernoulli arms. Means are validated on construction; the sorted view is
/// cached because every bound and regret term reads it.
class BanditInstance {
 public:
  explicit BanditInstance(std::vector<double> means);

  int num_arms() const { return static_cast<int>(means_.size()); }
  double mean(ArmId arm) const { return means_[static_cast<std::size_t>(arm)]; }
  const std::vector<double>& means() const { return means_; }

  /// m-th largest mean, 1-based (mu*_1 is the largest).
  double best_mean(int m) const { return sorted_desc_[static_cast<std::size_t>(m - 1)]; }
  const std::vector<double>& sorted_means_desc() const { return sorted_desc_; }

  /// Oracle reward per round: sum of the M largest means.
  double oracle_round_reward(int num_players) const;

  /// Membership in P_M: mu*_M > mu*_{M+1}. M = K is always valid.
  bool in_p_m(int num_players) const;

  friend bool operator==(const BanditInstance& a, const BanditInstance& b) {
    return a.means_ == b.means_;
  }

 private:
  std::vector<double> means_;
  std::vector<double> sorted_desc_;
};

struct ArmPartition {
  std::vector<ArmId> best;   // M-best, ascending ids
  std::vector<ArmId> worst;  // M-worst, ascending ids
};

/// Throws std::invalid_argument when M is out of [1, K] or the instance is
/// not in P_M.
ArmPartition m_best_m_worst(const BanditInstance& instance, int num_players);

struct CollisionResolution {
  std::vector<std::uint8_t> collided;    // per player
  std::vector<int> arm_collision_counts; // per arm: multiplicity if >= 2, else 0
};

CollisionResolution resolve_collisions(std::span<const ArmId> actions, int num_arms);

struct RoundResult {
  std::vector<ArmId> arms;          // A^j(t)
  std::vector<std::uint8_t> sensing;  // Y_{A^j(t), t}
  std::vector<std::uint8_t> collided;
  std::vector<std::uint8_t> reward;
  std::vector<int> arm_collision_counts;
  /// One Bernoulli draw per arm, drawn whether or not the arm was played.
  std::vector<std::uint8_t> arm_draws;
};

/// Draws exactly K uniforms (one per arm, in arm order) and resolves the round.
RoundResult sample_round(const BanditInstance& instance, std::span<const ArmId> actions,
                         Rng& rng);
/// Buffer-reusing variant of sample_round; same draws, same result.
void sample_round_into(const BanditInstance& instance, std::span<const ArmId> actions,
                       Rng& rng, RoundResult& out);

struct PlayerObservation {
  ArmId arm = 0;
  std::optional<bool> sensing;
  std::optional<bool> collided;
  bool reward = false;

  /// Collision bit as seen by a policy: a censored bit reads as "no collision".
  bool saw_collision() const { return collided.value_or(false); }

  friend bool operator==(const PlayerObservation&, const PlayerObservation&) = default;
};

PlayerObservation censor(const RoundResult& result, ObservationModel model, int player);

void validate_actions(std::span<const ArmId> actions, int num_arms);

}  // namespace mpbandits
