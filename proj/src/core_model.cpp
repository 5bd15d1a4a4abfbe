#include "mpbandits/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace mpbandits {

std::string to_string(ObservationModel model) {
  switch (model) {
    case ObservationModel::kSensingAndCollision:
      return "I";
    case ObservationModel::kSensingThenCollision:
      return "II";
    case ObservationModel::kNoSensing:
      return "III";
  }
  return "?";
}

ObservationModel parse_observation_model(const std::string& text) {
  if (text == "I" || text == "1" || text == "sensing-and-collision") {
    return ObservationModel::kSensingAndCollision;
  }
  if (text == "II" || text == "2" || text == "sensing-then-collision") {
    return ObservationModel::kSensingThenCollision;
  }
  if (text == "III" || text == "3" || text == "no-sensing") {
    return ObservationModel::kNoSensing;
  }
  throw std::invalid_argument("unknown observation model '" + text + "'");
}

BanditInstance::BanditInstance(std::vector<double> means) : means_(std::move(means)) {
  if (means_.empty()) {
    throw std::invalid_argument("bandit instance needs at least one arm");
  }
  for (double mu : means_) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
      throw std::invalid_argument("arm means must lie in [0, 1]");
    }
  }
  sorted_desc_ = means_;
  std::sort(sorted_desc_.begin(), sorted_desc_.end(), std::greater<>());
}

double BanditInstance::oracle_round_reward(int num_players) const {
  return std::accumulate(sorted_desc_.begin(), sorted_desc_.begin() + num_players, 0.0);
}

bool BanditInstance::in_p_m(int num_players) const {
  if (num_players < 1 || num_players > num_arms()) return false;
  if (num_players == num_arms()) return true;
  return best_mean(num_players) > best_mean(num_players + 1);
}

ArmPartition m_best_m_worst(const BanditInstance& instance, int num_players) {
  const int k = instance.num_arms();
  if (num_players < 1 || num_players > k) {
    throw std::invalid_argument("number of players must be in [1, K]");
  }
  if (!instance.in_p_m(num_players)) {
    throw std::invalid_argument(
        "instance not in P_M: the M-th and (M+1)-th largest means are tied");
  }
  const double threshold = instance.best_mean(num_players);
  ArmPartition partition;
  for (ArmId arm = 0; arm < k; ++arm) {
    (instance.mean(arm) >= threshold ? partition.best : partition.worst).push_back(arm);
  }
  return partition;
}

void validate_actions(std::span<const ArmId> actions, int num_arms) {
  if (actions.empty()) throw std::invalid_argument("joint action is empty");
  for (ArmId arm : actions) {
    if (arm < 0 || arm >= num_arms) {
      throw std::invalid_argument("joint action names an arm outside [0, K)");
    }
  }
}

CollisionResolution resolve_collisions(std::span<const ArmId> actions, int num_arms) {
  validate_actions(actions, num_arms);
  CollisionResolution out;
  out.arm_collision_counts.assign(static_cast<std::size_t>(num_arms), 0);
  std::vector<int> multiplicity(static_cast<std::size_t>(num_arms), 0);
  for (ArmId arm : actions) ++multiplicity[static_cast<std::size_t>(arm)];
  out.collided.resize(actions.size());
  for (std::size_t j = 0; j < actions.size(); ++j) {
    out.collided[j] = multiplicity[static_cast<std::size_t>(actions[j])] >= 2;
  }
  for (std::size_t k = 0; k < multiplicity.size(); ++k) {
    if (multiplicity[k] >= 2) out.arm_collision_counts[k] = multiplicity[k];
  }
  return out;
}

void sample_round_into(const BanditInstance& instance, std::span<const ArmId> actions,
                       Rng& rng, RoundResult& out) {
  const auto k = static_cast<std::size_t>(instance.num_arms());
  const std::size_t m = actions.size();
  out.arm_draws.resize(k);
  for (std::size_t arm = 0; arm < k; ++arm) {
    out.arm_draws[arm] = rng.uniform() < instance.means()[arm];
  }
  out.arms.assign(actions.begin(), actions.end());
  out.arm_collision_counts.assign(k, 0);
  for (ArmId arm : actions) ++out.arm_collision_counts[static_cast<std::size_t>(arm)];
  out.sensing.resize(m);
  out.collided.resize(m);
  out.reward.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto arm = static_cast<std::size_t>(actions[j]);
    out.sensing[j] = out.arm_draws[arm];
    out.collided[j] = out.arm_collision_counts[arm] >= 2;
    out.reward[j] = out.sensing[j] && !out.collided[j];
  }
  for (auto& count : out.arm_collision_counts) {
    if (count < 2) count = 0;
  }
}

RoundResult sample_round(const BanditInstance& instance, std::span<const ArmId> actions,
                         Rng& rng) {
  validate_actions(actions, instance.num_arms());
  RoundResult out;
  sample_round_into(instance, actions, rng, out);
  return out;
}

PlayerObservation censor(const RoundResult& result, ObservationModel model, int player) {
  const auto j = static_cast<std::size_t>(player);
  PlayerObservation obs;
  obs.arm = result.arms[j];
  obs.reward = result.reward[j] != 0;
  const bool y = result.sensing[j] != 0;
  const bool c = result.collided[j] != 0;
  switch (model) {
    case ObservationModel::kSensingAndCollision:
      obs.sensing = y;
      obs.collided = c;
      break;
    case ObservationModel::kSensingThenCollision:
      obs.sensing = y;
      if (y) obs.collided = c;
      break;
    case ObservationModel::kNoSensing:
      break;
  }
  return obs;
}

}  // namespace mpbandits
