#include "mpbandits/policies.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpbandits {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRhoRand:
      return "rhorand";
    case Algorithm::kRandTopM:
      return "randtopm";
    case Algorithm::kMCTopM:
      return "mctopm";
    case Algorithm::kSelfish:
      return "selfish";
    case Algorithm::kMusicalChairs:
      return "musical-chairs";
    case Algorithm::kCentralized:
      return "centralized";
  }
  return "?";
}

std::string PolicySpec::name() const {
  if (algorithm == Algorithm::kMusicalChairs) return to_string(algorithm);
  return to_string(algorithm) + "-" + to_string(flavor);
}

bool PolicySpec::needs_sensing() const {
  return algorithm == Algorithm::kRhoRand || algorithm == Algorithm::kRandTopM ||
         algorithm == Algorithm::kMCTopM;
}

PolicySpec parse_policy(const std::string& tag) {
  PolicySpec spec;
  if (tag == "musical-chairs" || tag == "musical-chair") {
    spec.algorithm = Algorithm::kMusicalChairs;
    return spec;
  }
  std::string base = tag;
  const auto dash = tag.rfind('-');
  if (dash != std::string::npos) {
    const std::string suffix = tag.substr(dash + 1);
    if (suffix == "ucb") {
      spec.flavor = IndexFlavor::kUcb;
      base = tag.substr(0, dash);
    } else if (suffix == "klucb") {
      spec.flavor = IndexFlavor::kKlUcb;
      base = tag.substr(0, dash);
    }
  }
  if (base == "rhorand") {
    spec.algorithm = Algorithm::kRhoRand;
  } else if (base == "randtopm") {
    spec.algorithm = Algorithm::kRandTopM;
  } else if (base == "mctopm") {
    spec.algorithm = Algorithm::kMCTopM;
  } else if (base == "selfish") {
    spec.algorithm = Algorithm::kSelfish;
  } else if (base == "centralized") {
    spec.algorithm = Algorithm::kCentralized;
  } else {
    throw std::invalid_argument("unknown policy '" + tag + "'");
  }
  return spec;
}

double policy_index(const ArmStatistics& stats, Round t, const PolicySpec& policy) {
  const bool reward_based =
      policy.algorithm == Algorithm::kSelfish || !stats.sensing_available;
  if (reward_based) {
    return selfish_index(stats, t, policy.flavor, policy.tol, policy.exploration);
  }
  if (policy.flavor == IndexFlavor::kUcb) return ucb_index(stats, t, policy.exploration);
  return klucb_index(stats, t, policy.tol, policy.exploration);
}

PlayerState make_player_state(const PolicySpec& policy, int num_arms, int num_players) {
  if (num_arms < 1) throw std::invalid_argument("need at least one arm");
  if (num_players < 1 || num_players > num_arms) {
    throw std::invalid_argument("number of players must be in [1, K]");
  }
  if (policy.algorithm == Algorithm::kCentralized) {
    throw std::invalid_argument("the centralized policy has no per-player state");
  }
  PlayerState state;
  state.policy = policy;
  state.num_arms = num_arms;
  state.num_players = num_players;
  const auto k = static_cast<std::size_t>(num_arms);
  state.stats.assign(k, ArmStatistics{});
  state.indices.assign(k, kUnpulledIndex);
  state.prev_indices.assign(k, kUnpulledIndex);
  state.in_top_m.assign(k, 0);
  state.scratch.reserve(k);
  state.mc_phase = policy.musical_chairs_t0 > 0 ? MusicalChairsPhase::kExploring
                                                : MusicalChairsPhase::kSeeking;
  return state;
}

namespace {

ArmId uniform_arm(int num_arms, Rng& rng) {
  return static_cast<ArmId>(rng.below(static_cast<std::uint64_t>(num_arms)));
}

ArmId uniform_from(const std::vector<ArmId>& arms, Rng& rng) {
  return arms[rng.below(arms.size())];
}

// Membership mask of TopM; boundary ties resolved by a partial Fisher-Yates
// draw over the tied arms.
void select_top_m(std::span<const double> indices, int num_players, Rng& rng,
                  std::vector<std::uint8_t>& member, std::vector<ArmId>& tied) {
  const std::size_t k = indices.size();
  const auto m = static_cast<std::size_t>(num_players);
  if (m > k || m == 0) throw std::invalid_argument("top_m: need 1 <= M <= K");
  thread_local std::vector<double> sorted;
  sorted.assign(indices.begin(), indices.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m - 1),
                   sorted.end(), std::greater<>());
  const double boundary = sorted[m - 1];
  member.assign(k, 0);
  tied.clear();
  std::size_t taken = 0;
  for (std::size_t arm = 0; arm < k; ++arm) {
    if (indices[arm] > boundary) {
      member[arm] = 1;
      ++taken;
    } else if (indices[arm] == boundary) {
      tied.push_back(static_cast<ArmId>(arm));
    }
  }
  const std::size_t need = m - taken;
  if (tied.size() > need) {
    for (std::size_t i = 0; i < need; ++i) {
      const std::size_t pick = i + rng.below(tied.size() - i);
      std::swap(tied[i], tied[pick]);
    }
  }
  for (std::size_t i = 0; i < need; ++i) member[static_cast<std::size_t>(tied[i])] = 1;
}

void collect_members(const std::vector<std::uint8_t>& member, std::vector<ArmId>& out) {
  out.clear();
  for (std::size_t arm = 0; arm < member.size(); ++arm) {
    if (member[arm]) out.push_back(static_cast<ArmId>(arm));
  }
}

// Uniform over TopM(t) ∩ {k : g_k(t-1) <= g_A(t-1)}; uniform over TopM(t)
// when that set is empty.
ArmId sample_below_previous(PlayerState& state, ArmId current, Rng& rng) {
  const double ref = state.prev_indices[static_cast<std::size_t>(current)];
  state.scratch.clear();
  for (std::size_t arm = 0; arm < state.in_top_m.size(); ++arm) {
    if (state.in_top_m[arm] && state.prev_indices[arm] <= ref) {
      state.scratch.push_back(static_cast<ArmId>(arm));
    }
  }
  if (state.scratch.empty()) {
    ++state.fallback_count;
    collect_members(state.in_top_m, state.scratch);
  }
  return uniform_from(state.scratch, rng);
}

ArmId sample_top_m(PlayerState& state, Rng& rng) {
  collect_members(state.in_top_m, state.scratch);
  return uniform_from(state.scratch, rng);
}

ArmId commit(PlayerState& state, ArmId next) {
  if (next != state.current_arm) ++state.switch_count;
  state.current_arm = next;
  ++state.decisions;
  return next;
}

void begin_step(PlayerState& state, const PlayerObservation& obs, Round t) {
  if (obs.arm != state.current_arm) {
    throw std::logic_error("observation is for an arm the player did not play");
  }
  observe(state, obs);
  refresh_indices(state, t);
}

}  // namespace

ArmId initial_arm(PlayerState& state, Rng& rng) {
  state.current_arm = uniform_arm(state.num_arms, rng);
  switch (state.policy.algorithm) {
    case Algorithm::kRhoRand:
      state.rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(state.num_players)));
      break;
    case Algorithm::kMusicalChairs:
      if (state.policy.musical_chairs_t0 == 0) {
        // No exploration at all: draw the target set from empty counters.
        std::vector<double> means(static_cast<std::size_t>(state.num_arms), 0.0);
        select_top_m(means, state.num_players, rng, state.in_top_m, state.scratch);
        collect_members(state.in_top_m, state.mc_top_m);
        state.mc_phase = MusicalChairsPhase::kSeeking;
        state.current_arm = uniform_from(state.mc_top_m, rng);
      }
      break;
    default:
      break;
  }
  return state.current_arm;
}

void observe(PlayerState& state, const PlayerObservation& obs) {
  state.stats[static_cast<std::size_t>(obs.arm)].record(obs);
}

void refresh_indices(PlayerState& state, Round t) {
  std::swap(state.prev_indices, state.indices);
  for (std::size_t arm = 0; arm < state.stats.size(); ++arm) {
    state.indices[arm] = policy_index(state.stats[arm], t, state.policy);
  }
}

bool TopMSet::contains(ArmId arm) const {
  return std::binary_search(arms.begin(), arms.end(), arm);
}

TopMSet top_m(std::span<const double> indices, int num_players, Rng& rng) {
  std::vector<std::uint8_t> member;
  std::vector<ArmId> tied;
  select_top_m(indices, num_players, rng, member, tied);
  TopMSet out;
  collect_members(member, out.arms);
  out.index_values.assign(indices.begin(), indices.end());
  return out;
}

ArmId arm_at_rank(std::span<const double> indices, int rank, Rng& rng) {
  const std::size_t k = indices.size();
  if (rank < 1 || static_cast<std::size_t>(rank) > k) {
    throw std::invalid_argument("arm_at_rank: rank out of range");
  }
  thread_local std::vector<double> sorted;
  sorted.assign(indices.begin(), indices.end());
  const auto r = static_cast<std::size_t>(rank);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(r - 1),
                   sorted.end(), std::greater<>());
  const double value = sorted[r - 1];
  // The rank-th slot of a uniformly shuffled tie group is a uniform member.
  std::size_t count = 0;
  ArmId chosen = 0;
  for (std::size_t arm = 0; arm < k; ++arm) {
    if (indices[arm] == value && (count++ == 0 || rng.below(count) == 0)) {
      chosen = static_cast<ArmId>(arm);
    }
  }
  return chosen;
}

ArmId argmax_uniform(std::span<const double> indices, Rng& rng) {
  if (indices.empty()) throw std::invalid_argument("argmax over an empty vector");
  const double best = *std::max_element(indices.begin(), indices.end());
  std::size_t count = 0;
  ArmId chosen = 0;
  for (std::size_t arm = 0; arm < indices.size(); ++arm) {
    if (indices[arm] == best && (count++ == 0 || rng.below(count) == 0)) {
      chosen = static_cast<ArmId>(arm);
    }
  }
  return chosen;
}

ArmId rho_rand_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng) {
  begin_step(state, obs, t);
  if (obs.saw_collision()) {
    state.rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(state.num_players)));
  }
  return commit(state, arm_at_rank(state.indices, state.rank, rng));
}

ArmId rand_topm_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng) {
  begin_step(state, obs, t);
  select_top_m(state.indices, state.num_players, rng, state.in_top_m, state.scratch);
  const ArmId current = state.current_arm;
  ArmId next = current;
  if (!state.in_top_m[static_cast<std::size_t>(current)]) {
    next = obs.saw_collision() ? sample_top_m(state, rng)
                               : sample_below_previous(state, current, rng);
  } else if (state.policy.collision_switch_in_topm && obs.saw_collision()) {
    next = sample_top_m(state, rng);
  }
  return commit(state, next);
}

McTopMDecision mctopm_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng) {
  begin_step(state, obs, t);
  select_top_m(state.indices, state.num_players, rng, state.in_top_m, state.scratch);
  const ArmId current = state.current_arm;
  McTopMDecision decision;
  if (!state.in_top_m[static_cast<std::size_t>(current)]) {
    decision.transition = state.chair ? 5 : 3;
    decision.arm = sample_below_previous(state, current, rng);
    state.chair = false;
  } else if (obs.saw_collision() && !state.chair) {
    decision.transition = 2;
    decision.arm = sample_top_m(state, rng);
    state.chair = false;
  } else {
    decision.transition = state.chair ? 4 : 1;
    decision.arm = current;
    state.chair = true;
  }
  ++state.transition_counts[static_cast<std::size_t>(decision.transition - 1)];
  state.last_transition = decision.transition;
  commit(state, decision.arm);
  return decision;
}

ArmId selfish_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng) {
  begin_step(state, obs, t);
  return commit(state, argmax_uniform(state.indices, rng));
}

ArmId musical_chair_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng) {
  observe(state, obs);
  // Under model III the collision bit is censored; a zero reward is then
  // treated as a possible collision.
  const bool collided = obs.collided ? *obs.collided : (!obs.sensing && !obs.reward);
  ArmId next = state.current_arm;
  switch (state.mc_phase) {
    case MusicalChairsPhase::kSeated:
      break;
    case MusicalChairsPhase::kSeeking:
      if (!collided) {
        state.mc_phase = MusicalChairsPhase::kSeated;
      } else {
        next = uniform_from(state.mc_top_m, rng);
      }
      break;
    case MusicalChairsPhase::kExploring:
      if (t < state.policy.musical_chairs_t0) {
        next = uniform_arm(state.num_arms, rng);
      } else {
        std::vector<double> means(state.stats.size(), 0.0);
        for (std::size_t arm = 0; arm < means.size(); ++arm) {
          const auto& s = state.stats[arm];
          if (s.pulls > 0) {
            const auto sum = s.sensing_available ? s.sensing_sum : s.reward_sum;
            means[arm] = static_cast<double>(sum) / static_cast<double>(s.pulls);
          }
        }
        select_top_m(means, state.num_players, rng, state.in_top_m, state.scratch);
        collect_members(state.in_top_m, state.mc_top_m);
        state.mc_phase = MusicalChairsPhase::kSeeking;
        next = uniform_from(state.mc_top_m, rng);
      }
      break;
  }
  return commit(state, next);
}

ArmId player_step(PlayerState& state, const PlayerObservation& obs, Round t, Rng& rng) {
  switch (state.policy.algorithm) {
    case Algorithm::kRhoRand:
      return rho_rand_step(state, obs, t, rng);
    case Algorithm::kRandTopM:
      return rand_topm_step(state, obs, t, rng);
    case Algorithm::kMCTopM:
      return mctopm_step(state, obs, t, rng).arm;
    case Algorithm::kSelfish:
      return selfish_step(state, obs, t, rng);
    case Algorithm::kMusicalChairs:
      return musical_chair_step(state, obs, t, rng);
    case Algorithm::kCentralized:
      break;
  }
  throw std::invalid_argument("player_step: centralized policy is not per-player");
}

std::vector<ArmId> centralized_klucb_step(std::span<const ArmStatistics> pooled, Round t,
                                          int num_players, const PolicySpec& policy, Rng& rng) {
  std::vector<double> indices(pooled.size());
  for (std::size_t arm = 0; arm < pooled.size(); ++arm) {
    indices[arm] = t == 0 ? kUnpulledIndex : policy_index(pooled[arm], t, policy);
  }
  return top_m(indices, num_players, rng).arms;
}

}  // namespace mpbandits
