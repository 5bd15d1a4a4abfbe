#include "mpbandits/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "mpbandits/indices.hpp"

namespace mpbandits {

EpisodeCounters::EpisodeCounters(int arms, int players, Round horizon_rounds)
    : num_arms(arms),
      num_players(players),
      horizon(horizon_rounds),
      draws(static_cast<std::size_t>(players),
            std::vector<std::int64_t>(static_cast<std::size_t>(arms), 0)),
      colliding_players(static_cast<std::size_t>(arms), 0),
      switches(static_cast<std::size_t>(players), 0),
      transitions(static_cast<std::size_t>(players), std::array<std::int64_t, 5>{}) {}

std::int64_t EpisodeCounters::arm_draws(ArmId arm) const {
  std::int64_t total = 0;
  for (const auto& row : draws) total += row[static_cast<std::size_t>(arm)];
  return total;
}

std::int64_t EpisodeCounters::total_draws() const {
  std::int64_t total = 0;
  for (const auto& row : draws) total = std::accumulate(row.begin(), row.end(), total);
  return total;
}

std::int64_t EpisodeCounters::total_collisions() const {
  return std::accumulate(colliding_players.begin(), colliding_players.end(), std::int64_t{0});
}

std::int64_t EpisodeCounters::total_switches() const {
  return std::accumulate(switches.begin(), switches.end(), std::int64_t{0});
}

std::array<std::int64_t, 5> EpisodeCounters::total_transitions() const {
  std::array<std::int64_t, 5> out{};
  for (const auto& per_player : transitions) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += per_player[i];
  }
  return out;
}

void EpisodeCounters::record_round(std::span<const ArmId> actions,
                                   std::span<const std::uint8_t> collided,
                                   std::span<const std::uint8_t> rewards) {
  for (std::size_t j = 0; j < actions.size(); ++j) {
    const auto arm = static_cast<std::size_t>(actions[j]);
    ++draws[j][arm];
    if (collided[j]) ++colliding_players[arm];
    realized_reward += rewards[j];
  }
}

double pseudo_regret(const EpisodeCounters& counters, const BanditInstance& instance,
                     int num_players) {
  double collected = 0.0;
  for (ArmId arm = 0; arm < instance.num_arms(); ++arm) {
    const auto successes =
        counters.arm_draws(arm) - counters.colliding_players[static_cast<std::size_t>(arm)];
    collected += instance.mean(arm) * static_cast<double>(successes);
  }
  return instance.oracle_round_reward(num_players) * static_cast<double>(counters.horizon) -
         collected;
}

double realized_regret(const EpisodeCounters& counters, const BanditInstance& instance,
                       int num_players) {
  return instance.oracle_round_reward(num_players) * static_cast<double>(counters.horizon) -
         static_cast<double>(counters.realized_reward);
}

DecompositionTerms decomposition(const EpisodeCounters& counters, const BanditInstance& instance,
                                 int num_players) {
  const ArmPartition partition = m_best_m_worst(instance, num_players);
  const double mu_m = instance.best_mean(num_players);
  const auto horizon = static_cast<double>(counters.horizon);
  DecompositionTerms terms;
  for (ArmId arm : partition.worst) {
    terms.term_a += (mu_m - instance.mean(arm)) * static_cast<double>(counters.arm_draws(arm));
  }
  for (ArmId arm : partition.best) {
    terms.term_b +=
        (instance.mean(arm) - mu_m) * (horizon - static_cast<double>(counters.arm_draws(arm)));
  }
  for (ArmId arm = 0; arm < instance.num_arms(); ++arm) {
    terms.term_c += instance.mean(arm) *
                    static_cast<double>(counters.colliding_players[static_cast<std::size_t>(arm)]);
  }
  return terms;
}

double lower_bound_ours(const BanditInstance& instance, int num_players) {
  const ArmPartition partition = m_best_m_worst(instance, num_players);
  const double mu_m = instance.best_mean(num_players);
  double sum = 0.0;
  for (ArmId arm : partition.worst) {
    const double mu = instance.mean(arm);
    sum += (mu_m - mu) / kl_bernoulli_clamped(mu, mu_m);
  }
  return static_cast<double>(num_players) * sum;
}

double lower_bound_zhao(const BanditInstance& instance, int num_players) {
  const ArmPartition partition = m_best_m_worst(instance, num_players);
  const double mu_m = instance.best_mean(num_players);
  double sum = 0.0;
  for (ArmId arm : partition.worst) {
    const double mu = instance.mean(arm);
    for (int j = 1; j <= num_players; ++j) {
      sum += (mu_m - mu) / kl_bernoulli_clamped(mu, instance.best_mean(j));
    }
  }
  return sum;
}

LowerBoundReport lower_bounds(const BanditInstance& instance, int num_players) {
  LowerBoundReport report;
  report.ours = lower_bound_ours(instance, num_players);
  report.zhao = lower_bound_zhao(instance, num_players);
  const double mu_m = instance.best_mean(num_players);
  for (ArmId arm : m_best_m_worst(instance, num_players).worst) {
    report.per_arm_draw_rate.push_back(
        {arm, 1.0 / kl_bernoulli_clamped(instance.mean(arm), mu_m)});
  }
  return report;
}

double suboptimal_draw_upper_bound(const BanditInstance& instance, int num_players, ArmId arm,
                                   Round horizon) {
  if (horizon < 3) throw std::invalid_argument("upper bound needs T >= 3");
  const ArmPartition partition = m_best_m_worst(instance, num_players);
  if (std::find(partition.worst.begin(), partition.worst.end(), arm) == partition.worst.end()) {
    throw std::invalid_argument("upper bound is defined for M-worst arms only");
  }
  const double x = std::clamp(instance.mean(arm), kKlClamp, 1.0 - kKlClamp);
  const double y = std::clamp(instance.best_mean(num_players), kKlClamp, 1.0 - kKlClamp);
  const double kl = kl_bernoulli(x, y);
  const double dkl = kl_bernoulli_derivative(x, y);
  const double log_t = std::log(static_cast<double>(horizon));
  const double loglog_t = std::log(log_t);
  const double f = log_t + 3.0 * loglog_t;
  const double m = static_cast<double>(num_players);
  return f / kl + std::sqrt(2.0 * std::numbers::pi) * std::sqrt(dkl * dkl / (kl * kl * kl)) * std::sqrt(f) +
         2.0 * (dkl / kl) * (dkl / kl) + 4.0 * m * std::numbers::e * loglog_t + 3.0 * m + 1.0;
}

PropertyCheck check_regret_covers_term_a(std::span<const double> pseudo_regrets, std::span<const double> term_a) {
  if (pseudo_regrets.size() != term_a.size() || pseudo_regrets.empty()) {
    throw std::invalid_argument("check_regret_covers_term_a: need matching, non-empty samples");
  }
  const auto n = static_cast<double>(pseudo_regrets.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < pseudo_regrets.size(); ++i) mean += pseudo_regrets[i] - term_a[i];
  mean /= n;
  double var = 0.0;
  for (std::size_t i = 0; i < pseudo_regrets.size(); ++i) {
    const double d = pseudo_regrets[i] - term_a[i] - mean;
    var += d * d;
  }
  const double stderr_diff = pseudo_regrets.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  PropertyCheck check;
  check.margin = mean + 3.0 * stderr_diff;
  check.holds = check.margin >= 0.0;
  return check;
}

PropertyCheck check_term_b_bound(const EpisodeCounters& counters, const BanditInstance& instance,
                           int num_players) {
  const ArmPartition partition = m_best_m_worst(instance, num_players);
  const DecompositionTerms terms = decomposition(counters, instance, num_players);
  double budget = 0.0;
  for (ArmId arm : partition.worst) budget += static_cast<double>(counters.arm_draws(arm));
  for (ArmId arm : partition.best) {
    budget += static_cast<double>(counters.colliding_players[static_cast<std::size_t>(arm)]);
  }
  const double rhs = (instance.best_mean(1) - instance.best_mean(num_players)) * budget;
  PropertyCheck check;
  check.margin = rhs - terms.term_b;
  // Floating round-off only; the inequality itself is exact in the counters.
  check.holds = check.margin >= -1e-9 * std::max(1.0, std::abs(rhs));
  return check;
}

}  // namespace mpbandits
