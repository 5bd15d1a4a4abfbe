#include "mpbandits/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mpbandits {

std::string to_string(CheckpointMode mode) {
  switch (mode) {
    case CheckpointMode::kAuto:
      return "auto";
    case CheckpointMode::kEveryRound:
      return "every-round";
    case CheckpointMode::kGeometric:
      return "geometric";
  }
  return "?";
}

int SimulationConfig::num_arms() const {
  return uniform_random_instance ? uniform_num_arms : static_cast<int>(means.size());
}

void SimulationConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon T must be >= 1");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (uniform_random_instance) {
    if (uniform_num_arms < 1) throw std::invalid_argument("uniform instances need K >= 1");
  } else {
    // Constructing the instance validates every mean.
    BanditInstance instance(means);
    if (num_players >= 1 && num_players <= instance.num_arms() && !instance.in_p_m(num_players)) {
      throw std::invalid_argument("instance not in P_M for the given M (tied M-th mean)");
    }
  }
  if (num_players < 1 || num_players > num_arms()) {
    throw std::invalid_argument("number of players M must satisfy 1 <= M <= K");
  }
  if (checkpoints == CheckpointMode::kGeometric && !(geometric_ratio > 1.0)) {
    throw std::invalid_argument("geometric checkpoint ratio must be > 1");
  }
  if (!(policy.tol > 0.0)) throw std::invalid_argument("index tolerance must be positive");
  if (policy.musical_chairs_t0 < 0) throw std::invalid_argument("T0 must be >= 0");
  if (observation_model == ObservationModel::kNoSensing && policy.needs_sensing()) {
    throw std::invalid_argument("policy " + policy.name() +
                                " needs sensing, unavailable under observation model III");
  }
}

std::vector<Round> checkpoint_schedule(const SimulationConfig& config) {
  const Round horizon = config.horizon;
  CheckpointMode mode = config.checkpoints;
  if (mode == CheckpointMode::kAuto) {
    mode = horizon > 10000 ? CheckpointMode::kGeometric : CheckpointMode::kEveryRound;
  }
  std::vector<Round> out;
  if (mode == CheckpointMode::kEveryRound) {
    out.resize(static_cast<std::size_t>(horizon));
    for (Round t = 1; t <= horizon; ++t) out[static_cast<std::size_t>(t - 1)] = t;
    return out;
  }
  Round t = 1;
  while (t < horizon) {
    out.push_back(t);
    const auto next = static_cast<Round>(std::ceil(static_cast<double>(t) * config.geometric_ratio));
    t = std::max(t + 1, next);
  }
  out.push_back(horizon);
  return out;
}

std::uint64_t repetition_seed(std::uint64_t master_seed, std::uint64_t rep) {
  return derive_seed(master_seed, rep);
}

std::uint64_t player_seed(std::uint64_t rep_seed, int player) {
  return derive_seed(rep_seed, static_cast<std::uint64_t>(player));
}

BanditInstance repetition_instance(const SimulationConfig& config, int rep) {
  if (!config.uniform_random_instance) return BanditInstance(config.means);
  Rng rng(derive_seed(repetition_seed(config.master_seed, static_cast<std::uint64_t>(rep)),
                      kInstanceStream));
  std::vector<double> means(static_cast<std::size_t>(config.uniform_num_arms));
  while (true) {
    for (double& mu : means) mu = rng.uniform();
    BanditInstance instance(means);
    if (instance.in_p_m(config.num_players)) return instance;
  }
}

namespace {

struct RoundLoop {
  const SimulationConfig& config;
  const BanditInstance& instance;
  std::vector<Round> schedule;
  std::size_t next_checkpoint = 0;
  double oracle = 0.0;
  double cumulative_regret = 0.0;
  std::int64_t cumulative_collisions = 0;

  // Regret and collision accounting for one resolved round.
  void account(EpisodeCounters& counters, const RoundResult& result, Round t) {
    counters.record_round(result.arms, result.collided, result.reward);
    double collected = 0.0;
    for (std::size_t j = 0; j < result.arms.size(); ++j) {
      if (result.collided[j]) {
        ++cumulative_collisions;
      } else {
        collected += instance.mean(result.arms[j]);
      }
    }
    cumulative_regret += oracle - collected;
    if (next_checkpoint < schedule.size() && schedule[next_checkpoint] == t) {
      counters.checkpoints.push_back(t);
      counters.cumulative_pseudo_regret.push_back(cumulative_regret);
      counters.cumulative_collisions.push_back(cumulative_collisions);
      ++next_checkpoint;
    }
  }
};

void run_decentralized(const SimulationConfig& config, const BanditInstance& instance,
                       std::uint64_t rep_seed, RoundLoop& loop, EpisodeTrace& trace,
                       const RoundObserver& observer) {
  const int m = config.num_players;
  const int k = instance.num_arms();
  Rng environment(derive_seed(rep_seed, kEnvironmentStream));
  std::vector<Rng> rngs;
  std::vector<PlayerState> players;
  std::vector<ArmId> actions(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    rngs.emplace_back(player_seed(rep_seed, j));
    players.push_back(make_player_state(config.policy, k, m));
    actions[static_cast<std::size_t>(j)] = initial_arm(players.back(), rngs.back());
  }
  RoundResult result;
  for (Round t = 1; t <= config.horizon; ++t) {
    sample_round_into(instance, actions, environment, result);
    loop.account(trace.counters, result, t);
    for (int j = 0; j < m; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const PlayerObservation obs = censor(result, config.observation_model, j);
      if (t == config.horizon) {
        observe(players[ju], obs);
      } else {
        actions[ju] = player_step(players[ju], obs, t, rngs[ju]);
      }
    }
    if (observer) observer(t, players);
  }
  for (int j = 0; j < m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    trace.counters.switches[ju] = players[ju].switch_count;
    trace.counters.transitions[ju] = players[ju].transition_counts;
    trace.fallback_count += players[ju].fallback_count;
    trace.final_stats.push_back(players[ju].stats);
  }
}

void run_centralized(const SimulationConfig& config, const BanditInstance& instance,
                     std::uint64_t rep_seed, RoundLoop& loop, EpisodeTrace& trace,
                     const RoundObserver& observer) {
  const int m = config.num_players;
  Rng environment(derive_seed(rep_seed, kEnvironmentStream));
  Rng controller(player_seed(rep_seed, 0));
  std::vector<ArmStatistics> pooled(static_cast<std::size_t>(instance.num_arms()));
  std::vector<ArmId> actions = centralized_klucb_step(pooled, 0, m, config.policy, controller);
  RoundResult result;
  for (Round t = 1; t <= config.horizon; ++t) {
    sample_round_into(instance, actions, environment, result);
    loop.account(trace.counters, result, t);
    for (int j = 0; j < m; ++j) {
      const PlayerObservation obs = censor(result, config.observation_model, j);
      pooled[static_cast<std::size_t>(obs.arm)].record(obs);
    }
    if (observer) observer(t, {});
    if (t == config.horizon) break;
    std::vector<ArmId> next = centralized_klucb_step(pooled, t, m, config.policy, controller);
    for (std::size_t j = 0; j < next.size(); ++j) {
      if (next[j] != actions[j]) ++trace.counters.switches[j];
    }
    actions = std::move(next);
  }
  trace.pooled_stats = std::move(pooled);
}

}  // namespace

EpisodeTrace run_episode(const SimulationConfig& config, int rep_index,
                         const RoundObserver& observer) {
  config.validate();
  const std::uint64_t rep_seed =
      repetition_seed(config.master_seed, static_cast<std::uint64_t>(rep_index));
  EpisodeTrace trace;
  trace.instance = repetition_instance(config, rep_index);
  trace.counters = EpisodeCounters(trace.instance.num_arms(), config.num_players, config.horizon);
  RoundLoop loop{config, trace.instance, checkpoint_schedule(config)};
  loop.oracle = trace.instance.oracle_round_reward(config.num_players);
  trace.counters.checkpoints.reserve(loop.schedule.size());
  trace.counters.cumulative_pseudo_regret.reserve(loop.schedule.size());
  trace.counters.cumulative_collisions.reserve(loop.schedule.size());
  if (config.policy.algorithm == Algorithm::kCentralized) {
    run_centralized(config, trace.instance, rep_seed, loop, trace, observer);
  } else {
    run_decentralized(config, trace.instance, rep_seed, loop, trace, observer);
  }
  return trace;
}

namespace {

RepetitionRecord summarize(const SimulationConfig& config, int rep, const EpisodeTrace& trace) {
  const int m = config.num_players;
  RepetitionRecord record;
  record.rep = rep;
  record.means = trace.instance.means();
  record.pseudo_regret = pseudo_regret(trace.counters, trace.instance, m);
  record.realized_regret = realized_regret(trace.counters, trace.instance, m);
  record.terms = decomposition(trace.counters, trace.instance, m);
  record.collisions = trace.counters.total_collisions();
  record.switches = trace.counters.total_switches();
  record.transitions = trace.counters.total_transitions();
  record.fallbacks = trace.fallback_count;
  for (ArmId arm = 0; arm < trace.instance.num_arms(); ++arm) {
    record.arm_draws.push_back(trace.counters.arm_draws(arm));
  }
  record.lb_ours = lower_bound_ours(trace.instance, m);
  record.lb_zhao = lower_bound_zhao(trace.instance, m);
  return record;
}

}  // namespace

MonteCarloSummary run_monte_carlo(const SimulationConfig& config, int threads) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.repetitions);
  const std::vector<Round> schedule = checkpoint_schedule(config);
  const std::size_t points = schedule.size();

  std::vector<RepetitionRecord> records(reps);
  std::vector<std::vector<double>> regret_curves(reps);
  std::vector<std::vector<std::int64_t>> collision_curves(reps);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= reps) return;
      try {
        EpisodeTrace trace = run_episode(config, static_cast<int>(rep));
        records[rep] = summarize(config, static_cast<int>(rep), trace);
        regret_curves[rep] = std::move(trace.counters.cumulative_pseudo_regret);
        collision_curves[rep] = std::move(trace.counters.cumulative_collisions);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(reps);
        return;
      }
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(reps));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Reduction in repetition order, so the schedule above cannot change a bit.
  MonteCarloSummary summary;
  summary.config = config;
  summary.generator = std::string(Rng::kName);
  summary.checkpoints = schedule;
  summary.mean_regret.assign(points, 0.0);
  summary.std_regret.assign(points, 0.0);
  summary.mean_cum_collisions.assign(points, 0.0);
  const auto n = static_cast<double>(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < points; ++i) {
      summary.mean_regret[i] += regret_curves[r][i];
      summary.mean_cum_collisions[i] += static_cast<double>(collision_curves[r][i]);
    }
  }
  for (std::size_t i = 0; i < points; ++i) {
    summary.mean_regret[i] /= n;
    summary.mean_cum_collisions[i] /= n;
  }
  if (reps > 1) {
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t i = 0; i < points; ++i) {
        const double d = regret_curves[r][i] - summary.mean_regret[i];
        summary.std_regret[i] += d * d;
      }
    }
    for (double& v : summary.std_regret) v = std::sqrt(v / (n - 1.0));
  }

  for (const auto& rec : records) {
    summary.mean_lb_ours += rec.lb_ours;
    summary.mean_lb_zhao += rec.lb_zhao;
    summary.mean_terms.term_a += rec.terms.term_a;
    summary.mean_terms.term_b += rec.terms.term_b;
    summary.mean_terms.term_c += rec.terms.term_c;
    summary.mean_final_regret += rec.pseudo_regret;
    summary.mean_collisions += static_cast<double>(rec.collisions);
    summary.mean_switches += static_cast<double>(rec.switches);
    for (std::size_t i = 0; i < 5; ++i) {
      summary.mean_transitions[i] += static_cast<double>(rec.transitions[i]);
    }
  }
  summary.mean_lb_ours /= n;
  summary.mean_lb_zhao /= n;
  summary.mean_terms.term_a /= n;
  summary.mean_terms.term_b /= n;
  summary.mean_terms.term_c /= n;
  summary.mean_final_regret /= n;
  summary.mean_collisions /= n;
  summary.mean_switches /= n;
  for (double& v : summary.mean_transitions) v /= n;
  if (reps > 1) {
    double var = 0.0;
    for (const auto& rec : records) {
      const double d = rec.pseudo_regret - summary.mean_final_regret;
      var += d * d;
    }
    summary.std_final_regret = std::sqrt(var / (n - 1.0));
  }
  summary.reps = std::move(records);
  return summary;
}

}  // namespace mpbandits
