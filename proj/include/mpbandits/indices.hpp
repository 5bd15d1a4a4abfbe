#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "mpbandits/core_model.hpp"

namespace mpbandits {

/// Per-player, per-arm counters.
///
/// `sensing_sum` is S (sum of sensed Y), `reward_sum` is S-tilde (sum of
/// collision-censored rewards). `collided_sensing_sum` is the running sum of
/// Y * 1(collision), needed only to split the Selfish penalty into its two
/// factors. Fields a model does not reveal are left at zero and flagged.
struct ArmStatistics {
  std::int64_t pulls = 0;
  std::int64_t sensing_sum = 0;
  std::int64_t reward_sum = 0;
  std::int64_t collision_count = 0;
  std::int64_t collided_sensing_sum = 0;
  bool sensing_available = true;
  bool collisions_available = true;

  /// Folds one observation of this arm into the counters.
  void record(const PlayerObservation& obs);

  friend bool operator==(const ArmStatistics&, const ArmStatistics&) = default;
};

/// Thrown when a quantity needs information the observation model censors.
class DiagnosticUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class IndexFlavor { kUcb, kKlUcb };

/// Exploration function family: log(t), or log(t) + 3 log(log(t)).
enum class ExplorationKind { kLog, kLogPlusLogLog };

std::string to_string(IndexFlavor flavor);
std::string to_string(ExplorationKind kind);
ExplorationKind parse_exploration_kind(const std::string& text);

/// Clamp applied to kl arguments before evaluation.
inline constexpr double kKlClamp = 1e-15;
/// Index given to an arm never pulled. Strictly above every finite index, so
/// unexplored arms are always tried before any explored one.
inline constexpr double kUnpulledIndex = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTolerance = 1e-6;
inline constexpr int kMaxBisectionIterations = 100;

/// Bernoulli KL divergence kl(x, y), with 0 log 0 = 0. Requires y in (0, 1).
double kl_bernoulli(double x, double y);
/// kl with both arguments clamped into [kKlClamp, 1 - kKlClamp].
double kl_bernoulli_clamped(double x, double y);
/// d/dx kl(x, y) = log(x / y) - log((1 - x) / (1 - y)). Requires x, y in (0, 1).
double kl_bernoulli_derivative(double x, double y);

/// f(t) = log t (kLog) or log t + 3 log log t (kLogPlusLogLog) for t >= 3;
/// max(0, log t) for t in {1, 2}. Throws for t < 1.
double exploration_f(Round t, ExplorationKind kind = ExplorationKind::kLogPlusLogLog);

/// sup { q in [mean, 1] : kl(mean, q) <= level } by bisection.
///
/// Stops once the bracket is narrower than `tol` and the constraint slack
/// `scale * (level - kl(mean, q))` is at most 10 * tol, or after
/// kMaxBisectionIterations halvings. The bracket starts at
/// [mean, min(1 - kKlClamp, mean + sqrt(level / 2))] (Pinsker).
double klucb_upper_bound(double mean, double level, double tol, double scale = 1.0);

double ucb_index(const ArmStatistics& stats, Round t,
                 ExplorationKind kind = ExplorationKind::kLogPlusLogLog);
double klucb_index(const ArmStatistics& stats, Round t, double tol = kDefaultTolerance,
                   ExplorationKind kind = ExplorationKind::kLogPlusLogLog);

/// UCB / kl-UCB evaluated on the reward-based mean reward_sum / pulls.
double selfish_index(const ArmStatistics& stats, Round t, IndexFlavor flavor,
                     double tol = kDefaultTolerance,
                     ExplorationKind kind = ExplorationKind::kLogPlusLogLog);

struct SelfishPenalty {
  double collision_fraction = 0.0;      // N^C / N
  double collided_mean_estimate = 0.0;  // sum Y 1(C) / N^C, 0 when N^C = 0
};

/// The two factors whose product is g_UCB - g~_UCB. Needs model-I counters.
SelfishPenalty selfish_penalty_decomposition(const ArmStatistics& stats);

}  // namespace mpbandits
