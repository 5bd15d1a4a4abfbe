#include "mpbandits/indices.hpp"

#include <algorithm>
#include <cmath>

namespace mpbandits {

void ArmStatistics::record(const PlayerObservation& obs) {
  ++pulls;
  if (obs.reward) ++reward_sum;
  if (obs.sensing) {
    if (*obs.sensing) ++sensing_sum;
  } else {
    sensing_available = false;
  }
  if (obs.collided) {
    if (*obs.collided) {
      ++collision_count;
      if (obs.sensing.value_or(false)) ++collided_sensing_sum;
    }
  } else {
    collisions_available = false;
  }
}

std::string to_string(IndexFlavor flavor) {
  return flavor == IndexFlavor::kUcb ? "ucb" : "klucb";
}

std::string to_string(ExplorationKind kind) {
  return kind == ExplorationKind::kLog ? "log" : "log+3loglog";
}

ExplorationKind parse_exploration_kind(const std::string& text) {
  if (text == "log") return ExplorationKind::kLog;
  if (text == "log+3loglog" || text == "loglog") return ExplorationKind::kLogPlusLogLog;
  throw std::invalid_argument("unknown exploration function '" + text + "'");
}

namespace {

// x log(x / y) with the 0 log 0 = 0 convention.
double xlogx_over_y(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(x / y); }

}  // namespace

double kl_bernoulli(double x, double y) {
  if (!(y > 0.0 && y < 1.0)) {
    throw std::domain_error("kl_bernoulli: y must lie in (0, 1)");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("kl_bernoulli: x must lie in [0, 1]");
  }
  return std::max(0.0, xlogx_over_y(x, y) + xlogx_over_y(1.0 - x, 1.0 - y));
}

double kl_bernoulli_clamped(double x, double y) {
  x = std::clamp(x, kKlClamp, 1.0 - kKlClamp);
  y = std::clamp(y, kKlClamp, 1.0 - kKlClamp);
  return kl_bernoulli(x, y);
}

double kl_bernoulli_derivative(double x, double y) {
  if (!(x > 0.0 && x < 1.0) || !(y > 0.0 && y < 1.0)) {
    throw std::domain_error("kl_bernoulli_derivative: arguments must lie in (0, 1)");
  }
  return std::log(x / y) - std::log((1.0 - x) / (1.0 - y));
}

double exploration_f(Round t, ExplorationKind kind) {
  if (t < 1) throw std::domain_error("exploration_f: t must be >= 1");
  const double log_t = std::log(static_cast<double>(t));
  if (t < 3) return std::max(0.0, log_t);
  if (kind == ExplorationKind::kLog) return log_t;
  return log_t + 3.0 * std::log(log_t);
}

double klucb_upper_bound(double mean, double level, double tol, double scale) {
  if (!(tol > 0.0)) throw std::invalid_argument("klucb: tolerance must be positive");
  if (mean >= 1.0) return 1.0;
  if (level <= 0.0) return mean;
  constexpr double kTop = 1.0 - kKlClamp;
  const double p = std::max(mean, 0.0);
  // kl(p, q) = -H(p) - p log q - (1 - p) log(1 - q); the entropy part is fixed.
  const double neg_entropy = (p > 0.0 ? p * std::log(p) : 0.0) +
                             (p < 1.0 ? (1.0 - p) * std::log1p(-p) : 0.0);
  auto kl_to = [&](double q) {
    return neg_entropy - (p > 0.0 ? p * std::log(q) : 0.0) - (1.0 - p) * std::log1p(-q);
  };

  double hi = std::min(kTop, p + std::sqrt(level / 2.0));
  if (kl_to(hi) <= level) {
    if (hi >= kTop) return 1.0;
    return hi;
  }
  double lo = p;
  const double value_tol = 10.0 * tol;
  for (int iter = 0; iter < kMaxBisectionIterations; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (kl_to(mid) <= level) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= tol && scale * (level - kl_to(lo)) <= value_tol) break;
  }
  return lo;
}

double ucb_index(const ArmStatistics& stats, Round t, ExplorationKind kind) {
  if (stats.pulls == 0) return kUnpulledIndex;
  const double n = static_cast<double>(stats.pulls);
  return static_cast<double>(stats.sensing_sum) / n + std::sqrt(exploration_f(t, kind) / (2.0 * n));
}

double klucb_index(const ArmStatistics& stats, Round t, double tol, ExplorationKind kind) {
  if (stats.pulls == 0) return kUnpulledIndex;
  const double n = static_cast<double>(stats.pulls);
  return klucb_upper_bound(static_cast<double>(stats.sensing_sum) / n,
                           exploration_f(t, kind) / n, tol, n);
}

double selfish_index(const ArmStatistics& stats, Round t, IndexFlavor flavor, double tol,
                     ExplorationKind kind) {
  if (stats.pulls == 0) return kUnpulledIndex;
  const double n = static_cast<double>(stats.pulls);
  const double reward_mean = static_cast<double>(stats.reward_sum) / n;
  const double f = exploration_f(t, kind);
  if (flavor == IndexFlavor::kUcb) return reward_mean + std::sqrt(f / (2.0 * n));
  return klucb_upper_bound(reward_mean, f / n, tol, n);
}

SelfishPenalty selfish_penalty_decomposition(const ArmStatistics& stats) {
  if (!stats.sensing_available || !stats.collisions_available) {
    throw DiagnosticUnavailable(
        "selfish penalty split needs sensing and collision bits on every pull (model I)");
  }
  SelfishPenalty out;
  if (stats.pulls == 0 || stats.collision_count == 0) return out;
  out.collision_fraction =
      static_cast<double>(stats.collision_count) / static_cast<double>(stats.pulls);
  out.collided_mean_estimate = static_cast<double>(stats.collided_sensing_sum) /
                               static_cast<double>(stats.collision_count);
  return out;
}

}  // namespace mpbandits
