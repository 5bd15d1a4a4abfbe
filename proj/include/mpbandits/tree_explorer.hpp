#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mpbandits/indices.hpp"
#include "mpbandits/policies.hpp"

namespace mpbandits {

/// Exact rational with arbitrary-precision numerator and denominator,
/// always kept in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a finite decimal such as "0.25" exactly.
Rational parse_rational(const std::string& text);
std::string to_fraction_string(const Rational& value);
std::string to_decimal_string(const Rational& value, int digits = 10);
double to_double(const Rational& value);

/// Thrown when an enumeration would exceed its node budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joint Selfish statistics: (S-tilde_k^j, T_k^j) for every player j and arm k.
struct Configuration {
  int num_players = 0;
  int num_arms = 0;
  std::vector<int> reward_sums;  // [player * K + arm]
  std::vector<int> pulls;

  Configuration() = default;
  Configuration(int players, int arms);

  int reward_sum(int player, ArmId arm) const { return reward_sums[slot(player, arm)]; }
  int pull_count(int player, ArmId arm) const { return pulls[slot(player, arm)]; }
  /// Rounds played so far (every player pulls once per round).
  Round round() const;
  bool same_player_stats(int a, int b) const;
  /// Player j's view as ArmStatistics (reward-only).
  std::vector<ArmStatistics> player_stats(int player) const;

  /// "[[S/T,S/T],[S/T,S/T]]", one inner list per player.
  std::string to_string() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

  std::size_t slot(int player, ArmId arm) const {
    return static_cast<std::size_t>(player * num_arms + arm);
  }
};

Configuration configuration_from(std::span<const PlayerState> players);

struct TreeNode {
  Configuration config;
  Rational probability;
  int depth = 0;
  bool absorbing = false;
  std::size_t parent = 0;
  std::vector<std::size_t> children;
};

struct TreeOptions {
  ExplorationKind exploration = ExplorationKind::kLogPlusLogLog;
  double tol = kDefaultTolerance;
  int horizon_check = 50;
  std::size_t max_nodes = 10'000'000;
};

struct GameTree {
  int num_arms = 0;
  int num_players = 0;
  IndexFlavor flavor = IndexFlavor::kUcb;
  int depth = 0;
  std::vector<Rational> means;
  /// nodes[0] is the root; children always follow their parent.
  std::vector<TreeNode> nodes;

  const TreeNode& root() const { return nodes.front(); }
  std::size_t absorbing_count() const;
};

/// Enumerates every joint tie-break choice and every reward outcome of the
/// arms played without collision, for `depth` rounds of Selfish play.
/// Absorbing nodes are leaves.
GameTree enumerate_tree(int num_arms, int num_players, IndexFlavor flavor, int depth,
                        const std::vector<Rational>& means, const TreeOptions& options = {});

/// Arms achieving the maximal Selfish index for one player's statistics.
std::vector<ArmId> selfish_argmax_set(std::span<const ArmStatistics> stats, Round t,
                                      IndexFlavor flavor, const TreeOptions& options);

/// True iff two players share identical statistics, their common index
/// vector has a unique argmax, and that stays true for horizon_check further
/// rounds of colliding on that argmax.
bool detect_absorbing(const Configuration& config, IndexFlavor flavor, int horizon_check,
                      const TreeOptions& options = {});

/// Sum of the reach probabilities of absorbing leaves.
Rational absorption_probability(const GameTree& tree);

}  // namespace mpbandits
