#include "mpbandits/tree_explorer.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mpbandits {

using boost::multiprecision::cpp_int;

Rational parse_rational(const std::string& text) {
  auto is_digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    if (!is_digits(num) || !is_digits(den)) {
      throw std::invalid_argument("malformed fraction '" + text + "'");
    }
    const cpp_int d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(cpp_int(num), d);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) {
    if (!is_digits(text)) throw std::invalid_argument("malformed number '" + text + "'");
    return Rational(cpp_int(text));
  }
  std::string whole = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (whole.empty()) whole = "0";
  if (!is_digits(whole) || !is_digits(frac)) {
    throw std::invalid_argument("malformed decimal '" + text + "'");
  }
  cpp_int scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  return Rational(cpp_int(whole) * scale + cpp_int(frac), scale);
}

std::string to_fraction_string(const Rational& value) {
  std::ostringstream out;
  out << numerator(value) << "/" << denominator(value);
  return out.str();
}

std::string to_decimal_string(const Rational& value, int digits) {
  cpp_int num = numerator(value);
  const cpp_int den = denominator(value);
  const bool negative = num < 0;
  if (negative) num = -num;
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  // Round half up at the last kept digit.
  const cpp_int scaled = (num * scale * 2 + den) / (den * 2);
  std::string body = cpp_int(scaled / scale).str();
  if (digits > 0) {
    std::string frac = cpp_int(scaled % scale).str();
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    body += "." + frac;
  }
  return negative ? "-" + body : body;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Configuration::Configuration(int players, int arms)
    : num_players(players),
      num_arms(arms),
      reward_sums(static_cast<std::size_t>(players * arms), 0),
      pulls(static_cast<std::size_t>(players * arms), 0) {}

Round Configuration::round() const {
  Round total = 0;
  for (ArmId arm = 0; arm < num_arms; ++arm) total += pull_count(0, arm);
  return total;
}

bool Configuration::same_player_stats(int a, int b) const {
  for (ArmId arm = 0; arm < num_arms; ++arm) {
    if (reward_sum(a, arm) != reward_sum(b, arm) || pull_count(a, arm) != pull_count(b, arm)) {
      return false;
    }
  }
  return true;
}

std::vector<ArmStatistics> Configuration::player_stats(int player) const {
  std::vector<ArmStatistics> stats(static_cast<std::size_t>(num_arms));
  for (ArmId arm = 0; arm < num_arms; ++arm) {
    auto& s = stats[static_cast<std::size_t>(arm)];
    s.pulls = pull_count(player, arm);
    s.reward_sum = reward_sum(player, arm);
    s.sensing_available = false;
    s.collisions_available = false;
  }
  return stats;
}

std::string Configuration::to_string() const {
  std::string out = "[";
  for (int j = 0; j < num_players; ++j) {
    out += j ? ",[" : "[";
    for (ArmId arm = 0; arm < num_arms; ++arm) {
      if (arm) out += ",";
      out += std::to_string(reward_sum(j, arm)) + "/" + std::to_string(pull_count(j, arm));
    }
    out += "]";
  }
  return out + "]";
}

Configuration configuration_from(std::span<const PlayerState> players) {
  if (players.empty()) return {};
  Configuration config(static_cast<int>(players.size()), players.front().num_arms);
  for (int j = 0; j < config.num_players; ++j) {
    for (ArmId arm = 0; arm < config.num_arms; ++arm) {
      const auto& s = players[static_cast<std::size_t>(j)].stats[static_cast<std::size_t>(arm)];
      config.reward_sums[config.slot(j, arm)] = static_cast<int>(s.reward_sum);
      config.pulls[config.slot(j, arm)] = static_cast<int>(s.pulls);
    }
  }
  return config;
}

std::size_t GameTree::absorbing_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.absorbing; }));
}

std::vector<ArmId> selfish_argmax_set(std::span<const ArmStatistics> stats, Round t,
                                      IndexFlavor flavor, const TreeOptions& options) {
  std::vector<double> indices(stats.size());
  for (std::size_t arm = 0; arm < stats.size(); ++arm) {
    // Round 0 has no exploration term; every arm is unpulled anyway.
    indices[arm] = stats[arm].pulls == 0
                       ? kUnpulledIndex
                       : selfish_index(stats[arm], t, flavor, options.tol, options.exploration);
  }
  const double best = *std::max_element(indices.begin(), indices.end());
  std::vector<ArmId> out;
  for (std::size_t arm = 0; arm < indices.size(); ++arm) {
    if (indices[arm] == best) out.push_back(static_cast<ArmId>(arm));
  }
  return out;
}

bool detect_absorbing(const Configuration& config, IndexFlavor flavor, int horizon_check,
                      const TreeOptions& options) {
  const Round t0 = config.round();
  if (t0 == 0) return false;
  std::vector<std::uint8_t> grouped(static_cast<std::size_t>(config.num_players), 0);
  for (int a = 0; a < config.num_players; ++a) {
    if (grouped[static_cast<std::size_t>(a)]) continue;
    bool has_twin = false;
    for (int b = a + 1; b < config.num_players; ++b) {
      if (config.same_player_stats(a, b)) {
        has_twin = true;
        grouped[static_cast<std::size_t>(b)] = 1;
      }
    }
    if (!has_twin) continue;
    // Twins act identically while their argmax is unique; each such round is
    // a collision, which adds a pull and no reward.
    std::vector<ArmStatistics> stats = config.player_stats(a);
    bool closed = true;
    for (int step = 0; step <= horizon_check; ++step) {
      const auto argmax = selfish_argmax_set(stats, t0 + step, flavor, options);
      if (argmax.size() != 1) {
        closed = false;
        break;
      }
      ++stats[static_cast<std::size_t>(argmax.front())].pulls;
    }
    if (closed) return true;
  }
  return false;
}

namespace {

struct Expander {
  GameTree& tree;
  const TreeOptions& options;

  void add_node(TreeNode node) {
    if (tree.nodes.size() >= options.max_nodes) {
      throw ResourceError("game tree exceeds the node budget of " +
                          std::to_string(options.max_nodes) + " nodes");
    }
    tree.nodes.push_back(std::move(node));
  }

  void expand(std::size_t index) {
    const TreeNode parent = tree.nodes[index];
    const Configuration& config = parent.config;
    const int m = config.num_players;
    const int k = config.num_arms;
    const Round t = config.round();

    std::vector<std::vector<ArmId>> choices(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      choices[static_cast<std::size_t>(j)] =
          selfish_argmax_set(config.player_stats(j), t, tree.flavor, options);
    }

    std::vector<std::size_t> cursor(static_cast<std::size_t>(m), 0);
    std::vector<ArmId> action(static_cast<std::size_t>(m));
    while (true) {
      Rational action_prob = parent.probability;
      for (int j = 0; j < m; ++j) {
        const auto& set = choices[static_cast<std::size_t>(j)];
        action[static_cast<std::size_t>(j)] = set[cursor[static_cast<std::size_t>(j)]];
        action_prob /= static_cast<long>(set.size());
      }
      expand_action(index, parent, action, action_prob, k);

      int j = 0;
      for (; j < m; ++j) {
        auto& c = cursor[static_cast<std::size_t>(j)];
        if (++c < choices[static_cast<std::size_t>(j)].size()) break;
        c = 0;
      }
      if (j == m) break;
    }
  }

  void expand_action(std::size_t parent_index, const TreeNode& parent,
                     const std::vector<ArmId>& action, const Rational& action_prob, int k) {
    std::vector<int> multiplicity(static_cast<std::size_t>(k), 0);
    for (ArmId arm : action) ++multiplicity[static_cast<std::size_t>(arm)];
    // Only arms played without collision influence the next configuration.
    std::vector<ArmId> rewarding;
    for (ArmId arm = 0; arm < k; ++arm) {
      if (multiplicity[static_cast<std::size_t>(arm)] == 1) rewarding.push_back(arm);
    }
    const std::size_t outcomes = std::size_t{1} << rewarding.size();
    for (std::size_t mask = 0; mask < outcomes; ++mask) {
      TreeNode child;
      child.config = parent.config;
      child.depth = parent.depth + 1;
      child.parent = parent_index;
      child.probability = action_prob;
      std::vector<std::uint8_t> draw(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < rewarding.size(); ++i) {
        const auto arm = static_cast<std::size_t>(rewarding[i]);
        const bool success = (mask >> i) & 1U;
        draw[arm] = success;
        child.probability *= success ? tree.means[arm] : Rational(1) - tree.means[arm];
      }
      if (child.probability == 0) continue;
      for (int j = 0; j < parent.config.num_players; ++j) {
        const ArmId arm = action[static_cast<std::size_t>(j)];
        const std::size_t s = child.config.slot(j, arm);
        ++child.config.pulls[s];
        if (multiplicity[static_cast<std::size_t>(arm)] == 1 && draw[static_cast<std::size_t>(arm)]) {
          ++child.config.reward_sums[s];
        }
      }
      child.absorbing = detect_absorbing(child.config, tree.flavor, options.horizon_check, options);
      const std::size_t child_index = tree.nodes.size();
      add_node(std::move(child));
      tree.nodes[parent_index].children.push_back(child_index);
    }
  }
};

}  // namespace

GameTree enumerate_tree(int num_arms, int num_players, IndexFlavor flavor, int depth,
                        const std::vector<Rational>& means, const TreeOptions& options) {
  if (num_arms < 1 || num_players < 1) throw std::invalid_argument("need K >= 1 and M >= 1");
  if (static_cast<int>(means.size()) != num_arms) {
    throw std::invalid_argument("need exactly one mean per arm");
  }
  for (const auto& mu : means) {
    if (mu < 0 || mu > 1) throw std::invalid_argument("means must lie in [0, 1]");
  }
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  GameTree tree;
  tree.num_arms = num_arms;
  tree.num_players = num_players;
  tree.flavor = flavor;
  tree.depth = depth;
  tree.means = means;
  TreeNode root;
  root.config = Configuration(num_players, num_arms);
  root.probability = 1;
  tree.nodes.push_back(std::move(root));

  Expander expander{tree, options};
  // Breadth-first: nodes of one depth are contiguous.
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].absorbing || tree.nodes[i].depth >= depth) continue;
    expander.expand(i);
  }
  return tree;
}

Rational absorption_probability(const GameTree& tree) {
  Rational total = 0;
  for (const auto& node : tree.nodes) {
    if (node.absorbing) total += node.probability;
  }
  return total;
}

}  // namespace mpbandits
