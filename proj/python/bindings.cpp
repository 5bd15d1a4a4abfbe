#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "mpbandits/analysis.hpp"
#include "mpbandits/indices.hpp"
#include "mpbandits/simulator.hpp"
#include "mpbandits/tree_explorer.hpp"

namespace py = pybind11;
using namespace mpbandits;

namespace {

ArmStatistics stats_from(std::int64_t successes, std::int64_t pulls) {
  ArmStatistics stats;
  stats.pulls = pulls;
  stats.sensing_sum = successes;
  stats.reward_sum = successes;
  return stats;
}

py::dict monte_carlo(const std::vector<double>& means, int num_players, Round horizon,
                     const std::string& policy, int reps, std::uint64_t seed,
                     const std::string& model, const std::string& exploration, int threads) {
  SimulationConfig config;
  config.means = means;
  config.num_players = num_players;
  config.horizon = horizon;
  config.policy = parse_policy(policy);
  config.policy.exploration = parse_exploration_kind(exploration);
  config.observation_model = parse_observation_model(model);
  config.repetitions = reps;
  config.master_seed = seed;
  MonteCarloSummary summary;
  {
    py::gil_scoped_release release;
    summary = run_monte_carlo(config, threads);
  }
  std::vector<double> final_regret;
  std::vector<std::int64_t> collisions;
  std::vector<double> term_a, term_b, term_c;
  for (const auto& r : summary.reps) {
    final_regret.push_back(r.pseudo_regret);
    collisions.push_back(r.collisions);
    term_a.push_back(r.terms.term_a);
    term_b.push_back(r.terms.term_b);
    term_c.push_back(r.terms.term_c);
  }
  py::dict out;
  out["policy"] = config.policy.name();
  out["checkpoints"] = summary.checkpoints;
  out["mean_regret"] = summary.mean_regret;
  out["std_regret"] = summary.std_regret;
  out["mean_cum_collisions"] = summary.mean_cum_collisions;
  out["final_regret"] = final_regret;
  out["collisions"] = collisions;
  out["term_a"] = term_a;
  out["term_b"] = term_b;
  out["term_c"] = term_c;
  out["mean_final_regret"] = summary.mean_final_regret;
  out["lb_ours"] = summary.mean_lb_ours;
  out["lb_zhao"] = summary.mean_lb_zhao;
  out["generator"] = summary.generator;
  return out;
}

py::dict tree(int num_arms, int num_players, const std::string& flavor, int depth,
              const std::vector<std::string>& means, int horizon_check) {
  std::vector<Rational> exact;
  for (const auto& mu : means) exact.push_back(parse_rational(mu));
  TreeOptions options;
  options.horizon_check = horizon_check;
  const IndexFlavor index = flavor == "selfish-klucb" || flavor == "klucb" ? IndexFlavor::kKlUcb
                                                                           : IndexFlavor::kUcb;
  if (index == IndexFlavor::kUcb && flavor != "selfish-ucb" && flavor != "ucb") {
    throw std::invalid_argument("unknown flavor '" + flavor + "'");
  }
  const GameTree game = enumerate_tree(num_arms, num_players, index, depth, exact, options);
  const Rational p = absorption_probability(game);
  py::dict out;
  out["depth"] = depth;
  out["nodes"] = game.nodes.size();
  out["absorbing"] = game.absorbing_count();
  out["fraction"] = to_fraction_string(p);
  out["decimal"] = to_decimal_string(p, 10);
  out["probability"] = to_double(p);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decentralized multi-player bandit simulations";
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

  m.def("kl_bernoulli", &kl_bernoulli, py::arg("x"), py::arg("y"));
  m.def(
      "exploration",
      [](Round t, const std::string& kind) { return exploration_f(t, parse_exploration_kind(kind)); },
      py::arg("t"), py::arg("kind") = "log+3loglog");
  m.def("klucb_upper_bound", &klucb_upper_bound, py::arg("mean"), py::arg("level"),
        py::arg("tol") = kDefaultTolerance, py::arg("scale") = 1.0);
  m.def(
      "klucb_index",
      [](std::int64_t successes, std::int64_t pulls, Round t, double tol, const std::string& kind) {
        return klucb_index(stats_from(successes, pulls), t, tol, parse_exploration_kind(kind));
      },
      py::arg("successes"), py::arg("pulls"), py::arg("t"), py::arg("tol") = kDefaultTolerance,
      py::arg("kind") = "log+3loglog");
  m.def(
      "ucb_index",
      [](std::int64_t successes, std::int64_t pulls, Round t, const std::string& kind) {
        return ucb_index(stats_from(successes, pulls), t, parse_exploration_kind(kind));
      },
      py::arg("successes"), py::arg("pulls"), py::arg("t"), py::arg("kind") = "log+3loglog");
  m.def(
      "lower_bound_ours",
      [](const std::vector<double>& means, int players) {
        return lower_bound_ours(BanditInstance(means), players);
      },
      py::arg("means"), py::arg("players"));
  m.def(
      "lower_bound_zhao",
      [](const std::vector<double>& means, int players) {
        return lower_bound_zhao(BanditInstance(means), players);
      },
      py::arg("means"), py::arg("players"));
  m.def("run_monte_carlo", &monte_carlo, py::arg("means"), py::arg("players"), py::arg("horizon"),
        py::arg("policy") = "mctopm-klucb", py::arg("reps") = 1, py::arg("seed") = 0,
        py::arg("model") = "I", py::arg("exploration") = "log+3loglog", py::arg("threads") = 1);
  m.def("tree", &tree, py::arg("arms"), py::arg("players"), py::arg("flavor"), py::arg("depth"),
        py::arg("means"), py::arg("horizon_check") = TreeOptions{}.horizon_check);
  m.attr("PRNG") = std::string(Rng::kName);
}
