#include "mpbandits/cli/commands.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "mpbandits/analysis.hpp"
#include "mpbandits/cli/config.hpp"
#include "mpbandits/cli/output.hpp"
#include "mpbandits/simulator.hpp"
#include "mpbandits/tree_explorer.hpp"

namespace mpbandits::cli {

using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config) {
  auto* config = cmd->add_option("--config", opts.config, "JSON experiment configuration");
  if (needs_config) config->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "output directory")->required();
  cmd->add_option("--reps", opts.reps, "number of repetitions (overrides the config)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "master seed (overrides the config)");
  cmd->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const CommonOptions& opts) {
  ConfigOverrides overrides;
  overrides.repetitions = opts.reps;
  overrides.seed = opts.seed;
  return parse_config(opts.config, overrides);
}

std::vector<MonteCarloSummary> simulate(const ExperimentConfig& config, int threads,
                                        std::ostream& out) {
  std::vector<MonteCarloSummary> runs;
  for (const auto& policy : config.policies) {
    SimulationConfig sim = config.simulation;
    sim.policy = policy;
    runs.push_back(run_monte_carlo(sim, threads));
    const auto& run = runs.back();
    out << policy.name() << ": reps=" << sim.repetitions
        << " mean_final_regret=" << format_double(run.mean_final_regret)
        << " std=" << format_double(run.std_final_regret)
        << " mean_collisions=" << format_double(run.mean_collisions) << "\n";
  }
  return runs;
}

int cmd_run(const CommonOptions& opts, bool compare, const std::string& policies,
            std::ostream& out) {
  ExperimentConfig config = load(opts);
  if (compare && !policies.empty()) {
    config.policies.clear();
    for (const auto& tag : split_list(policies)) {
      PolicySpec spec = parse_policy(tag);
      const PolicySpec& base = config.simulation.policy;
      spec.exploration = base.exploration;
      spec.tol = base.tol;
      spec.musical_chairs_t0 = base.musical_chairs_t0;
      spec.collision_switch_in_topm = base.collision_switch_in_topm;
      SimulationConfig probe = config.simulation;
      probe.policy = spec;
      probe.validate();
      config.policies.push_back(spec);
    }
    json names = json::array();
    for (const auto& spec : config.policies) names.push_back(spec.name());
    config.echo["policies"] = names;
  }
  if (!compare && config.policies.size() != 1) {
    throw ConfigError(opts.config, 0, "`run` takes a single 'policy'; use `compare` for lists");
  }
  OutputSession session(opts.out, compare ? "compare" : "run");
  const auto runs = simulate(config, opts.threads, out);
  session.write("summary.csv", summary_csv(runs));
  session.write("curves.csv", curves_csv(runs));
  session.write("hist.csv", hist_csv(runs));
  session.commit(config.echo);
  out << "wrote " << session.dir().string() << "\n";
  return kExitOk;
}

int cmd_lower_bounds(const CommonOptions& opts, const std::string& means_text, std::ostream& out) {
  std::vector<double> means;
  json echo;
  if (!means_text.empty()) {
    means = parse_number_list(means_text);
  } else if (!opts.config.empty()) {
    ConfigOverrides overrides;
    overrides.seed = opts.seed.value_or(0);
    const ExperimentConfig config = parse_config(opts.config, overrides);
    if (config.simulation.uniform_random_instance) {
      throw ConfigError(opts.config, 0, "lower-bounds needs explicit 'means'");
    }
    means = config.simulation.means;
  } else {
    throw ConfigError("lower-bounds", 0, "give --means or --config");
  }
  const BanditInstance instance(means);
  echo["means"] = means;
  OutputSession session(opts.out, "lower-bounds");
  const std::string table = lower_bounds_csv(instance);
  session.write("lower_bounds.csv", table);
  session.write("draw_rates.csv", draw_rates_csv(instance));
  session.commit(echo);
  out << table;
  return kExitOk;
}

struct TreeArgs {
  int num_arms = 2;
  int num_players = 2;
  std::string flavor = "selfish-ucb";
  int depth = 3;
  std::string means;
  std::string exploration = to_string(ExplorationKind::kLogPlusLogLog);
  int horizon_check = TreeOptions{}.horizon_check;
  std::size_t max_nodes = TreeOptions{}.max_nodes;
  std::string out;
};

int cmd_tree(const TreeArgs& args, std::ostream& out) {
  IndexFlavor flavor;
  if (args.flavor == "selfish-ucb" || args.flavor == "ucb") {
    flavor = IndexFlavor::kUcb;
  } else if (args.flavor == "selfish-klucb" || args.flavor == "klucb") {
    flavor = IndexFlavor::kKlUcb;
  } else {
    throw ConfigError("--flavor", 0, "unknown flavor '" + args.flavor + "'");
  }
  std::vector<Rational> means;
  for (const auto& item : split_list(args.means)) means.push_back(parse_rational(item));
  TreeOptions options;
  options.exploration = parse_exploration_kind(args.exploration);
  options.horizon_check = args.horizon_check;
  options.max_nodes = args.max_nodes;
  const GameTree tree =
      enumerate_tree(args.num_arms, args.num_players, flavor, args.depth, means, options);
  const Rational p = absorption_probability(tree);
  out << "depth=" << tree.depth << " nodes=" << tree.nodes.size()
      << " absorbing=" << tree.absorbing_count() << " probability=" << to_fraction_string(p)
      << " decimal=" << to_decimal_string(p, 10) << "\n";
  if (!args.out.empty()) {
    OutputSession session(args.out, "tree");
    session.write("tree.csv", tree_csv(tree));
    json echo;
    echo["K"] = args.num_arms;
    echo["M"] = args.num_players;
    echo["flavor"] = "selfish-" + to_string(flavor);
    echo["depth"] = args.depth;
    json fractions = json::array();
    for (const auto& mu : means) fractions.push_back(to_fraction_string(mu));
    echo["means"] = fractions;
    echo["exploration"] = to_string(options.exploration);
    echo["horizon_check"] = options.horizon_check;
    session.commit(echo);
  }
  return kExitOk;
}

int cmd_verify(const std::string& dir, std::ostream& out, std::ostream& err) {
  const VerifyResult result = verify_manifest(dir);
  for (const auto& problem : result.problems) err << problem << "\n";
  if (!result.ok) return kExitVerifyFailed;
  out << "ok " << dir << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized multi-player multi-armed bandit simulations"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "Monte Carlo run of one policy");
  add_common(run, run_opts, true);

  CommonOptions compare_opts;
  std::string compare_policies;
  auto* compare = app.add_subcommand("compare", "several policies on shared seeds");
  add_common(compare, compare_opts, true);
  compare->add_option("--policies", compare_policies, "comma-separated policy list");

  CommonOptions lb_opts;
  std::string lb_means;
  auto* lb = app.add_subcommand("lower-bounds", "asymptotic lower bounds for M = 1..K");
  add_common(lb, lb_opts, false);
  lb->add_option("--means", lb_means, "comma-separated arm means");

  TreeArgs tree_args;
  auto* tree = app.add_subcommand("tree", "exact Selfish game tree");
  tree->add_option("--K", tree_args.num_arms, "number of arms")->check(CLI::PositiveNumber);
  tree->add_option("--M", tree_args.num_players, "number of players")->check(CLI::PositiveNumber);
  tree->add_option("--flavor", tree_args.flavor, "selfish-ucb or selfish-klucb");
  tree->add_option("--depth", tree_args.depth, "rounds to enumerate")->check(CLI::NonNegativeNumber);
  tree->add_option("--means", tree_args.means, "means as fractions, e.g. 1/10,9/10")->required();
  tree->add_option("--exploration", tree_args.exploration, "log or log+3loglog");
  tree->add_option("--horizon-check", tree_args.horizon_check, "closure check length")
      ->check(CLI::NonNegativeNumber);
  tree->add_option("--max-nodes", tree_args.max_nodes, "node budget");
  tree->add_option("--out", tree_args.out, "optional output directory");

  std::string verify_dir;
  auto* verify = app.add_subcommand("verify", "re-hash files against manifest.json");
  verify->add_option("--out,dir", verify_dir, "directory holding manifest.json")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opts, false, "", out);
    if (*compare) return cmd_run(compare_opts, true, compare_policies, out);
    if (*lb) return cmd_lower_bounds(lb_opts, lb_means, out);
    if (*tree) return cmd_tree(tree_args, out);
    if (*verify) return cmd_verify(verify_dir, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace mpbandits::cli
