#include "mpbandits/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <fstream>
#include <set>
#include <sstream>

namespace mpbandits::cli {

using nlohmann::json;

namespace {

std::string render(const std::string& source, int line, const std::string& message) {
  std::ostringstream out;
  out << source;
  if (line > 0) out << ":" << line;
  out << ": error: " << message;
  return out.str();
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

/// Line of the first `"key" :` in the text, 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
  const std::string quoted = "\"" + key + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string::npos) {
    std::size_t after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') return line_of_offset(text, pos);
    pos = after;
  }
  return 0;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "means",   "uniform_arms", "K",           "M",           "T",
      "policy",  "policies",     "reps",        "seed",        "model",
      "exploration", "tol",      "checkpoints", "geometric_ratio",
      "musical_chairs_t0", "randtopm_collision_resample",
  };
  return keys;
}

struct Reader {
  const json& root;
  const std::string& text;
  const std::string& source;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(source, line_of_key(text, key), message);
  }

  bool has(const std::string& key) const { return root.contains(key); }

  std::int64_t integer(const std::string& key) const {
    const json& v = root.at(key);
    if (!v.is_number_integer()) fail(key, "key '" + key + "' must be an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      fail(key, "key '" + key + "' is out of range");
    }
    return v.get<std::int64_t>();
  }

  std::int64_t positive(const std::string& key, std::int64_t max = INT32_MAX) const {
    const std::int64_t v = integer(key);
    if (v < 1 || v > max) fail(key, "key '" + key + "' must be a positive integer");
    return v;
  }

  std::uint64_t unsigned64(const std::string& key) const {
    const json& v = root.at(key);
    if (!v.is_number_unsigned()) fail(key, "key '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  double number(const std::string& key) const {
    const json& v = root.at(key);
    if (!v.is_number()) fail(key, "key '" + key + "' must be a number");
    return v.get<double>();
  }

  std::string string(const std::string& key) const {
    const json& v = root.at(key);
    if (!v.is_string()) fail(key, "key '" + key + "' must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key) const {
    const json& v = root.at(key);
    if (!v.is_boolean()) fail(key, "key '" + key + "' must be true or false");
    return v.get<bool>();
  }
};

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(render(source, line, message)), line_(line) {}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source,
                                   const ConfigOverrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                      "malformed JSON: " + std::string(e.what()));
  }
  if (!root.is_object()) throw ConfigError(source, 1, "configuration must be a JSON object");
  for (const auto& item : root.items()) {
    if (!known_keys().contains(item.key())) {
      throw ConfigError(source, line_of_key(text, item.key()), "unknown key '" + item.key() + "'");
    }
  }
  const Reader in{root, text, source};
  ExperimentConfig out;
  SimulationConfig& sim = out.simulation;

  if (in.has("means") == in.has("uniform_arms")) {
    throw ConfigError(source, in.has("means") ? line_of_key(text, "means") : 0,
                      "exactly one of 'means' or 'uniform_arms' is required");
  }
  if (in.has("means")) {
    const json& means = root.at("means");
    if (!means.is_array() || means.empty()) in.fail("means", "key 'means' must be a non-empty array");
    for (const auto& v : means) {
      if (!v.is_number()) in.fail("means", "every entry of 'means' must be a number");
      const double mu = v.get<double>();
      if (!(mu >= 0.0 && mu <= 1.0)) {
        in.fail("means", "invalid mean " + v.dump() + ": means must lie in [0, 1]");
      }
      sim.means.push_back(mu);
    }
  } else {
    sim.uniform_random_instance = true;
    sim.uniform_num_arms = static_cast<int>(in.positive("uniform_arms"));
  }
  if (in.has("K") && in.positive("K") != sim.num_arms()) {
    in.fail("K", "key 'K' disagrees with the number of arms (" + std::to_string(sim.num_arms()) + ")");
  }

  if (!in.has("M")) throw ConfigError(source, 0, "missing required key 'M'");
  sim.num_players = static_cast<int>(in.positive("M"));
  if (sim.num_players > sim.num_arms()) {
    in.fail("M", "M = " + std::to_string(sim.num_players) + " exceeds K = " +
                     std::to_string(sim.num_arms()));
  }
  if (!in.has("T")) throw ConfigError(source, 0, "missing required key 'T'");
  sim.horizon = in.positive("T", INT64_MAX);

  if (in.has("policy") && in.has("policies")) {
    in.fail("policies", "use either 'policy' or 'policies', not both");
  }
  std::vector<std::string> tags;
  if (in.has("policy")) {
    tags.push_back(in.string("policy"));
  } else if (in.has("policies")) {
    const json& list = root.at("policies");
    if (!list.is_array() || list.empty()) {
      in.fail("policies", "key 'policies' must be a non-empty array of strings");
    }
    for (const auto& v : list) {
      if (!v.is_string()) in.fail("policies", "key 'policies' must be a non-empty array of strings");
      tags.push_back(v.get<std::string>());
    }
  } else {
    throw ConfigError(source, 0, "missing required key 'policy'");
  }

  ExplorationKind exploration = ExplorationKind::kLogPlusLogLog;
  if (in.has("exploration")) {
    try {
      exploration = parse_exploration_kind(in.string("exploration"));
    } catch (const std::invalid_argument& e) {
      in.fail("exploration", e.what());
    }
  }
  double tol = kDefaultTolerance;
  if (in.has("tol")) {
    tol = in.number("tol");
    if (!(tol > 0.0)) in.fail("tol", "key 'tol' must be positive");
  }
  Round t0 = 0;
  if (in.has("musical_chairs_t0")) {
    t0 = in.integer("musical_chairs_t0");
    if (t0 < 0) in.fail("musical_chairs_t0", "key 'musical_chairs_t0' must be >= 0");
  }
  const bool resample = in.has("randtopm_collision_resample")
                            ? in.boolean("randtopm_collision_resample")
                            : PolicySpec{}.collision_switch_in_topm;
  for (const auto& tag : tags) {
    PolicySpec spec;
    try {
      spec = parse_policy(tag);
    } catch (const std::invalid_argument& e) {
      in.fail(in.has("policy") ? "policy" : "policies", e.what());
    }
    spec.exploration = exploration;
    spec.tol = tol;
    spec.musical_chairs_t0 = t0;
    spec.collision_switch_in_topm = resample;
    out.policies.push_back(spec);
  }
  sim.policy = out.policies.front();

  if (overrides.repetitions) {
    sim.repetitions = *overrides.repetitions;
    if (sim.repetitions < 1) throw ConfigError("--reps", 0, "repetitions must be >= 1");
  } else if (in.has("reps")) {
    sim.repetitions = static_cast<int>(in.positive("reps"));
  }
  if (overrides.seed) {
    sim.master_seed = *overrides.seed;
  } else if (in.has("seed")) {
    sim.master_seed = in.unsigned64("seed");
  } else {
    throw ConfigError(source, 0, "missing required key 'seed' (runs must be reproducible)");
  }

  if (in.has("model")) {
    try {
      sim.observation_model = parse_observation_model(in.string("model"));
    } catch (const std::invalid_argument& e) {
      in.fail("model", e.what());
    }
  }
  if (in.has("checkpoints")) {
    const std::string mode = in.string("checkpoints");
    if (mode == "auto") {
      sim.checkpoints = CheckpointMode::kAuto;
    } else if (mode == "every") {
      sim.checkpoints = CheckpointMode::kEveryRound;
    } else if (mode == "geometric") {
      sim.checkpoints = CheckpointMode::kGeometric;
    } else {
      in.fail("checkpoints", "key 'checkpoints' must be auto, every or geometric");
    }
  }
  if (in.has("geometric_ratio")) {
    sim.geometric_ratio = in.number("geometric_ratio");
    if (!(sim.geometric_ratio > 1.0)) in.fail("geometric_ratio", "key 'geometric_ratio' must be > 1");
  }

  for (const auto& spec : out.policies) {
    SimulationConfig probe = sim;
    probe.policy = spec;
    try {
      probe.validate();
    } catch (const std::invalid_argument& e) {
      const std::string key = std::string(e.what()).find("sensing") != std::string::npos ? "model"
                              : in.has("means")                                          ? "means"
                                                                                         : "M";
      in.fail(key, e.what());
    }
  }

  json& echo = out.echo;
  if (sim.uniform_random_instance) {
    echo["uniform_arms"] = sim.uniform_num_arms;
  } else {
    echo["means"] = sim.means;
  }
  echo["K"] = sim.num_arms();
  echo["M"] = sim.num_players;
  echo["T"] = sim.horizon;
  json names = json::array();
  for (const auto& spec : out.policies) names.push_back(spec.name());
  echo["policies"] = names;
  echo["reps"] = sim.repetitions;
  echo["seed"] = sim.master_seed;
  echo["model"] = to_string(sim.observation_model);
  echo["exploration"] = to_string(exploration);
  echo["tol"] = tol;
  echo["checkpoints"] = to_string(sim.checkpoints);
  echo["geometric_ratio"] = sim.geometric_ratio;
  echo["musical_chairs_t0"] = t0;
  echo["randtopm_collision_resample"] = resample;
  return out;
}

ExperimentConfig parse_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError(path, 0, "cannot read configuration file");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str(), path, overrides);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(value);
  }
  return out;
}

}  // namespace mpbandits::cli
