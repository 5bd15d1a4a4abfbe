#include "mpbandits/cli/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "mpbandits/analysis.hpp"

namespace mpbandits::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  if (value == 0.0) return "0";
  std::array<char, 64> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

void append_row(std::string& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& field : fields) {
    if (!first) out += ',';
    out += csv_field(field);
    first = false;
  }
  out += "\r\n";
}

std::string str(std::int64_t v) { return std::to_string(v); }

}  // namespace

std::string summary_csv(const std::vector<MonteCarloSummary>& runs) {
  std::string out;
  append_row(out, {"rep", "policy", "final_pseudo_regret", "final_realized_regret", "term_a",
                   "term_b", "term_c", "collisions_total", "switches_total", "transitions_1",
                   "transitions_2", "transitions_3", "transitions_4", "transitions_5"});
  for (const auto& run : runs) {
    const std::string policy = run.config.policy.name();
    for (const auto& r : run.reps) {
      append_row(out, {str(r.rep), policy, format_double(r.pseudo_regret),
                       format_double(r.realized_regret), format_double(r.terms.term_a),
                       format_double(r.terms.term_b), format_double(r.terms.term_c),
                       str(r.collisions), str(r.switches), str(r.transitions[0]),
                       str(r.transitions[1]), str(r.transitions[2]), str(r.transitions[3]),
                       str(r.transitions[4])});
    }
  }
  return out;
}

std::string curves_csv(const std::vector<MonteCarloSummary>& runs) {
  std::string out;
  append_row(out, {"policy", "t", "mean_regret", "std_regret", "mean_cum_collisions",
                   "lb_ours_times_logt", "lb_zhao_times_logt"});
  for (const auto& run : runs) {
    const std::string policy = run.config.policy.name();
    for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
      const double log_t = std::log(static_cast<double>(run.checkpoints[i]));
      append_row(out, {policy, str(run.checkpoints[i]), format_double(run.mean_regret[i]),
                       format_double(run.std_regret[i]), format_double(run.mean_cum_collisions[i]),
                       format_double(run.mean_lb_ours * log_t),
                       format_double(run.mean_lb_zhao * log_t)});
    }
  }
  return out;
}

std::string hist_csv(const std::vector<MonteCarloSummary>& runs, int bins) {
  std::string out;
  append_row(out, {"policy", "bin", "bin_lower", "bin_upper", "count"});
  for (const auto& run : runs) {
    if (run.reps.empty()) continue;
    const std::string policy = run.config.policy.name();
    double lo = run.reps.front().pseudo_regret;
    double hi = lo;
    for (const auto& r : run.reps) {
      lo = std::min(lo, r.pseudo_regret);
      hi = std::max(hi, r.pseudo_regret);
    }
    const int n = hi > lo ? bins : 1;
    const double width = hi > lo ? (hi - lo) / n : 1.0;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    for (const auto& r : run.reps) {
      auto b = static_cast<int>((r.pseudo_regret - lo) / width);
      ++counts[static_cast<std::size_t>(std::clamp(b, 0, n - 1))];
    }
    for (int b = 0; b < n; ++b) {
      const double upper = b == n - 1 ? (hi > lo ? hi : lo + width) : lo + width * (b + 1);
      append_row(out, {policy, str(b), format_double(lo + width * b), format_double(upper),
                       str(counts[static_cast<std::size_t>(b)])});
    }
  }
  return out;
}

std::string lower_bounds_csv(const BanditInstance& instance) {
  std::string out;
  append_row(out, {"M", "lb_ours", "lb_zhao", "sum_inverse_kl"});
  for (int m = 1; m <= instance.num_arms(); ++m) {
    if (!instance.in_p_m(m)) continue;
    const LowerBoundReport report = lower_bounds(instance, m);
    double rate_sum = 0.0;
    for (const auto& rate : report.per_arm_draw_rate) rate_sum += rate.rate;
    append_row(out, {str(m), format_double(report.ours), format_double(report.zhao),
                     format_double(rate_sum)});
  }
  return out;
}

std::string draw_rates_csv(const BanditInstance& instance) {
  std::string out;
  append_row(out, {"M", "arm", "mean", "inverse_kl"});
  for (int m = 1; m <= instance.num_arms(); ++m) {
    if (!instance.in_p_m(m)) continue;
    for (const auto& rate : lower_bounds(instance, m).per_arm_draw_rate) {
      append_row(out, {str(m), str(rate.arm), format_double(instance.mean(rate.arm)),
                       format_double(rate.rate)});
    }
  }
  return out;
}

std::string tree_csv(const GameTree& tree) {
  std::string out;
  append_row(out, {"K", "M", "flavor", "depth", "nodes", "absorbing", "probability_fraction",
                   "probability_decimal"});
  const Rational p = absorption_probability(tree);
  append_row(out, {str(tree.num_arms), str(tree.num_players), "selfish-" + to_string(tree.flavor),
                   str(tree.depth), str(static_cast<std::int64_t>(tree.nodes.size())),
                   str(static_cast<std::int64_t>(tree.absorbing_count())), to_fraction_string(p),
                   to_decimal_string(p, 10)});
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw OutputError("SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutputError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

std::string utc_timestamp(std::chrono::system_clock::time_point when) {
  const std::time_t t = std::chrono::system_clock::to_time_t(when);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string build_identifier() {
#ifdef MPBANDITS_VERSION
  std::string id = "mpbandits " MPBANDITS_VERSION;
#else
  std::string id = "mpbandits";
#endif
#if defined(__clang__)
  id += " clang " __clang_version__;
#elif defined(__GNUC__)
  id += " gcc " __VERSION__;
#endif
#ifdef NDEBUG
  id += " release";
#else
  id += " debug";
#endif
  return id;
}

OutputSession::OutputSession(fs::path dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)), started_(std::chrono::system_clock::now()) {
  std::error_code ec;
  if (!fs::exists(dir_, ec)) {
    if (!fs::create_directories(dir_, ec) || ec) {
      throw OutputError("cannot create output directory " + dir_.string() + ": " +
                               ec.message());
    }
    created_dir_ = true;
  } else if (!fs::is_directory(dir_, ec)) {
    throw OutputError(dir_.string() + " exists and is not a directory");
  }
}

OutputSession::~OutputSession() {
  if (committed_) return;
  std::error_code ec;
  for (const auto& artifact : artifacts_) fs::remove(dir_ / artifact.name, ec);
  fs::remove(dir_ / "manifest.json", ec);
  if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
}

void OutputSession::write(const std::string& name, const std::string& bytes) {
  const fs::path path = dir_ / name;
  // Registered first so that a failed write is still cleaned up.
  artifacts_.push_back({name, sha256_hex(bytes), bytes.size()});
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw OutputError("cannot write " + path.string());
}

void OutputSession::commit(const json& config_echo) {
  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["command"] = command_;
  manifest["config"] = config_echo;
  manifest["prng"] = Rng::kName;
  manifest["build"] = build_identifier();
  manifest["started_at"] = utc_timestamp(started_);
  manifest["finished_at"] = utc_timestamp(std::chrono::system_clock::now());
  json files = json::array();
  for (const auto& artifact : artifacts_) {
    files.push_back({{"name", artifact.name}, {"sha256", artifact.sha256}, {"bytes", artifact.bytes}});
  }
  manifest["files"] = files;
  const fs::path path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << "\n";
  out.close();
  if (!out) throw OutputError("cannot write " + path.string());
  committed_ = true;
}

VerifyResult verify_manifest(const fs::path& dir) {
  VerifyResult result;
  const fs::path path = dir / "manifest.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    result.ok = false;
    result.problems.push_back("missing " + path.string());
    return result;
  }
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    result.ok = false;
    result.problems.push_back("unreadable manifest: " + std::string(e.what()));
    return result;
  }
  if (!manifest.contains("files") || !manifest["files"].is_array()) {
    result.ok = false;
    result.problems.push_back("manifest has no file inventory");
    return result;
  }
  for (const auto& entry : manifest["files"]) {
    const std::string name = entry.value("name", "");
    const std::string expected = entry.value("sha256", "");
    const fs::path file = dir / name;
    std::error_code ec;
    if (name.empty() || !fs::is_regular_file(file, ec)) {
      result.ok = false;
      result.problems.push_back("missing " + file.string());
      continue;
    }
    const std::string actual = sha256_file(file);
    if (actual != expected) {
      result.ok = false;
      result.problems.push_back("hash mismatch for " + name + ": manifest " + expected +
                                ", file " + actual);
    }
  }
  return result;
}

}  // namespace mpbandits::cli
