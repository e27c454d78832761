#include <glob.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "upac/harness.hpp"

namespace upac {
namespace {

using nlohmann::ordered_json;

ordered_json counts_json(std::span<const double> eps_grid, std::span<const std::size_t> counts) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < eps_grid.size(); ++i) j[format_number(eps_grid[i])] = counts[i];
  return j;
}

ordered_json caps_json(std::span<const double> caps) {
  ordered_json j = ordered_json::array();
  for (double u : caps) {
    if (std::isfinite(u)) {
      j.push_back(u);
    } else {
      j.push_back(nullptr);
    }
  }
  return j;
}

template <class Log>
ordered_json run_summary(const ExperimentConfig& config, const Log& log) {
  const auto cumulative = cumulative_regret(log);
  ordered_json j;
  j["seed"] = log.seed;
  j["K"] = cumulative.size();
  const auto counts = uniform_pac_counts(deltas(log), config.eps_grid);
  j["counts"] = counts_json(config.eps_grid, counts);
  j["max_level_occupancy"] = log.partition.occupancy;
  j["U"] = caps_json(log.partition.caps);
  j["coverage_failures"] = coverage_failures(log);
  if (cumulative.size() >= 100) {
    const SlopeFit fit = regret_slope(cumulative);
    j["slope"] = fit.slope;
    j["zero_regret"] = fit.zero_regret;
  } else {
    j["slope"] = nullptr;
    j["zero_regret"] = cumulative.back() == 0.0;
  }
  j["final_regret"] = cumulative.back();
  j["cardinality_violations"] = log.partition.cardinality_violations;
  j["fallbacks"] = log.partition.fallbacks;
  return j;
}

template <class Log>
ordered_json aggregate(const ExperimentConfig& config, std::span<const Log> logs) {
  ordered_json runs = ordered_json::array();
  std::vector<std::size_t> totals(config.eps_grid.size(), 0);
  std::vector<std::size_t> occupancy;
  std::vector<double> caps;
  std::size_t failures = 0, failing_runs = 0;
  std::vector<double> mean_cumulative;
  for (const Log& log : logs) {
    const auto counts = uniform_pac_counts(deltas(log), config.eps_grid);
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += counts[i];
    const auto& occ = log.partition.occupancy;
    if (occ.size() > occupancy.size()) occupancy.resize(occ.size(), 0);
    for (std::size_t l = 0; l < occ.size(); ++l) occupancy[l] = std::max(occupancy[l], occ[l]);
    if (log.partition.caps.size() > caps.size()) caps = log.partition.caps;
    const std::size_t f = coverage_failures(log);
    failures += f;
    if (f > 0) ++failing_runs;
    const auto cumulative = cumulative_regret(log);
    if (mean_cumulative.empty()) mean_cumulative.assign(cumulative.size(), 0.0);
    for (std::size_t k = 0; k < cumulative.size(); ++k)
      mean_cumulative[k] += cumulative[k] / static_cast<double>(logs.size());
    runs.push_back(run_summary(config, log));
  }
  ordered_json j;
  j["algorithm"] = to_string(config.algorithm);
  j["K"] = config.K;
  j["seeds"] = config.seeds;
  j["counts"] = counts_json(config.eps_grid, totals);
  j["max_level_occupancy"] = occupancy;
  j["U"] = caps_json(caps);
  j["coverage_failures"] = failures;
  j["runs_with_coverage_failure"] = failing_runs;
  if (mean_cumulative.size() >= 100) {
    const SlopeFit fit = regret_slope(mean_cumulative);
    j["slope"] = fit.slope;
    j["zero_regret"] = fit.zero_regret;
  } else {
    j["slope"] = nullptr;
  }
  j["per_run"] = std::move(runs);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <class Writer>
std::string to_text(Writer&& w) {
  std::ostringstream ss;
  w(ss);
  return ss.str();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_bandit_csv(std::ostream& out, std::span<const BanditRunLog> logs) {
  out << "seed,k,action,reward,level,width,delta,regret,covered\n";
  for (const auto& log : logs) {
    for (const auto& r : log.rounds) {
      out << log.seed << ',' << r.k << ',' << r.action << ',' << format_number(r.reward) << ','
          << r.level << ',' << format_number(r.width) << ',' << format_number(r.delta) << ','
          << format_number(r.regret) << ',' << (r.covered ? 1 : 0) << '\n';
    }
  }
}

void write_mdp_steps_csv(std::ostream& out, std::span<const MdpRunLog> logs) {
  out << "seed,k,h,s,a,s_next,level,width\n";
  for (const auto& log : logs) {
    for (const auto& e : log.episodes) {
      for (const auto& s : e.steps) {
        out << log.seed << ',' << e.k << ',' << s.h << ',' << s.s << ',' << s.a << ',' << s.s_next
            << ',' << s.level << ',' << format_number(s.width) << '\n';
      }
    }
  }
}

void write_mdp_episodes_csv(std::ostream& out, std::span<const MdpRunLog> logs) {
  out << "seed,k,delta,regret,covered,optimistic_value,true_optimal_value\n";
  for (const auto& log : logs) {
    for (const auto& e : log.episodes) {
      out << log.seed << ',' << e.k << ',' << format_number(e.delta) << ','
          << format_number(e.regret) << ',' << (e.covered ? 1 : 0) << ','
          << format_number(e.optimistic_value) << ',' << format_number(e.true_optimal_value)
          << '\n';
    }
  }
}

std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  const ordered_json j = result.episodic
                             ? aggregate<MdpRunLog>(config, result.mdp)
                             : aggregate<BanditRunLog>(config, result.bandit);
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const ExperimentResult& result) {
  std::filesystem::create_directories(config.output.dir);
  const auto base = config.output.dir / config.output.prefix;
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& suffix, const std::string& text) {
    std::filesystem::path p = base;
    p += suffix;
    write_text(p, text);
    written.push_back(p);
  };
  if (result.episodic) {
    emit(".steps.csv", to_text([&](std::ostream& o) { write_mdp_steps_csv(o, result.mdp); }));
    emit(".episodes.csv", to_text([&](std::ostream& o) { write_mdp_episodes_csv(o, result.mdp); }));
  } else {
    emit(".csv", to_text([&](std::ostream& o) { write_bandit_csv(o, result.bandit); }));
  }
  emit(".summary.json", summary_json(config, result));
  return written;
}

std::string merge_summaries(std::span<const std::string> summary_texts) {
  std::vector<ordered_json> runs;
  for (const auto& text : summary_texts) {
    const ordered_json j = ordered_json::parse(text);
    if (j.contains("per_run")) {
      for (const auto& r : j.at("per_run")) runs.push_back(r);
    } else {
      runs.push_back(j);
    }
  }
  std::map<double, std::pair<std::string, std::size_t>> counts;
  std::vector<std::size_t> occupancy;
  ordered_json caps = ordered_json::array();
  std::size_t failures = 0, failing_runs = 0;
  double slope_sum = 0.0;
  std::size_t slopes = 0;
  ordered_json seeds = ordered_json::array();
  for (const auto& r : runs) {
    seeds.push_back(r.at("seed"));
    for (const auto& [key, value] : r.at("counts").items()) {
      auto& slot = counts[std::stod(key)];
      slot.first = key;
      slot.second += value.get<std::size_t>();
    }
    const auto occ = r.at("max_level_occupancy").get<std::vector<std::size_t>>();
    if (occ.size() > occupancy.size()) occupancy.resize(occ.size(), 0);
    for (std::size_t l = 0; l < occ.size(); ++l) occupancy[l] = std::max(occupancy[l], occ[l]);
    if (r.at("U").size() > caps.size()) caps = r.at("U");
    const auto f = r.at("coverage_failures").get<std::size_t>();
    failures += f;
    if (f > 0) ++failing_runs;
    if (r.contains("slope") && r.at("slope").is_number()) {
      slope_sum += r.at("slope").get<double>();
      ++slopes;
    }
  }
  ordered_json out;
  out["runs"] = runs.size();
  out["seeds"] = seeds;
  ordered_json c = ordered_json::object();
  for (const auto& [eps, slot] : counts) c[slot.first] = slot.second;
  out["counts"] = c;
  out["max_level_occupancy"] = occupancy;
  out["U"] = caps;
  out["coverage_failures"] = failures;
  out["runs_with_coverage_failure"] = failing_runs;
  if (slopes > 0) {
    out["slope"] = slope_sum / static_cast<double>(slopes);
  } else {
    out["slope"] = nullptr;
  }
  return out.dump(2) + "\n";
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::filesystem::path> out;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw std::runtime_error("glob failed for " + pattern);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace upac
