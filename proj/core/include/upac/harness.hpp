#pragma once

// Experiment orchestration: configuration, seed-parallel runs, uniform-PAC
// metrics, theoretical bounds and file output.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upac/bandit_agent.hpp"
#include "upac/envs.hpp"
#include "upac/run_log.hpp"
#include "upac/vtr_agent.hpp"

namespace upac {

enum class Algorithm { upac_oful, upac_vtr, baseline_eluder_ucb, baseline_ucrl_vtr };

bool is_episodic(Algorithm a);
std::string to_string(Algorithm a);

struct BanditInstance {
  enum class Type { random_finite, linear_sphere, matrix_file };
  Type type = Type::random_finite;
  std::size_t hypotheses = 16;
  std::size_t inputs = 8;
  std::size_t dim = 2;
  std::size_t actions = 8;
  std::size_t grid = 11;
  std::filesystem::path file;
  /// Generator seed; absent means each run uses its own seed.
  std::optional<std::uint64_t> seed;
  /// True hypothesis index, or a parameter snapped to the grid; with neither,
  /// each run draws one uniformly from its seed.
  std::optional<std::size_t> truth;
  std::vector<double> theta;
  double noise_sd = 1.0;
  /// 0 offers every input each round.
  std::size_t action_subset = 0;
};

struct MdpInstance {
  enum class Type { linear_mixture, mdp_file };
  Type type = Type::linear_mixture;
  std::size_t states = 3;
  std::size_t actions = 2;
  std::size_t basis = 2;
  std::size_t resolution = 7;
  int horizon = 4;
  std::filesystem::path file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> truth;
  std::vector<double> initial;
};

struct OutputPaths {
  std::filesystem::path dir = ".";
  std::string prefix = "run";
};

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::upac_oful;
  BanditInstance bandit;
  MdpInstance mdp;
  std::size_t K = 1000;
  AgentConfig agent;
  std::vector<double> eps_grid{0.1};
  std::vector<std::uint64_t> seeds{1};
  /// 0 uses the hardware concurrency.
  std::size_t threads = 0;
  OutputPaths output;
};

/// Throws std::invalid_argument on K < 1, delta outside (0,1), an empty or
/// unsorted/nonpositive eps grid, or an empty seed list.
void validate(const ExperimentConfig& config);

/// JSON text; relative file paths resolve against `base_dir`. Throws
/// ParseError with line/column on malformed JSON, std::invalid_argument on
/// schema violations.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Candidate family, reward, horizon and initial distribution in JSON. Throws
/// ParseError on malformed files.
struct MdpFile {
  int horizon = 1;
  RewardTable reward;
  std::vector<TransitionKernel> candidates;
  std::vector<double> initial;
};
MdpFile parse_mdp_file(const std::string& text);
MdpFile load_mdp_file(const std::filesystem::path& path);

struct ExperimentResult {
  bool episodic = false;
  std::vector<BanditRunLog> bandit;
  std::vector<MdpRunLog> mdp;
};

/// Concrete instance for one seed.
struct BanditProblem {
  FunctionClass cls;
  HypothesisId truth = 0;
};
BanditProblem make_bandit_problem(const BanditInstance& inst, std::uint64_t run_seed);

struct MdpProblem {
  std::vector<TransitionKernel> candidates;
  RewardTable reward;
  int horizon = 1;
  std::vector<double> initial;
  std::size_t truth = 0;
};
MdpProblem make_mdp_problem(const MdpInstance& inst, std::uint64_t run_seed);

BanditRunLog run_bandit_seed(const ExperimentConfig& config, std::uint64_t seed);
MdpRunLog run_mdp_seed(const ExperimentConfig& config, std::uint64_t seed);

/// One log per seed, in seed-list order; seeds run concurrently.
ExperimentResult run_experiment(const ExperimentConfig& config);

// -- Metrics --------------------------------------------------------------------

/// count(eps) = #{k : delta_k > eps} for each eps; eps must be ascending.
std::vector<std::size_t> uniform_pac_counts(std::span<const double> deltas,
                                            std::span<const double> eps_grid);
std::vector<double> deltas(const BanditRunLog& log);
std::vector<double> deltas(const MdpRunLog& log);

/// H = 1: c (dK dE / eps^2) log(dK dE / (eps delta)).
/// H > 1: c H^3 dK dE log(H^2 dK dE / (eps delta)) / eps^2.
double theoretical_count_bound(double eps, double d_k, double d_e, double delta, double horizon,
                               double c);
/// Episodic form at any H, including H = 1.
double theoretical_count_bound_mdp(double eps, double d_k, double d_e, double delta,
                                   double horizon, double c);

struct SlopeFit {
  double slope = 0.0;
  bool zero_regret = false;
};

/// Least-squares slope of log(R_k + 1) against log k for k in [k_lo, k_hi]
/// (1-based, inclusive). cumulative[k-1] is R_k.
SlopeFit regret_slope(std::span<const double> cumulative, std::size_t k_lo, std::size_t k_hi);
/// Window [K/10, K]; throws std::invalid_argument when K < 100.
SlopeFit regret_slope(std::span<const double> cumulative);
std::vector<double> cumulative_regret(const BanditRunLog& log);
std::vector<double> cumulative_regret(const MdpRunLog& log);

std::size_t coverage_failures(const BanditRunLog& log);
std::size_t coverage_failures(const MdpRunLog& log);

// -- Output ---------------------------------------------------------------------

std::string format_number(double v);

void write_bandit_csv(std::ostream& out, std::span<const BanditRunLog> logs);
void write_mdp_steps_csv(std::ostream& out, std::span<const MdpRunLog> logs);
void write_mdp_episodes_csv(std::ostream& out, std::span<const MdpRunLog> logs);

/// Aggregate summary with a "per_run" array; see README for the layout.
std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result);

/// Writes the CSV file(s) and `<prefix>.summary.json` under output.dir and
/// returns the written paths.
std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& config,
                                                 const ExperimentResult& result);

/// Merges the per-run summaries of every summary file into one aggregate.
std::string merge_summaries(std::span<const std::string> summary_texts);
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace upac
