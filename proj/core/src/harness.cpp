#include "upac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>
#include <thread>

namespace upac {
namespace {

std::size_t draw_index(std::uint64_t seed, std::size_t n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    std::uint32_t{30}};
  std::mt19937_64 rng(seq);
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

ActionSchedule schedule_of(const BanditInstance& inst) {
  if (inst.action_subset == 0) return {};
  return {ActionSchedule::Kind::subset, inst.action_subset};
}

}  // namespace

bool is_episodic(Algorithm a) {
  return a == Algorithm::upac_vtr || a == Algorithm::baseline_ucrl_vtr;
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::upac_oful: return "upac-oful";
    case Algorithm::upac_vtr: return "upac-vtr";
    case Algorithm::baseline_eluder_ucb: return "baseline-eluder-ucb";
    case Algorithm::baseline_ucrl_vtr: return "baseline-ucrl-vtr";
  }
  return "unknown";
}

void validate(const ExperimentConfig& config) {
  if (config.K < 1) throw std::invalid_argument("config: K must be >= 1");
  if (!(config.agent.delta > 0.0 && config.agent.delta < 1.0))
    throw std::invalid_argument("config: delta must lie in (0, 1)");
  if (!(config.agent.c_beta > 0.0)) throw std::invalid_argument("config: c_beta must be positive");
  if (config.eps_grid.empty()) throw std::invalid_argument("config: eps grid is empty");
  for (std::size_t i = 0; i < config.eps_grid.size(); ++i) {
    if (!(config.eps_grid[i] > 0.0))
      throw std::invalid_argument("config: eps grid must be strictly positive");
    if (i > 0 && !(config.eps_grid[i] > config.eps_grid[i - 1]))
      throw std::invalid_argument("config: eps grid must be strictly increasing");
  }
  if (config.seeds.empty()) throw std::invalid_argument("config: seed list is empty");
  if (config.agent.d_k && !(*config.agent.d_k > 0.0))
    throw std::invalid_argument("config: d_K must be positive");
  for (double d : config.agent.d_e)
    if (!(d > 0.0)) throw std::invalid_argument("config: d_E entries must be positive");
  if (is_episodic(config.algorithm) && config.mdp.horizon < 1)
    throw std::invalid_argument("config: horizon must be >= 1");
}

BanditProblem make_bandit_problem(const BanditInstance& inst, std::uint64_t run_seed) {
  BanditProblem p{[&] {
    switch (inst.type) {
      case BanditInstance::Type::random_finite:
        return random_finite_class(inst.hypotheses, inst.inputs, inst.seed.value_or(run_seed));
      case BanditInstance::Type::linear_sphere:
        return linear_sphere_class(inst.dim, inst.actions, inst.grid);
      case BanditInstance::Type::matrix_file:
        break;
    }
    return load_matrix_file(inst.file);
  }()};
  if (inst.truth) {
    if (*inst.truth >= p.cls.num_hypotheses())
      throw std::invalid_argument("instance: truth index outside the class");
    p.truth = *inst.truth;
  } else if (!inst.theta.empty()) {
    if (p.cls.kind() == ClassKind::finite || inst.theta.size() != p.cls.parameter_dim())
      throw std::invalid_argument("instance: theta needs a parametric class of matching dimension");
    p.truth = p.cls.grid().nearest(inst.theta);
  } else {
    p.truth = draw_index(run_seed, p.cls.num_hypotheses());
  }
  return p;
}

MdpProblem make_mdp_problem(const MdpInstance& inst, std::uint64_t run_seed) {
  MdpProblem p;
  if (inst.type == MdpInstance::Type::linear_mixture) {
    MixtureFamily family = linear_mixture_family(inst.states, inst.actions, inst.basis,
                                                 inst.resolution, inst.seed.value_or(run_seed));
    p.candidates = std::move(family.candidates);
    p.reward = std::move(family.reward);
    p.horizon = inst.horizon;
    p.initial = inst.initial;
  } else {
    MdpFile file = load_mdp_file(inst.file);
    p.candidates = std::move(file.candidates);
    p.reward = std::move(file.reward);
    p.horizon = file.horizon;
    p.initial = inst.initial.empty() ? std::move(file.initial) : inst.initial;
  }
  if (inst.truth) {
    if (*inst.truth >= p.candidates.size())
      throw std::invalid_argument("instance: truth index outside the candidate family");
    p.truth = *inst.truth;
  } else {
    p.truth = draw_index(run_seed, p.candidates.size());
  }
  return p;
}

BanditRunLog run_bandit_seed(const ExperimentConfig& config, std::uint64_t seed) {
  if (is_episodic(config.algorithm))
    throw std::invalid_argument("run_bandit_seed: algorithm is episodic");
  const BanditProblem problem = make_bandit_problem(config.bandit, seed);
  AgentConfig agent_config = config.agent;
  agent_config.single_level = config.algorithm == Algorithm::baseline_eluder_ucb;
  BanditAgent agent(problem.cls, agent_config);
  BanditEnv env(problem.cls, problem.truth, config.bandit.noise_sd, schedule_of(config.bandit),
                seed);
  return run(agent, env, config.K, seed);
}

MdpRunLog run_mdp_seed(const ExperimentConfig& config, std::uint64_t seed) {
  if (!is_episodic(config.algorithm))
    throw std::invalid_argument("run_mdp_seed: algorithm is not episodic");
  MdpProblem problem = make_mdp_problem(config.mdp, seed);
  AgentConfig agent_config = config.agent;
  agent_config.single_level = config.algorithm == Algorithm::baseline_ucrl_vtr;
  MixtureMDPEnv env(problem.candidates[problem.truth], problem.reward, problem.horizon,
                    problem.initial, seed);
  VtrAgent agent(std::move(problem.candidates), problem.reward, problem.horizon, agent_config);
  return run(agent, env, config.K, problem.truth, seed);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result;
  result.episodic = is_episodic(config.algorithm);
  const std::size_t n = config.seeds.size();
  if (result.episodic) {
    result.mdp.resize(n);
  } else {
    result.bandit.resize(n);
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        if (result.episodic) {
          result.mdp[i] = run_mdp_seed(config, config.seeds[i]);
        } else {
          result.bandit[i] = run_bandit_seed(config, config.seeds[i]);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return result;
}

// -- Metrics --------------------------------------------------------------------

std::vector<std::size_t> uniform_pac_counts(std::span<const double> deltas,
                                            std::span<const double> eps_grid) {
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (eps_grid[i] < eps_grid[i - 1])
      throw std::invalid_argument("uniform_pac_counts: eps grid must be ascending");
  std::vector<std::size_t> counts(eps_grid.size(), 0);
  for (double d : deltas) {
    // Number of grid points strictly below d.
    const auto below = std::lower_bound(eps_grid.begin(), eps_grid.end(), d) - eps_grid.begin();
    for (std::ptrdiff_t i = 0; i < below; ++i) ++counts[static_cast<std::size_t>(i)];
  }
  return counts;
}

std::vector<double> deltas(const BanditRunLog& log) {
  std::vector<double> out;
  out.reserve(log.rounds.size());
  for (const auto& r : log.rounds) out.push_back(r.delta);
  return out;
}

std::vector<double> deltas(const MdpRunLog& log) {
  std::vector<double> out;
  out.reserve(log.episodes.size());
  for (const auto& e : log.episodes) out.push_back(e.delta);
  return out;
}

double theoretical_count_bound(double eps, double d_k, double d_e, double delta, double horizon,
                               double c) {
  if (!(eps > 0.0 && d_k > 0.0 && d_e > 0.0 && delta > 0.0 && horizon > 0.0 && c > 0.0))
    throw std::invalid_argument("theoretical_count_bound: arguments must be positive");
  if (horizon == 1.0) {
    const double d = d_k * d_e;
    return c * d / (eps * eps) * std::log(d / (eps * delta));
  }
  return theoretical_count_bound_mdp(eps, d_k, d_e, delta, horizon, c);
}

double theoretical_count_bound_mdp(double eps, double d_k, double d_e, double delta,
                                   double horizon, double c) {
  if (!(eps > 0.0 && d_k > 0.0 && d_e > 0.0 && delta > 0.0 && horizon > 0.0 && c > 0.0))
    throw std::invalid_argument("theoretical_count_bound_mdp: arguments must be positive");
  const double d = d_k * d_e;
  return c * horizon * horizon * horizon * d *
         std::log(horizon * horizon * d / (eps * delta)) / (eps * eps);
}

SlopeFit regret_slope(std::span<const double> cumulative, std::size_t k_lo, std::size_t k_hi) {
  if (k_lo < 1 || k_hi > cumulative.size() || k_lo >= k_hi)
    throw std::invalid_argument("regret_slope: bad window");
  SlopeFit fit;
  if (cumulative.back() == 0.0 &&
      std::all_of(cumulative.begin(), cumulative.end(), [](double r) { return r == 0.0; })) {
    fit.zero_regret = true;
    return fit;
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(k_hi - k_lo + 1);
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(cumulative[k - 1] + 1.0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

SlopeFit regret_slope(std::span<const double> cumulative) {
  if (cumulative.size() < 100) throw std::invalid_argument("regret_slope: need K >= 100");
  return regret_slope(cumulative, cumulative.size() / 10, cumulative.size());
}

std::vector<double> cumulative_regret(const BanditRunLog& log) {
  std::vector<double> out;
  out.reserve(log.rounds.size());
  for (const auto& r : log.rounds) out.push_back(r.regret);
  return out;
}

std::vector<double> cumulative_regret(const MdpRunLog& log) {
  std::vector<double> out;
  out.reserve(log.episodes.size());
  for (const auto& e : log.episodes) out.push_back(e.regret);
  return out;
}

std::size_t coverage_failures(const BanditRunLog& log) {
  return static_cast<std::size_t>(std::count_if(log.rounds.begin(), log.rounds.end(),
                                                [](const BanditRound& r) { return !r.covered; }));
}

std::size_t coverage_failures(const MdpRunLog& log) {
  return static_cast<std::size_t>(std::count_if(
      log.episodes.begin(), log.episodes.end(), [](const EpisodeRecord& e) { return !e.covered; }));
}

}  // namespace upac
