#include "upac/vtr_agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace upac {

RadiusSchedule make_mdp_schedule(std::size_t num_candidates, int horizon,
                                 const AgentConfig& config) {
  const double log_n = std::log(static_cast<double>(num_candidates));
  const double d_k = config.d_k.value_or(std::max(1.0, log_n));
  std::vector<double> d_e = config.d_e;
  if (d_e.empty()) d_e.push_back(static_cast<double>(num_candidates));
  return RadiusSchedule::mdp(d_k, std::move(d_e), config.delta, static_cast<double>(horizon),
                             config.c_beta, [log_n](double) { return log_n; });
}

VtrAgent::VtrAgent(std::vector<TransitionKernel> candidates, RewardTable reward, int horizon,
                   const AgentConfig& config)
    : candidates_(std::move(candidates)),
      reward_(std::move(reward)),
      horizon_(horizon),
      partition_(candidates_.size(), make_mdp_schedule(std::max<std::size_t>(candidates_.size(), 1),
                                                       std::max(horizon, 1), config)),
      single_level_(config.single_level),
      intersection_(candidates_.size(), 1) {
  if (candidates_.empty()) throw std::invalid_argument("VtrAgent: empty candidate family");
  if (horizon < 1) throw std::invalid_argument("VtrAgent: horizon must be >= 1");
  for (const auto& p : candidates_) {
    if (p.num_states() != reward_.num_states() || p.num_actions() != reward_.num_actions())
      throw std::invalid_argument("VtrAgent: candidate shape does not match the reward table");
    values_.push_back(optimal_value_dp(p, reward_, horizon_));
    policies_.push_back(greedy_policy(values_.back()));
  }
}

ModelChoice VtrAgent::select_optimistic_model(std::size_t s1) {
  intersection_ = partition_.intersection();
  const bool empty = std::none_of(intersection_.begin(), intersection_.end(),
                                  [](std::uint8_t m) { return m != 0; });
  ModelChoice choice;
  choice.fallback = empty;
  if (empty) ++fallbacks_;
  choice.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (!empty && !intersection_[i]) continue;
    const double v = values_[i].V(1, s1);
    if (v > choice.value) {
      choice.value = v;
      choice.model = i;
    }
  }
  return choice;
}

std::vector<double> VtrAgent::triplet_column(std::size_t model, int h, std::size_t s,
                                             std::size_t a) const {
  const auto v = values_.at(model).V(h);
  std::vector<double> column(candidates_.size());
  for (std::size_t i = 0; i < candidates_.size(); ++i) column[i] = candidates_[i].expect(s, a, v);
  return column;
}

EpisodeRecord VtrAgent::run_episode(MixtureMDPEnv& env, std::optional<std::size_t> truth) {
  if (env.horizon() != horizon_ || env.num_states() != reward_.num_states() ||
      env.num_actions() != reward_.num_actions())
    throw std::invalid_argument("run_episode: environment shape does not match the agent");
  if (truth && *truth >= candidates_.size())
    throw std::invalid_argument("run_episode: truth index outside the family");

  EpisodeRecord rec;
  rec.k = ++episodes_;
  const std::size_t s1 = env.initial_state();
  rec.initial_state = s1;
  const ModelChoice choice = select_optimistic_model(s1);
  rec.model = choice.model;
  rec.fallback = choice.fallback;
  rec.covered = truth && !choice.fallback && intersection_[*truth] != 0;
  rec.optimistic_value = choice.value;
  rec.true_optimal_value = env.optimal_values().V(1, s1);

  const ValueTables& vk = values_[choice.model];
  const Policy& pi = policies_[choice.model];
  const std::size_t H = static_cast<std::size_t>(horizon_);
  const std::size_t S = reward_.num_states();
  const std::size_t A = reward_.num_actions();

  // Trajectory s_1..s_H with a_h = pi_k(h, s_h).
  std::vector<std::size_t> states{s1};
  std::vector<std::size_t> actions;
  for (int h = 1; h <= horizon_; ++h) {
    actions.push_back(pi(h, states.back()));
    if (h < horizon_) states.push_back(env.transition(states.back(), actions.back()));
  }

  const auto v_pi = env.policy_value(pi);
  rec.delta = rec.true_optimal_value - v_pi[0][s1];
  rec.decomposition_lhs = rec.delta;
  double rhs = 0.0;
  for (int h = 1; h < horizon_; ++h) {
    const std::size_t i = static_cast<std::size_t>(h - 1);
    const std::size_t s = states[i], a = actions[i], s_next = states[i + 1];
    const auto v_next = vk.V(h + 1);
    const auto& vp = v_pi[i + 1];
    std::vector<double> gap(S);
    for (std::size_t x = 0; x < S; ++x) gap[x] = v_next[x] - vp[x];
    const double model_gap = candidates_[choice.model].expect(s, a, v_next) - env.kernel().expect(s, a, v_next);
    const double xi = env.kernel().expect(s, a, gap) - gap[s_next];
    rhs += model_gap + xi;
  }
  rec.decomposition_rhs = rhs;

  // Sequential level assignment; widths see the partition as updated by the
  // earlier steps of this episode.
  const double base = static_cast<double>(horizon_);
  for (int h = 1; h < horizon_; ++h) {
    const std::size_t i = static_cast<std::size_t>(h - 1);
    const std::size_t s = states[i], a = actions[i], s_next = states[i + 1];
    const auto column = triplet_column(choice.model, h + 1, s, a);
    StepRecord step;
    step.h = h;
    step.s = s;
    step.a = a;
    step.s_next = s_next;
    step.level = single_level_
                     ? 1
                     : assign_level([&](int l) { return partition_.width(l, column); },
                                    partition_.total_level(), base);
    step.width = partition_.width(step.level, column);
    step.level_beta = partition_.schedule().beta(step.level, partition_.level(step.level).size());
    const std::size_t index = (rec.k - 1) * (H - 1) + i;
    // Equal (model, h, s, a) give identical columns, so they share one input.
    const std::size_t key = ((choice.model * H + static_cast<std::size_t>(h)) * S + s) * A + a;
    partition_.insert(step.level, index, key, column, vk.V(h + 1, s_next));
    rec.steps.push_back(step);
  }
  return rec;
}

MdpRunLog run(VtrAgent& agent, MixtureMDPEnv& env, std::size_t episodes,
              std::optional<std::size_t> truth, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("run: K must be >= 1");
  MdpRunLog log;
  log.seed = seed;
  log.episodes.reserve(episodes);
  double regret = 0.0;
  for (std::size_t k = 0; k < episodes; ++k) {
    EpisodeRecord rec = agent.run_episode(env, truth);
    regret += rec.delta;
    rec.regret = regret;
    log.episodes.push_back(std::move(rec));
  }
  log.partition = summarize(agent.partition(), agent.fallbacks());
  return log;
}

}  // namespace upac
