#include "upac/bandit_agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace upac {

RadiusSchedule make_bandit_schedule(const FunctionClass& cls, const AgentConfig& config) {
  const double d_k = config.d_k.value_or(std::max(1.0, cls.log_cardinality()));
  std::vector<double> d_e = config.d_e;
  if (d_e.empty()) d_e.push_back(static_cast<double>(cls.num_inputs()));
  RadiusSchedule::LogCovering log_covering;
  if (config.covering == CoveringMode::exact) {
    log_covering = [n = cls.log_cardinality()](double) { return n; };
  } else {
    log_covering = [&cls](double alpha) { return covering_bound(cls, alpha); };
  }
  return RadiusSchedule::bandit(d_k, std::move(d_e), config.delta, config.c_beta,
                                std::move(log_covering));
}

BanditAgent::BanditAgent(const FunctionClass& cls, const AgentConfig& config)
    : cls_(&cls),
      partition_(cls.num_hypotheses(), make_bandit_schedule(cls, config)),
      single_level_(config.single_level),
      intersection_(cls.num_hypotheses(), 1) {}

ActionChoice BanditAgent::select_action(std::span<const InputId> actions) {
  if (actions.empty()) throw std::invalid_argument("select_action: empty action set");
  intersection_ = partition_.intersection();
  const bool empty = std::none_of(intersection_.begin(), intersection_.end(),
                                  [](std::uint8_t m) { return m != 0; });
  ActionChoice choice;
  choice.fallback = empty;
  if (empty) ++fallbacks_;

  const std::size_t n = cls_->num_hypotheses();
  choice.ucb = -std::numeric_limits<double>::infinity();
  for (InputId x : actions) {
    const auto column = cls_->column(x);
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < n; ++h)
      if (empty || intersection_[h]) sup = std::max(sup, column[h]);
    if (sup > choice.ucb) {
      choice.ucb = sup;
      choice.action = x;
    }
  }
  return choice;
}

LevelAssignment BanditAgent::observe(InputId x, double reward) {
  const auto column = cls_->column(x);
  LevelAssignment out;
  if (!single_level_) {
    out.level = assign_level([&](int l) { return partition_.width(l, column); },
                             partition_.total_level(), 1.0);
  }
  out.width = partition_.width(out.level, column);
  out.level_beta = partition_.schedule().beta(out.level, partition_.level(out.level).size());
  partition_.insert(out.level, rounds_, x, column, reward);
  ++rounds_;
  return out;
}

PartitionSummary summarize(const LevelPartition& partition, std::size_t fallbacks) {
  PartitionSummary s;
  s.occupancy = partition.occupancy();
  for (int l = 1; l <= partition.num_levels(); ++l) s.caps.push_back(partition.schedule().U(l));
  s.cardinality_violations = partition.cardinality_violations();
  s.fallbacks = fallbacks;
  return s;
}

BanditRunLog run(BanditAgent& agent, BanditEnv& env, std::size_t rounds, std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("run: K must be >= 1");
  if (agent.function_class().num_hypotheses() != env.function_class().num_hypotheses() ||
      agent.function_class().num_inputs() != env.function_class().num_inputs())
    throw std::invalid_argument("run: agent and environment use different classes");

  BanditRunLog log;
  log.seed = seed;
  log.rounds.reserve(rounds);
  double regret = 0.0;
  for (std::size_t k = 1; k <= rounds; ++k) {
    const auto actions = env.action_set();
    const ActionChoice choice = agent.select_action(actions);
    BanditRound r;
    r.k = k;
    r.action = choice.action;
    r.ucb = choice.ucb;
    r.fallback = choice.fallback;
    r.covered = !choice.fallback && agent.last_intersection()[env.truth()] != 0;
    r.best_value = env.best_value(actions);
    r.delta = r.best_value - env.mean(choice.action);
    regret += r.delta;
    r.regret = regret;
    r.reward = env.sample_reward(choice.action);
    const LevelAssignment a = agent.observe(choice.action, r.reward);
    r.level = a.level;
    r.width = a.width;
    r.level_beta = a.level_beta;
    log.rounds.push_back(r);
  }
  log.partition = summarize(agent.partition(), agent.fallbacks());
  return log;
}

}  // namespace upac
