#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "upac/bandit_agent.hpp"
#include "upac/confidence.hpp"
#include "upac/envs.hpp"
#include "upac/mdp_model.hpp"
#include "upac/run_log.hpp"

namespace upac {

struct ModelChoice {
  std::size_t model = 0;
  double value = 0.0;  // V_{k,1}(s1) under the chosen model
  bool fallback = false;
};

/// Value-targeted regression over a finite candidate family of transition
/// kernels with a known reward. Each step h < H contributes the triplet
/// (s_h, a_h, V_{k,h+1}) whose prediction under candidate P is
/// <P(.|s_h,a_h), V_{k,h+1}> and whose target is V_{k,h+1}(s_{h+1}).
class VtrAgent {
 public:
  /// d_e defaults to |P|; d_k to max(1, log |P|). Log-covering is log |P|.
  VtrAgent(std::vector<TransitionKernel> candidates, RewardTable reward, int horizon,
           const AgentConfig& config);

  std::size_t num_candidates() const noexcept { return candidates_.size(); }
  int horizon() const noexcept { return horizon_; }
  const TransitionKernel& candidate(std::size_t i) const { return candidates_.at(i); }
  /// V^{*,P_i} and its greedy policy; computed once per candidate.
  const ValueTables& values(std::size_t i) const { return values_.at(i); }
  const Policy& policy(std::size_t i) const { return policies_.at(i); }
  const LevelPartition& partition() const noexcept { return partition_; }
  std::size_t episodes() const noexcept { return episodes_; }
  std::size_t fallbacks() const noexcept { return fallbacks_; }

  /// argmax of V^{*,P}_1(s1) over the intersection; lowest index on ties.
  /// An empty intersection falls back to the whole family.
  ModelChoice select_optimistic_model(std::size_t s1);
  std::span<const std::uint8_t> last_intersection() const noexcept { return intersection_; }

  /// Prediction column <P_i(.|s,a), V^{model}_{h}> over all candidates i.
  std::vector<double> triplet_column(std::size_t model, int h, std::size_t s,
                                     std::size_t a) const;

  /// Plays one episode, then assigns and inserts its H - 1 triplets in order.
  /// With truth given, also fills coverage and the regret decomposition.
  EpisodeRecord run_episode(MixtureMDPEnv& env, std::optional<std::size_t> truth = std::nullopt);

 private:
  std::vector<TransitionKernel> candidates_;
  RewardTable reward_;
  int horizon_;
  std::vector<ValueTables> values_;
  std::vector<Policy> policies_;
  LevelPartition partition_;
  bool single_level_;
  std::size_t episodes_ = 0;
  std::size_t fallbacks_ = 0;
  std::vector<std::uint8_t> intersection_;
};

RadiusSchedule make_mdp_schedule(std::size_t num_candidates, int horizon,
                                 const AgentConfig& config);

MdpRunLog run(VtrAgent& agent, MixtureMDPEnv& env, std::size_t episodes,
              std::optional<std::size_t> truth, std::uint64_t seed = 0);

}  // namespace upac
