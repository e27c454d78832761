#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "upac/confidence.hpp"
#include "upac/envs.hpp"
#include "upac/hypothesis.hpp"
#include "upac/run_log.hpp"

namespace upac {

enum class CoveringMode { exact, parametric };

/// Knobs shared by the bandit and MDP agents.
struct AgentConfig {
  double delta = 0.1;
  /// Radius multiplier; 1 is the theoretical radius.
  double c_beta = 1.0;
  /// Metric-entropy coefficient for U_l; defaults to max(1, log |F|).
  std::optional<double> d_k;
  /// Per-level eluder inputs for U_l (last entry repeats). Empty selects the
  /// agent's default: |X| for bandits, |P| for the MDP family.
  std::vector<double> d_e;
  CoveringMode covering = CoveringMode::exact;
  /// Degenerate single-level variant used as the baseline: every observation
  /// goes to level 1 and S stays 1.
  bool single_level = false;
};

struct ActionChoice {
  InputId action = 0;
  double ucb = 0.0;
  bool fallback = false;
};

struct LevelAssignment {
  int level = 1;
  double width = 0.0;
  double level_beta = 0.0;
};

/// Optimistic action selection over the intersection of per-level confidence
/// sets, followed by width-based level assignment.
class BanditAgent {
 public:
  /// The class is borrowed and must outlive the agent.
  BanditAgent(const FunctionClass& cls, const AgentConfig& config);

  const FunctionClass& function_class() const noexcept { return *cls_; }
  const LevelPartition& partition() const noexcept { return partition_; }
  std::size_t rounds() const noexcept { return rounds_; }
  std::size_t fallbacks() const noexcept { return fallbacks_; }
  bool single_level() const noexcept { return single_level_; }

  /// argmax over A of the sup over the intersection at that action; lowest
  /// action wins ties. An empty intersection falls back to the whole class.
  ActionChoice select_action(std::span<const InputId> actions);

  /// Intersection mask used by the most recent select_action (before any
  /// fallback).
  std::span<const std::uint8_t> last_intersection() const noexcept { return intersection_; }

  /// Assigns the round to a level with threshold 2^{-l}, inserts (x, R) and
  /// refits that level.
  LevelAssignment observe(InputId x, double reward);

 private:
  const FunctionClass* cls_;
  LevelPartition partition_;
  bool single_level_;
  std::size_t rounds_ = 0;
  std::size_t fallbacks_ = 0;
  std::vector<std::uint8_t> intersection_;
};

RadiusSchedule make_bandit_schedule(const FunctionClass& cls, const AgentConfig& config);

/// K rounds against the environment. Coverage is judged against the env's
/// true hypothesis, which the agent never sees.
BanditRunLog run(BanditAgent& agent, BanditEnv& env, std::size_t rounds, std::uint64_t seed = 0);

PartitionSummary summarize(const LevelPartition& partition, std::size_t fallbacks);

}  // namespace upac
