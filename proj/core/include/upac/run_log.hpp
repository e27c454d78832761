#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace upac {

struct BanditRound {
  std::size_t k = 0;  // 1-based
  std::size_t action = 0;
  double reward = 0.0;
  int level = 0;
  double width = 0.0;       // w_{F^l}(x_k) at the assigned level, before insertion
  double level_beta = 0.0;  // radius of that level set at the same moment
  double delta = 0.0;       // max_x f*(x) - f*(x_k)
  double regret = 0.0;      // running sum of delta
  double ucb = 0.0;
  double best_value = 0.0;  // max_x f*(x) over A_k
  bool covered = true;      // f* in the intersection used for selection
  bool fallback = false;    // intersection was empty; full class used
};

struct StepRecord {
  int h = 0;  // 1-based, h < H
  std::size_t s = 0;
  std::size_t a = 0;
  std::size_t s_next = 0;
  int level = 0;
  double width = 0.0;
  double level_beta = 0.0;
};

struct EpisodeRecord {
  std::size_t k = 0;  // 1-based
  std::size_t initial_state = 0;
  std::size_t model = 0;  // index of P_k in the candidate family
  double delta = 0.0;
  double regret = 0.0;
  bool covered = true;
  bool fallback = false;
  double optimistic_value = 0.0;    // V_{k,1}(s_{k,1})
  double true_optimal_value = 0.0;  // V*_1(s_{k,1})
  // Regret decomposition evaluated exactly with the known P*:
  // lhs = delta, rhs = sum_h <P_k - P*, V_{k,h+1}> + sum_h xi_{k,h+1}.
  double decomposition_lhs = 0.0;
  double decomposition_rhs = 0.0;
  std::vector<StepRecord> steps;
};

/// Level-set statistics attached to a finished run.
struct PartitionSummary {
  std::vector<std::size_t> occupancy;  // |C^l| for l = 1..num_levels
  std::vector<double> caps;            // U_l for the same levels
  std::size_t cardinality_violations = 0;
  std::size_t fallbacks = 0;
};

struct BanditRunLog {
  std::uint64_t seed = 0;
  std::vector<BanditRound> rounds;
  PartitionSummary partition;
};

struct MdpRunLog {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
  PartitionSummary partition;
};

}  // namespace upac
