#pragma once

// Simulated ground truth and exact evaluation oracles.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "upac/hypothesis.hpp"
#include "upac/mdp_model.hpp"

namespace upac {

/// Which inputs are offered each round: every input, or a uniformly drawn
/// subset of fixed size (sorted ascending).
struct ActionSchedule {
  enum class Kind { fixed, subset };
  Kind kind = Kind::fixed;
  std::size_t subset_size = 0;
};

class BanditEnv {
 public:
  /// The class is borrowed and must outlive the environment.
  BanditEnv(const FunctionClass& cls, HypothesisId truth, double noise_sd,
            ActionSchedule schedule, std::uint64_t seed);

  const FunctionClass& function_class() const noexcept { return *cls_; }
  HypothesisId truth() const noexcept { return truth_; }
  double noise_sd() const noexcept { return noise_sd_; }

  /// A_k for the next round. Draws from the action stream only.
  std::vector<InputId> action_set();

  /// f*(x) + eta, eta ~ N(0, sd^2) from the reward stream; unclipped.
  double sample_reward(InputId x);

  double mean(InputId x) const { return cls_->evaluate(truth_, x); }
  double best_value(std::span<const InputId> actions) const;
  /// max_{x' in A} f*(x') - f*(x).
  double suboptimality(std::span<const InputId> actions, InputId x) const;

 private:
  const FunctionClass* cls_;
  HypothesisId truth_;
  double noise_sd_;
  ActionSchedule schedule_;
  std::mt19937_64 reward_rng_;
  std::mt19937_64 action_rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

class MixtureMDPEnv {
 public:
  /// initial is a distribution over states; empty means always start in 0.
  MixtureMDPEnv(TransitionKernel truth, RewardTable reward, int horizon,
                std::vector<double> initial, std::uint64_t seed);

  const TransitionKernel& kernel() const noexcept { return truth_; }
  const RewardTable& reward() const noexcept { return reward_; }
  int horizon() const noexcept { return horizon_; }
  std::size_t num_states() const noexcept { return truth_.num_states(); }
  std::size_t num_actions() const noexcept { return truth_.num_actions(); }

  std::size_t initial_state();
  /// s' ~ P*(.|s,a).
  std::size_t transition(std::size_t s, std::size_t a);

  const ValueTables& optimal_values() const noexcept { return optimal_; }
  /// V^pi_h for h = 1..H+1 under P*.
  std::vector<std::vector<double>> policy_value(const Policy& policy) const;
  /// V*_1(s1) - V^pi_1(s1).
  double suboptimality(std::size_t s1, const Policy& policy) const;

 private:
  TransitionKernel truth_;
  RewardTable reward_;
  int horizon_;
  std::vector<double> initial_;
  ValueTables optimal_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// Inverse-CDF categorical draw from one uniform; keeps draw counts identical
/// across agents for common-random-number comparisons.
std::size_t sample_categorical(std::span<const double> probs, double u);

// -- Instance generators --------------------------------------------------------

/// Values i.i.d. uniform on [0,1].
FunctionClass random_finite_class(std::size_t hypotheses, std::size_t inputs, std::uint64_t seed);

/// Linear class theta . x / sqrt(d) with theta on a grid over [0,1]^d and
/// actions on the unit sphere's positive orthant: evenly spaced angles for
/// d = 2, an angle grid of side `num_actions` for d = 3 (num_actions^2 inputs).
FunctionClass linear_sphere_class(std::size_t dim, std::size_t num_actions,
                                  std::size_t grid_points_per_axis);

struct MixtureFamily {
  std::vector<TransitionKernel> basis;
  std::vector<std::vector<double>> weights;
  std::vector<TransitionKernel> candidates;
  RewardTable reward;
};

/// Linear-mixture family: random basis kernels and rewards, candidates are
/// sum_i theta_i P_i over all simplex points with denominator `resolution`.
MixtureFamily linear_mixture_family(std::size_t num_states, std::size_t num_actions,
                                    std::size_t num_basis, std::size_t resolution,
                                    std::uint64_t seed);

/// All weight vectors of length `parts` with entries k/resolution summing to 1,
/// in lexicographic order.
std::vector<std::vector<double>> simplex_grid(std::size_t parts, std::size_t resolution);

}  // namespace upac
