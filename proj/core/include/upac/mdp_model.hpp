#pragma once

// Tabular episodic MDP primitives shared by the VTR agent and the simulated
// environments: kernels, reward tables, finite-horizon dynamic programming.
// Steps are 1-based in the public API (h = 1..H, with V[H+1] = 0).

#include <cstddef>
#include <span>
#include <vector>

namespace upac {

class TransitionKernel {
 public:
  TransitionKernel() = default;
  /// probs laid out as [s][a][s']. Throws std::domain_error unless every row
  /// is nonnegative and sums to 1 within 1e-12.
  TransitionKernel(std::size_t num_states, std::size_t num_actions, std::vector<double> probs);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  std::span<const double> row(std::size_t s, std::size_t a) const;
  double prob(std::size_t s, std::size_t a, std::size_t next) const { return row(s, a)[next]; }
  /// <P(.|s,a), v>.
  double expect(std::size_t s, std::size_t a, std::span<const double> v) const;
  const std::vector<double>& data() const noexcept { return probs_; }

  /// sum_i w_i P_i over kernels of equal shape; weights must be a distribution.
  static TransitionKernel mixture(std::span<const TransitionKernel> basis,
                                  std::span<const double> weights);

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> probs_;
};

/// r(s, a) in [0, 1].
class RewardTable {
 public:
  RewardTable() = default;
  RewardTable(std::size_t num_states, std::size_t num_actions, std::vector<double> values);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  double operator()(std::size_t s, std::size_t a) const {
    return values_[s * num_actions_ + a];
  }
  const std::vector<double>& data() const noexcept { return values_; }

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> values_;
};

struct ValueTables {
  int horizon = 0;
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  // q[h-1][s * A + a] for h = 1..H; v[h-1][s] for h = 1..H+1.
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> v;

  double Q(int h, std::size_t s, std::size_t a) const {
    return q[static_cast<std::size_t>(h - 1)][s * num_actions + a];
  }
  double V(int h, std::size_t s) const { return v[static_cast<std::size_t>(h - 1)][s]; }
  std::span<const double> V(int h) const { return v[static_cast<std::size_t>(h - 1)]; }
};

/// Deterministic nonstationary policy: action[h-1][s].
struct Policy {
  std::vector<std::vector<std::size_t>> action;

  std::size_t operator()(int h, std::size_t s) const {
    return action[static_cast<std::size_t>(h - 1)][s];
  }
};

/// Backward induction from V[H+1] = 0 under kernel P.
ValueTables optimal_value_dp(const TransitionKernel& kernel, const RewardTable& reward, int horizon);

/// argmax_a Q[h](s, a) per step and state, lowest action on ties.
Policy greedy_policy(const ValueTables& tables);

/// V^pi[h](s) for h = 1..H+1 by backward induction under the kernel.
std::vector<std::vector<double>> evaluate_policy(const TransitionKernel& kernel,
                                                 const RewardTable& reward, const Policy& policy,
                                                 int horizon);

}  // namespace upac
