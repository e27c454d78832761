#include "upac/mdp_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace upac {

TransitionKernel::TransitionKernel(std::size_t num_states, std::size_t num_actions,
                                   std::vector<double> probs)
    : num_states_(num_states), num_actions_(num_actions), probs_(std::move(probs)) {
  if (num_states == 0 || num_actions == 0)
    throw std::domain_error("kernel: need at least one state and action");
  if (probs_.size() != num_states * num_actions * num_states)
    throw std::domain_error("kernel: expected S*A*S probabilities");
  for (std::size_t s = 0; s < num_states; ++s) {
    for (std::size_t a = 0; a < num_actions; ++a) {
      double total = 0.0;
      for (double p : row(s, a)) {
        if (!(p >= 0.0)) throw std::domain_error("kernel: negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw std::domain_error("kernel: row (" + std::to_string(s) + "," + std::to_string(a) +
                                ") sums to " + std::to_string(total));
    }
  }
}

std::span<const double> TransitionKernel::row(std::size_t s, std::size_t a) const {
  if (s >= num_states_ || a >= num_actions_) throw std::domain_error("kernel: (s,a) out of range");
  return {probs_.data() + (s * num_actions_ + a) * num_states_, num_states_};
}

double TransitionKernel::expect(std::size_t s, std::size_t a, std::span<const double> v) const {
  const auto p = row(s, a);
  double total = 0.0;
  for (std::size_t i = 0; i < num_states_; ++i) total += p[i] * v[i];
  return total;
}

TransitionKernel TransitionKernel::mixture(std::span<const TransitionKernel> basis,
                                           std::span<const double> weights) {
  if (basis.empty() || basis.size() != weights.size())
    throw std::invalid_argument("mixture: basis and weights must match and be nonempty");
  const std::size_t S = basis.front().num_states(), A = basis.front().num_actions();
  std::vector<double> probs(S * A * S, 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].num_states() != S || basis[i].num_actions() != A)
      throw std::invalid_argument("mixture: basis shapes differ");
    for (std::size_t j = 0; j < probs.size(); ++j) probs[j] += weights[i] * basis[i].data()[j];
  }
  // Renormalize each row so rounding in the weights cannot break the 1e-12 check.
  for (std::size_t r = 0; r < S * A; ++r) {
    double total = 0.0;
    for (std::size_t i = 0; i < S; ++i) total += probs[r * S + i];
    for (std::size_t i = 0; i < S; ++i) probs[r * S + i] /= total;
  }
  return TransitionKernel(S, A, std::move(probs));
}

RewardTable::RewardTable(std::size_t num_states, std::size_t num_actions,
                         std::vector<double> values)
    : num_states_(num_states), num_actions_(num_actions), values_(std::move(values)) {
  if (values_.size() != num_states * num_actions)
    throw std::domain_error("reward: expected S*A entries");
  for (double r : values_)
    if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("reward: entries must lie in [0,1]");
}

namespace {

void check_shapes(const TransitionKernel& kernel, const RewardTable& reward, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (kernel.num_states() == 0) throw std::domain_error("invalid kernel");
  if (kernel.num_states() != reward.num_states() || kernel.num_actions() != reward.num_actions())
    throw std::domain_error("kernel and reward shapes differ");
}

}  // namespace

ValueTables optimal_value_dp(const TransitionKernel& kernel, const RewardTable& reward,
                             int horizon) {
  check_shapes(kernel, reward, horizon);
  const std::size_t S = kernel.num_states(), A = kernel.num_actions();
  ValueTables t;
  t.horizon = horizon;
  t.num_states = S;
  t.num_actions = A;
  t.q.assign(static_cast<std::size_t>(horizon), std::vector<double>(S * A, 0.0));
  t.v.assign(static_cast<std::size_t>(horizon) + 1, std::vector<double>(S, 0.0));
  for (int h = horizon; h >= 1; --h) {
    const auto& next = t.v[static_cast<std::size_t>(h)];
    auto& q = t.q[static_cast<std::size_t>(h - 1)];
    auto& v = t.v[static_cast<std::size_t>(h - 1)];
    for (std::size_t s = 0; s < S; ++s) {
      double best = 0.0;
      for (std::size_t a = 0; a < A; ++a) {
        const double value = reward(s, a) + kernel.expect(s, a, next);
        q[s * A + a] = value;
        if (a == 0 || value > best) best = value;
      }
      v[s] = best;
    }
  }
  return t;
}

Policy greedy_policy(const ValueTables& tables) {
  Policy pi;
  pi.action.assign(static_cast<std::size_t>(tables.horizon), std::vector<std::size_t>(tables.num_states, 0));
  for (int h = 1; h <= tables.horizon; ++h) {
    for (std::size_t s = 0; s < tables.num_states; ++s) {
      std::size_t best = 0;
      for (std::size_t a = 1; a < tables.num_actions; ++a)
        if (tables.Q(h, s, a) > tables.Q(h, s, best)) best = a;
      pi.action[static_cast<std::size_t>(h - 1)][s] = best;
    }
  }
  return pi;
}

std::vector<std::vector<double>> evaluate_policy(const TransitionKernel& kernel,
                                                 const RewardTable& reward, const Policy& policy,
                                                 int horizon) {
  check_shapes(kernel, reward, horizon);
  if (policy.action.size() != static_cast<std::size_t>(horizon))
    throw std::invalid_argument("policy must cover every step");
  const std::size_t S = kernel.num_states();
  std::vector<std::vector<double>> v(static_cast<std::size_t>(horizon) + 1,
                                     std::vector<double>(S, 0.0));
  for (int h = horizon; h >= 1; --h) {
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t a = policy(h, s);
      if (a >= kernel.num_actions()) throw std::invalid_argument("policy action out of range");
      v[static_cast<std::size_t>(h - 1)][s] =
          reward(s, a) + kernel.expect(s, a, v[static_cast<std::size_t>(h)]);
    }
  }
  return v;
}

}  // namespace upac
