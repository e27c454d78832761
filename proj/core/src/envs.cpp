#include "upac/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace upac {
namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace

std::size_t sample_categorical(std::span<const double> probs, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

// -- BanditEnv -----------------------------------------------------------------

BanditEnv::BanditEnv(const FunctionClass& cls, HypothesisId truth, double noise_sd,
                     ActionSchedule schedule, std::uint64_t seed)
    : cls_(&cls),
      truth_(truth),
      noise_sd_(noise_sd),
      schedule_(schedule),
      reward_rng_(make_stream(seed, 1)),
      action_rng_(make_stream(seed, 2)) {
  if (truth >= cls.num_hypotheses()) throw std::invalid_argument("BanditEnv: truth not in class");
  if (!(noise_sd >= 0.0 && noise_sd <= 1.0))
    throw std::invalid_argument("BanditEnv: noise sd must lie in [0,1]");
  if (schedule.kind == ActionSchedule::Kind::subset &&
      (schedule.subset_size == 0 || schedule.subset_size > cls.num_inputs()))
    throw std::invalid_argument("BanditEnv: subset size must be in [1, |X|]");
}

std::vector<InputId> BanditEnv::action_set() {
  std::vector<InputId> all(cls_->num_inputs());
  std::iota(all.begin(), all.end(), InputId{0});
  if (schedule_.kind == ActionSchedule::Kind::fixed) return all;
  // Partial Fisher-Yates with explicit uniform draws.
  for (std::size_t i = 0; i < schedule_.subset_size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(action_rng_)]);
  }
  all.resize(schedule_.subset_size);
  std::sort(all.begin(), all.end());
  return all;
}

double BanditEnv::sample_reward(InputId x) {
  const double eta = noise_(reward_rng_);
  return mean(x) + noise_sd_ * eta;
}

double BanditEnv::best_value(std::span<const InputId> actions) const {
  if (actions.empty()) throw std::invalid_argument("best_value: empty action set");
  double best = mean(actions.front());
  for (InputId x : actions) best = std::max(best, mean(x));
  return best;
}

double BanditEnv::suboptimality(std::span<const InputId> actions, InputId x) const {
  return best_value(actions) - mean(x);
}

// -- MixtureMDPEnv ---------------------------------------------------------------

MixtureMDPEnv::MixtureMDPEnv(TransitionKernel truth, RewardTable reward, int horizon,
                             std::vector<double> initial, std::uint64_t seed)
    : truth_(std::move(truth)),
      reward_(std::move(reward)),
      horizon_(horizon),
      initial_(std::move(initial)),
      optimal_(optimal_value_dp(truth_, reward_, horizon)),
      rng_(make_stream(seed, 3)) {
  if (!initial_.empty()) {
    if (initial_.size() != truth_.num_states())
      throw std::invalid_argument("MixtureMDPEnv: initial distribution has wrong size");
    double total = 0.0;
    for (double p : initial_) {
      if (!(p >= 0.0)) throw std::invalid_argument("MixtureMDPEnv: negative initial probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("MixtureMDPEnv: initial distribution must sum to 1");
  }
}

std::size_t MixtureMDPEnv::initial_state() {
  if (initial_.empty()) return 0;
  return sample_categorical(initial_, unit_(rng_));
}

std::size_t MixtureMDPEnv::transition(std::size_t s, std::size_t a) {
  return sample_categorical(truth_.row(s, a), unit_(rng_));
}

std::vector<std::vector<double>> MixtureMDPEnv::policy_value(const Policy& policy) const {
  return evaluate_policy(truth_, reward_, policy, horizon_);
}

double MixtureMDPEnv::suboptimality(std::size_t s1, const Policy& policy) const {
  const auto v = policy_value(policy);
  return optimal_.V(1, s1) - v[0][s1];
}

// -- Generators ------------------------------------------------------------------

FunctionClass random_finite_class(std::size_t hypotheses, std::size_t inputs, std::uint64_t seed) {
  std::mt19937_64 rng(make_stream(seed, 10));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> values(hypotheses, std::vector<double>(inputs));
  for (auto& row : values)
    for (auto& v : row) v = unit(rng);
  return FunctionClass::finite(values);
}

FunctionClass linear_sphere_class(std::size_t dim, std::size_t num_actions,
                                  std::size_t grid_points_per_axis) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("linear_sphere_class: d must be 2 or 3");
  if (num_actions < 2) throw std::invalid_argument("linear_sphere_class: need >= 2 actions");
  const double half_pi = std::numbers::pi / 2.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<std::vector<double>> features;
  if (dim == 2) {
    for (std::size_t j = 0; j < num_actions; ++j) {
      const double angle = half_pi * static_cast<double>(j) / static_cast<double>(num_actions - 1);
      features.push_back({scale * std::cos(angle), scale * std::sin(angle)});
    }
  } else {
    for (std::size_t i = 0; i < num_actions; ++i) {
      const double polar = half_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(num_actions);
      for (std::size_t j = 0; j < num_actions; ++j) {
        const double azimuth = half_pi * static_cast<double>(j) / static_cast<double>(num_actions - 1);
        features.push_back({scale * std::sin(polar) * std::cos(azimuth),
                            scale * std::sin(polar) * std::sin(azimuth), scale * std::cos(polar)});
      }
    }
  }
  return FunctionClass::parametric(std::move(features), ParameterGrid{dim, grid_points_per_axis});
}

std::vector<std::vector<double>> simplex_grid(std::size_t parts, std::size_t resolution) {
  if (parts == 0 || resolution == 0) throw std::invalid_argument("simplex_grid: empty grid");
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> counts(parts, 0);
  // Enumerate compositions of `resolution` into `parts` lexicographically.
  auto recurse = [&](auto&& self, std::size_t i, std::size_t remaining) -> void {
    if (i + 1 == parts) {
      counts[i] = remaining;
      std::vector<double> w(parts);
      for (std::size_t j = 0; j < parts; ++j)
        w[j] = static_cast<double>(counts[j]) / static_cast<double>(resolution);
      out.push_back(std::move(w));
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[i] = c;
      self(self, i + 1, remaining - c);
    }
  };
  recurse(recurse, 0, resolution);
  return out;
}

MixtureFamily linear_mixture_family(std::size_t num_states, std::size_t num_actions,
                                    std::size_t num_basis, std::size_t resolution,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(make_stream(seed, 20));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Exponential weights raised to a power give peaked rows, so basis kernels differ markedly.
  std::exponential_distribution<double> expo(1.0);

  MixtureFamily family;
  for (std::size_t b = 0; b < num_basis; ++b) {
    std::vector<double> probs(num_states * num_actions * num_states);
    for (std::size_t r = 0; r < num_states * num_actions; ++r) {
      double total = 0.0;
      for (std::size_t i = 0; i < num_states; ++i) {
        const double w = std::pow(expo(rng), 3.0) + 1e-3;
        probs[r * num_states + i] = w;
        total += w;
      }
      for (std::size_t i = 0; i < num_states; ++i) probs[r * num_states + i] /= total;
    }
    family.basis.emplace_back(num_states, num_actions, std::move(probs));
  }
  std::vector<double> rewards(num_states * num_actions);
  for (auto& r : rewards) r = unit(rng);
  family.reward = RewardTable(num_states, num_actions, std::move(rewards));

  family.weights = simplex_grid(num_basis, resolution);
  for (const auto& w : family.weights)
    family.candidates.push_back(TransitionKernel::mixture(family.basis, w));
  return family;
}

}  // namespace upac
