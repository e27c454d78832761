#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "upac/envs.hpp"
#include "upac/mdp_model.hpp"

using namespace upac;

namespace {

TransitionKernel single_state(std::size_t actions) {
  return TransitionKernel(1, actions, std::vector<double>(actions, 1.0));
}

Policy random_policy(std::size_t S, std::size_t A, int H, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, A - 1);
  Policy pi;
  for (int h = 0; h < H; ++h) {
    pi.action.emplace_back(S);
    for (auto& a : pi.action.back()) a = pick(rng);
  }
  return pi;
}

}  // namespace

TEST(TransitionKernel, RejectsInvalidRows) {
  EXPECT_THROW(TransitionKernel(1, 1, {0.5}), std::domain_error);
  EXPECT_THROW(TransitionKernel(2, 1, {1.2, -0.2, 0.5, 0.5}), std::domain_error);
  EXPECT_NO_THROW(TransitionKernel(2, 1, {0.3, 0.7, 1.0, 0.0}));
}

TEST(TransitionKernel, MixtureIsWeightedSum) {
  const TransitionKernel a(2, 1, {1.0, 0.0, 0.0, 1.0});
  const TransitionKernel b(2, 1, {0.0, 1.0, 0.5, 0.5});
  const std::vector<TransitionKernel> basis{a, b};
  const std::vector<double> w{0.25, 0.75};
  const auto m = TransitionKernel::mixture(basis, w);
  EXPECT_NEAR(m.prob(0, 0, 0), 0.25, 1e-15);
  EXPECT_NEAR(m.prob(1, 0, 1), 0.625, 1e-15);
}

TEST(RewardTable, RejectsOutOfRange) {
  EXPECT_THROW(RewardTable(1, 1, {1.5}), std::domain_error);
}

TEST(OptimalValueDp, HorizonOneIsRewardMax) {
  const auto fam = linear_mixture_family(3, 2, 2, 3, 1);
  const auto v = optimal_value_dp(fam.candidates[0], fam.reward, 1);
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(v.Q(1, s, a), fam.reward(s, a));
    EXPECT_EQ(v.V(1, s), std::max(fam.reward(s, 0), fam.reward(s, 1)));
    EXPECT_EQ(v.V(2, s), 0.0);
  }
}

TEST(OptimalValueDp, SingleStateUnitRewardTelescopes) {
  const auto v = optimal_value_dp(single_state(2), RewardTable(1, 2, {1.0, 1.0}), 6);
  EXPECT_DOUBLE_EQ(v.V(1, 0), 6.0);
}

TEST(OptimalValueDp, MatchesPolicyEnumeration) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto fam = linear_mixture_family(3, 2, 2, 4, seed);
    for (const auto& p : {fam.candidates.front(), fam.candidates.back()}) {
      const auto v = optimal_value_dp(p, fam.reward, 4);
      for (std::size_t s = 0; s < 3; ++s)
        EXPECT_NEAR(v.V(1, s), oracle::best_policy_value(p, fam.reward, 4, s), 1e-12);
    }
  }
}

TEST(OptimalValueDp, BoundsAndRowwiseMax) {
  const auto fam = linear_mixture_family(4, 3, 3, 3, 7);
  const auto v = optimal_value_dp(fam.candidates[5], fam.reward, 5);
  for (int h = 1; h <= 5; ++h)
    for (std::size_t s = 0; s < 4; ++s) {
      double best = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        EXPECT_GE(v.Q(h, s, a), 0.0);
        EXPECT_LE(v.Q(h, s, a), 5.0);
        best = std::max(best, v.Q(h, s, a));
      }
      EXPECT_EQ(v.V(h, s), best);
    }
}

TEST(BanditEnv, NoiselessRewardIsMean) {
  const auto cls = random_finite_class(4, 3, 2);
  BanditEnv env(cls, 1, 0.0, {}, 9);
  for (InputId x = 0; x < 3; ++x) EXPECT_EQ(env.sample_reward(x), cls.evaluate(1, x));
}

TEST(BanditEnv, SeededStreamsReplay) {
  const auto cls = random_finite_class(4, 6, 2);
  BanditEnv a(cls, 0, 1.0, {ActionSchedule::Kind::subset, 3}, 5);
  BanditEnv b(cls, 0, 1.0, {ActionSchedule::Kind::subset, 3}, 5);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(a.action_set(), b.action_set());
    EXPECT_EQ(a.sample_reward(i % 6), b.sample_reward(i % 6));
  }
}

TEST(BanditEnv, RewardStreamIndependentOfActionChoice) {
  // Same seed, different actions: the noise sequences coincide.
  const auto cls = random_finite_class(3, 2, 4);
  BanditEnv a(cls, 2, 1.0, {}, 77);
  BanditEnv b(cls, 2, 1.0, {}, 77);
  for (int i = 0; i < 20; ++i) {
    const double ea = a.sample_reward(0) - a.mean(0);
    const double eb = b.sample_reward(1) - b.mean(1);
    EXPECT_NEAR(ea, eb, 1e-12);
  }
}

TEST(BanditEnv, MonteCarloMean) {
  const auto cls = random_finite_class(2, 1, 6);
  BanditEnv env(cls, 0, 1.0, {}, 3);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += env.sample_reward(0);
  EXPECT_LT(std::abs(sum / n - cls.evaluate(0, 0)), 3.0 / std::sqrt(double(n)));
}

TEST(BanditEnv, ValidatesArguments) {
  const auto cls = random_finite_class(2, 3, 6);
  EXPECT_THROW(BanditEnv(cls, 2, 1.0, {}, 1), std::invalid_argument);
  EXPECT_THROW(BanditEnv(cls, 0, 1.5, {}, 1), std::invalid_argument);
  EXPECT_THROW(BanditEnv(cls, 0, 1.0, {ActionSchedule::Kind::subset, 4}, 1), std::invalid_argument);
}

TEST(BanditEnv, SuboptimalityIsDirectDifference) {
  const auto cls = FunctionClass::finite({{0.2, 0.9}});
  BanditEnv env(cls, 0, 0.0, {}, 1);
  const std::vector<InputId> all{0, 1};
  EXPECT_NEAR(env.suboptimality(all, 0), 0.7, 1e-15);
  EXPECT_EQ(env.suboptimality(all, 1), 0.0);
}

TEST(BanditEnv, SubsetScheduleDrawsSortedDistinctActions) {
  const auto cls = random_finite_class(2, 10, 6);
  BanditEnv env(cls, 0, 1.0, {ActionSchedule::Kind::subset, 4}, 8);
  for (int i = 0; i < 100; ++i) {
    const auto a = env.action_set();
    ASSERT_EQ(a.size(), 4u);
    for (std::size_t j = 1; j < a.size(); ++j) EXPECT_LT(a[j - 1], a[j]);
  }
}

TEST(MixtureMDPEnv, DeterministicRowAndUniformFrequencies) {
  const TransitionKernel p(3, 2, {0, 0, 1, 1. / 3, 1. / 3, 1. / 3,  //
                                  1, 0, 0, 1. / 3, 1. / 3, 1. / 3,  //
                                  0, 1, 0, 1. / 3, 1. / 3, 1. / 3});
  MixtureMDPEnv env(p, RewardTable(3, 2, std::vector<double>(6, 0.5)), 2, {}, 4);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(env.transition(0, 0), 2u);
  std::vector<int> freq(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++freq[env.transition(1, 1)];
  for (int f : freq) EXPECT_NEAR(double(f) / n, 1.0 / 3.0, 0.02);
}

TEST(MixtureMDPEnv, SeededReplay) {
  const auto fam = linear_mixture_family(3, 2, 2, 3, 2);
  MixtureMDPEnv a(fam.candidates[1], fam.reward, 4, {0.2, 0.3, 0.5}, 11);
  MixtureMDPEnv b(fam.candidates[1], fam.reward, 4, {0.2, 0.3, 0.5}, 11);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.initial_state(), b.initial_state());
    EXPECT_EQ(a.transition(i % 3, i % 2), b.transition(i % 3, i % 2));
  }
}

TEST(MixtureMDPEnv, PolicyValuesBelowOptimal) {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto fam = linear_mixture_family(3, 2, 2, 5, seed);
    MixtureMDPEnv env(fam.candidates[seed % fam.candidates.size()], fam.reward, 4, {}, seed);
    const auto opt = greedy_policy(env.optimal_values());
    const auto v_opt = env.policy_value(opt);
    for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(v_opt[0][s], env.optimal_values().V(1, s), 1e-12);
    for (int trial = 0; trial < 20; ++trial) {
      const auto pi = random_policy(3, 2, 4, rng);
      const auto v = env.policy_value(pi);
      for (int h = 1; h <= 4; ++h)
        for (std::size_t s = 0; s < 3; ++s)
          EXPECT_LE(v[h - 1][s], env.optimal_values().V(h, s) + 1e-12);
      const double gap = env.suboptimality(0, pi);
      EXPECT_GE(gap, -1e-12);
      EXPECT_LE(gap, 4.0);
    }
  }
}

TEST(MixtureMDPEnv, UniformRandomPolicyOnUnitRewardIsH) {
  std::mt19937_64 rng(3);
  MixtureMDPEnv env(single_state(3), RewardTable(1, 3, {1.0, 1.0, 1.0}), 5, {}, 1);
  const auto v = env.policy_value(random_policy(1, 3, 5, rng));
  EXPECT_DOUBLE_EQ(v[0][0], 5.0);
}

TEST(Generators, SimplexGridIsLexicographicDistributions) {
  const auto g = simplex_grid(2, 7);
  ASSERT_EQ(g.size(), 8u);
  EXPECT_EQ(g.front(), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(g.back(), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(simplex_grid(3, 4).size(), 15u);
  for (const auto& w : simplex_grid(3, 4)) EXPECT_NEAR(w[0] + w[1] + w[2], 1.0, 1e-15);
}

TEST(Generators, MixtureFamilyContainsBasisKernels) {
  const auto fam = linear_mixture_family(3, 2, 2, 7, 5);
  ASSERT_EQ(fam.candidates.size(), 8u);
  for (std::size_t i = 0; i < fam.basis[0].data().size(); ++i) {
    EXPECT_NEAR(fam.candidates.back().data()[i], fam.basis[0].data()[i], 1e-15);
    EXPECT_NEAR(fam.candidates.front().data()[i], fam.basis[1].data()[i], 1e-15);
  }
}

TEST(SampleCategorical, InverseCdf) {
  const std::vector<double> p{0.2, 0.0, 0.8};
  EXPECT_EQ(sample_categorical(p, 0.0), 0u);
  EXPECT_EQ(sample_categorical(p, 0.2), 2u);
  EXPECT_EQ(sample_categorical(p, 0.999999), 2u);
}
