#pragma once

// epsilon-dependence and eluder dimension for finite classes over finite
// input universes.

#include <cstddef>
#include <span>
#include <vector>

#include "upac/hypothesis.hpp"

namespace upac {

/// Relative offset for the "some eps' > eps" quantifier where a single
/// fixed eps' is needed (greedy search).
inline constexpr double kEpsilonSlack = 1e-9;

struct WitnessPair {
  HypothesisId first = 0;
  HypothesisId second = 0;
};

struct Independence {
  bool independent = false;
  WitnessPair witness;  // meaningful only when independent
};

/// True iff some pair has sum over predecessors of (f1 - f2)^2 <= eps^2 and
/// f1(x) - f2(x) > eps. The first such pair in (f1, f2) order is the witness.
Independence is_independent(const FunctionClass& cls, InputId x,
                            std::span<const InputId> predecessors, double eps);

struct EluderCertificate {
  std::vector<InputId> sequence;
  double epsilon = 0.0;
  /// A single eps' > eps at which every element is independent of its
  /// predecessors.
  double epsilon_used = 0.0;
  std::vector<WitnessPair> witnesses;
};

struct EluderResult {
  std::size_t dimension = 0;
  EluderCertificate certificate;
};

/// Replays is_independent at certificate.epsilon_used along the sequence and
/// checks every recorded witness.
bool verify_certificate(const FunctionClass& cls, const EluderCertificate& certificate);

inline constexpr std::size_t kDefaultExactCap = 10;

/// Longest sequence over the universe whose elements are all eps'-independent
/// of their predecessors for one common eps' > eps. Throws
/// std::invalid_argument when eps <= 0 or the universe exceeds `cap`.
EluderResult eluder_dimension_exact(const FunctionClass& cls, std::span<const InputId> universe,
                                    double eps, std::size_t cap = kDefaultExactCap);

/// One pass-until-stable greedy sequence at eps' = eps (1 + kEpsilonSlack).
/// A lower bound on the exact dimension.
EluderResult eluder_dimension_greedy(const FunctionClass& cls, std::span<const InputId> universe,
                                     double eps);

struct WidthRecord {
  double width = 0.0;
  double beta = 0.0;
};

/// #{t : w_t > eps} <= (beta_T / eps^2 + 1) * d_e, with beta_T the last
/// recorded radius. Throws std::invalid_argument on a decreasing radius
/// sequence or eps <= 0.
bool prop3_audit(std::span<const WidthRecord> run_widths, double eps, double d_e);

}  // namespace upac
