#pragma once

// Multi-level confidence sets.
//
// Observations are partitioned into disjoint level sets C^1, C^2, ...; each
// level keeps its own least-squares center and radius beta^l_t, and the
// confidence set of a level is every hypothesis whose squared deviation from
// the center on that level's inputs is within the radius. Hypotheses are
// dense indices into a finite family; each observation carries the column of
// all hypothesis predictions at its input, so the same machinery serves the
// bandit (inputs are actions) and the value-targeted MDP (inputs are
// state/action/value triplets).

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "upac/hypothesis.hpp"

namespace upac {

/// Thrown when a lemma-backed runtime invariant fails.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Right-hand side 64 H^2 d_K d_E 4^l log(U / delta).
double cardinality_rhs(double u, int level, double d_k, double d_e, double delta,
                       double horizon = 1.0);

/// Larger root of U = 64 H^2 d_K d_E 4^l log(U / delta) (natural log).
/// Returns +inf when the prefactor overflows a double (l beyond ~500).
/// Throws std::invalid_argument on bad arguments, std::runtime_error if the
/// iteration fails to settle within 10^4 steps.
double solve_U(int level, double d_k, double d_e, double delta, double horizon = 1.0);

/// c * [ 8 logN + 8 log(1/delta) + 2 alpha t (8 + sqrt(8 log(4 t^2 2^l / delta))) ];
/// the alpha t term is 0 at t = 0.
double beta_bandit(std::size_t t, int level, double alpha, double delta, double log_covering,
                   double c_beta = 1.0);

/// c * [ 2H^2 logN + 2H^2 log(1/delta) + 2 alpha t (8H + sqrt(2H^2 log(4 t^2 2^l / delta))) ].
double beta_mdp(std::size_t t, int level, double alpha, double delta, double log_covering,
                double horizon, double c_beta = 1.0);

enum class RadiusForm { bandit, mdp, constant };

/// Per-level radii beta^l_t and cardinality caps U_l, with alpha_l = 1 / U_l.
class RadiusSchedule {
 public:
  using LogCovering = std::function<double(double alpha)>;

  /// d_e[l-1] is the eluder input for level l; the last entry repeats.
  static RadiusSchedule bandit(double d_k, std::vector<double> d_e, double delta, double c_beta,
                               LogCovering log_covering);
  static RadiusSchedule mdp(double d_k, std::vector<double> d_e, double delta, double horizon,
                            double c_beta, LogCovering log_covering);
  /// Same radius for every level and count; caps are infinite. Test fixture.
  static RadiusSchedule constant(double beta);

  RadiusForm form() const noexcept { return form_; }
  double delta() const noexcept { return delta_; }
  double horizon() const noexcept { return horizon_; }
  double c_beta() const noexcept { return c_beta_; }
  double d_k() const noexcept { return d_k_; }
  double d_e(int level) const;

  double U(int level) const;
  double alpha(int level) const;
  double log_covering(int level) const;
  double beta(int level, std::size_t t) const;

 private:
  RadiusSchedule() = default;

  RadiusForm form_ = RadiusForm::constant;
  double d_k_ = 1.0;
  std::vector<double> d_e_{1.0};
  double delta_ = 0.1;
  double horizon_ = 1.0;
  double c_beta_ = 1.0;
  double constant_beta_ = 0.0;
  LogCovering log_covering_;
  mutable std::vector<double> u_cache_;
};

/// One level of the partition. Read-only outside LevelPartition.
class LevelSet {
 public:
  LevelSet(int level, std::size_t num_hypotheses, double initial_radius);

  int level() const noexcept { return level_; }
  /// t = |C^l|.
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  /// Observation indices (round k, or a flattened (k, h)) in insertion order.
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::span<const double> targets() const noexcept { return targets_; }
  std::span<const std::size_t> keys() const noexcept { return keys_; }

  HypothesisId center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  bool contains(HypothesisId h) const { return members_.at(h) != 0; }
  std::span<const std::uint8_t> member_mask() const noexcept { return members_; }
  std::vector<HypothesisId> members() const;

  /// L_{C^l}(h, center).
  double loss_to_center(HypothesisId h) const { return loss_to_center_.at(h); }
  /// Sum over the level's data of (h(x_k) - R_k)^2.
  double fit_loss(HypothesisId h) const { return fit_loss_.at(h); }

  /// sup - inf over members of the given prediction column.
  double width(std::span<const double> column) const;
  /// max over members of the given prediction column.
  double upper(std::span<const double> column) const;

 private:
  friend class LevelPartition;

  struct Point {
    std::vector<double> column;
    double count = 0.0;
  };

  void insert(std::size_t index, std::size_t key, std::span<const double> column, double target,
              double new_radius);

  int level_;
  std::vector<std::size_t> indices_;
  std::vector<std::size_t> keys_;
  std::vector<double> targets_;
  std::vector<Point> points_;
  std::unordered_map<std::size_t, std::size_t> point_of_key_;

  HypothesisId center_ = 0;
  double radius_;
  std::vector<double> fit_loss_;
  std::vector<double> loss_to_center_;
  std::vector<std::uint8_t> members_;
};

class LevelPartition {
 public:
  LevelPartition(std::size_t num_hypotheses, RadiusSchedule schedule);

  std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
  const RadiusSchedule& schedule() const noexcept { return schedule_; }

  /// S = max nonempty level, or 1 when every level is empty.
  int total_level() const noexcept { return total_level_; }
  /// Number of level objects materialized so far (>= total_level()).
  int num_levels() const noexcept { return static_cast<int>(levels_.size()); }
  std::size_t observations() const noexcept { return observations_; }

  /// Level l; levels never touched read as empty.
  const LevelSet& level(int l) const;

  /// Adds observation `index` with lookup `key` (equal keys share an input)
  /// to C^l, refits the level and recomputes S. When the radius form is
  /// bandit/mdp with c_beta >= 1, a |C^l| >= U_l violation throws
  /// InvariantViolation.
  void insert(int l, std::size_t index, std::size_t key, std::span<const double> column,
              double target);

  /// w_{F^l} at an input described by its prediction column.
  double width(int l, std::span<const double> column) const;

  /// Membership in the intersection of F^l over l in [S].
  std::vector<std::uint8_t> intersection() const;

  /// Level holding the observation, or 0 if absent.
  int level_of(std::size_t index) const;

  /// Insertions that left some |C^l| >= U_l (only counted when not thrown).
  std::size_t cardinality_violations() const noexcept { return cardinality_violations_; }
  std::vector<std::size_t> occupancy() const;

 private:
  LevelSet& ensure_level(int l);

  std::size_t num_hypotheses_;
  RadiusSchedule schedule_;
  std::vector<LevelSet> levels_;
  LevelSet empty_;
  int total_level_ = 1;
  std::size_t observations_ = 0;
  std::size_t cardinality_violations_ = 0;
  std::unordered_map<std::size_t, int> level_of_;
};

/// Lines "set l = 1; while w(l) <= base 2^{-l} and l <= S: l += 1".
/// width_at(l) is only called for l <= S.
template <class WidthAt>
  requires std::invocable<WidthAt&, int>
int assign_level(WidthAt&& width_at, int total_level, double threshold_base) {
  int l = 1;
  while (l <= total_level && width_at(l) <= threshold_base * std::ldexp(1.0, -l)) ++l;
  return l;
}

/// widths[l-1] holds the width at level l for l = 1..S.
int assign_level(std::span<const double> widths, int total_level, double threshold_base);

/// Member list of F^l; the whole class when the level is empty.
std::vector<HypothesisId> confidence_members(const LevelPartition& partition, int l);

/// Width of F^l at input x of a tabular class.
double width(const LevelPartition& partition, const FunctionClass& cls, int l, InputId x);

}  // namespace upac
