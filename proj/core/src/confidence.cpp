#include "upac/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace upac {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(4 t^2 2^l / delta) evaluated in log space so large l cannot overflow.
double log_union_term(std::size_t t, int level, double delta) {
  return std::log(4.0) + 2.0 * std::log(static_cast<double>(t)) +
         static_cast<double>(level) * std::log(2.0) - std::log(delta);
}

void check_radius_args(int level, double alpha, double delta, double log_covering) {
  if (level < 1) throw std::invalid_argument("beta: level must be >= 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("beta: alpha must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("beta: delta must be in (0,1)");
  if (!(log_covering >= 0.0)) throw std::invalid_argument("beta: logN must be nonnegative");
}

}  // namespace

double cardinality_rhs(double u, int level, double d_k, double d_e, double delta,
                       double horizon) {
  const double prefactor =
      64.0 * horizon * horizon * d_k * d_e * std::ldexp(1.0, 2 * level);
  return prefactor * std::log(u / delta);
}

double solve_U(int level, double d_k, double d_e, double delta, double horizon) {
  if (level < 1) throw std::invalid_argument("solve_U: level must be >= 1");
  if (!(d_k > 0.0) || !(d_e > 0.0) || !(horizon >= 1.0))
    throw std::invalid_argument("solve_U: d_K, d_E must be positive and H >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("solve_U: delta must be in (0,1)");

  const double prefactor =
      64.0 * horizon * horizon * d_k * d_e * std::ldexp(1.0, 2 * level);
  if (!std::isfinite(prefactor) || !std::isfinite(10.0 * prefactor)) return kInf;

  // x <- A log(x / delta) contracts on x > A (slope A/x < 1); the larger root
  // lies above A because log(U/delta) > 1 there.
  double u = 10.0 * prefactor;
  for (int iter = 0; iter < 10000; ++iter) {
    const double next = prefactor * std::log(u / delta);
    if (std::abs(next - u) <= 1e-13 * next) return next;
    u = next;
  }
  throw std::runtime_error("solve_U: fixed-point iteration did not converge");
}

double beta_bandit(std::size_t t, int level, double alpha, double delta, double log_covering,
                   double c_beta) {
  check_radius_args(level, alpha, delta, log_covering);
  double value = 8.0 * log_covering + 8.0 * std::log(1.0 / delta);
  if (t > 0) {
    const double td = static_cast<double>(t);
    value += 2.0 * alpha * td * (8.0 + std::sqrt(8.0 * log_union_term(t, level, delta)));
  }
  return c_beta * value;
}

double beta_mdp(std::size_t t, int level, double alpha, double delta, double log_covering,
                double horizon, double c_beta) {
  check_radius_args(level, alpha, delta, log_covering);
  const double h2 = horizon * horizon;
  double value = 2.0 * h2 * log_covering + 2.0 * h2 * std::log(1.0 / delta);
  if (t > 0) {
    const double td = static_cast<double>(t);
    value += 2.0 * alpha * td *
             (8.0 * horizon + std::sqrt(2.0 * h2 * log_union_term(t, level, delta)));
  }
  return c_beta * value;
}

// -- RadiusSchedule ------------------------------------------------------------

RadiusSchedule RadiusSchedule::bandit(double d_k, std::vector<double> d_e, double delta,
                                      double c_beta, LogCovering log_covering) {
  RadiusSchedule s = mdp(d_k, std::move(d_e), delta, 1.0, c_beta, std::move(log_covering));
  s.form_ = RadiusForm::bandit;
  return s;
}

RadiusSchedule RadiusSchedule::mdp(double d_k, std::vector<double> d_e, double delta,
                                   double horizon, double c_beta, LogCovering log_covering) {
  if (d_e.empty()) throw std::invalid_argument("RadiusSchedule: d_E list is empty");
  for (double v : d_e)
    if (!(v > 0.0)) throw std::invalid_argument("RadiusSchedule: d_E entries must be positive");
  if (!(d_k > 0.0)) throw std::invalid_argument("RadiusSchedule: d_K must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("RadiusSchedule: delta must be in (0,1)");
  if (!(c_beta > 0.0)) throw std::invalid_argument("RadiusSchedule: c_beta must be positive");
  if (!(horizon >= 1.0)) throw std::invalid_argument("RadiusSchedule: horizon must be >= 1");
  if (!log_covering) throw std::invalid_argument("RadiusSchedule: missing covering bound");
  RadiusSchedule s;
  s.form_ = RadiusForm::mdp;
  s.d_k_ = d_k;
  s.d_e_ = std::move(d_e);
  s.delta_ = delta;
  s.horizon_ = horizon;
  s.c_beta_ = c_beta;
  s.log_covering_ = std::move(log_covering);
  return s;
}

RadiusSchedule RadiusSchedule::constant(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("RadiusSchedule: constant beta must be >= 0");
  RadiusSchedule s;
  s.form_ = RadiusForm::constant;
  s.constant_beta_ = beta;
  s.c_beta_ = 0.0;
  return s;
}

double RadiusSchedule::d_e(int level) const {
  if (level < 1) throw std::invalid_argument("d_e: level must be >= 1");
  const auto i = std::min(static_cast<std::size_t>(level - 1), d_e_.size() - 1);
  return d_e_[i];
}

double RadiusSchedule::U(int level) const {
  if (level < 1) throw std::invalid_argument("U: level must be >= 1");
  if (form_ == RadiusForm::constant) return kInf;
  const auto i = static_cast<std::size_t>(level - 1);
  while (u_cache_.size() <= i) {
    const int l = static_cast<int>(u_cache_.size()) + 1;
    u_cache_.push_back(solve_U(l, d_k_, d_e(l), delta_, horizon_));
  }
  return u_cache_[i];
}

double RadiusSchedule::alpha(int level) const { return 1.0 / U(level); }

double RadiusSchedule::log_covering(int level) const {
  if (form_ == RadiusForm::constant) return 0.0;
  const double a = alpha(level);
  // alpha underflows to 0 only when U is infinite; the exact cover is then the
  // only finite choice the caller can give, so ask at the smallest normal.
  return log_covering_(a > 0.0 ? a : std::numeric_limits<double>::min());
}

double RadiusSchedule::beta(int level, std::size_t t) const {
  switch (form_) {
    case RadiusForm::constant:
      return constant_beta_;
    case RadiusForm::bandit:
      return beta_bandit(t, level, alpha(level), delta_, log_covering(level), c_beta_);
    case RadiusForm::mdp:
      return beta_mdp(t, level, alpha(level), delta_, log_covering(level), horizon_, c_beta_);
  }
  return kInf;
}

// -- LevelSet ------------------------------------------------------------------

LevelSet::LevelSet(int level, std::size_t num_hypotheses, double initial_radius)
    : level_(level),
      radius_(initial_radius),
      fit_loss_(num_hypotheses, 0.0),
      loss_to_center_(num_hypotheses, 0.0),
      members_(num_hypotheses, 1) {}

std::vector<HypothesisId> LevelSet::members() const {
  std::vector<HypothesisId> out;
  for (HypothesisId h = 0; h < members_.size(); ++h)
    if (members_[h]) out.push_back(h);
  return out;
}

double LevelSet::width(std::span<const double> column) const {
  double hi = -kInf, lo = kInf;
  for (std::size_t h = 0; h < members_.size(); ++h) {
    if (!members_[h]) continue;
    hi = std::max(hi, column[h]);
    lo = std::min(lo, column[h]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

double LevelSet::upper(std::span<const double> column) const {
  double hi = -kInf;
  for (std::size_t h = 0; h < members_.size(); ++h)
    if (members_[h]) hi = std::max(hi, column[h]);
  return hi;
}

void LevelSet::insert(std::size_t index, std::size_t key, std::span<const double> column,
                      double target, double new_radius) {
  const std::size_t n = fit_loss_.size();
  if (column.size() != n) throw std::invalid_argument("LevelSet: column size mismatch");

  indices_.push_back(index);
  keys_.push_back(key);
  targets_.push_back(target);

  auto [it, fresh] = point_of_key_.try_emplace(key, points_.size());
  if (fresh) points_.push_back(Point{std::vector<double>(column.begin(), column.end()), 0.0});
  Point& point = points_[it->second];
  point.count += 1.0;

  // Running sums in insertion order.
  for (std::size_t h = 0; h < n; ++h) {
    const double d = column[h] - target;
    fit_loss_[h] += d * d;
  }

  HypothesisId center = 0;
  for (std::size_t h = 1; h < n; ++h)
    if (fit_loss_[h] < fit_loss_[center]) center = h;

  if (center == center_) {
    const double vc = column[center];
    for (std::size_t h = 0; h < n; ++h) {
      const double d = column[h] - vc;
      loss_to_center_[h] += d * d;
    }
  } else {
    center_ = center;
    std::fill(loss_to_center_.begin(), loss_to_center_.end(), 0.0);
    for (const auto& p : points_) {
      const double vc = p.column[center];
      for (std::size_t h = 0; h < n; ++h) {
        const double d = p.column[h] - vc;
        loss_to_center_[h] += p.count * d * d;
      }
    }
  }

  radius_ = new_radius;
  for (std::size_t h = 0; h < n; ++h) members_[h] = loss_to_center_[h] <= radius_ ? 1 : 0;
}

// -- LevelPartition ------------------------------------------------------------

LevelPartition::LevelPartition(std::size_t num_hypotheses, RadiusSchedule schedule)
    : num_hypotheses_(num_hypotheses),
      schedule_(std::move(schedule)),
      empty_(0, num_hypotheses, schedule_.beta(1, 0)) {
  if (num_hypotheses == 0) throw std::invalid_argument("LevelPartition: empty hypothesis family");
}

const LevelSet& LevelPartition::level(int l) const {
  if (l < 1) throw std::invalid_argument("level index must be >= 1");
  if (l > num_levels()) return empty_;
  return levels_[static_cast<std::size_t>(l - 1)];
}

LevelSet& LevelPartition::ensure_level(int l) {
  while (num_levels() < l) {
    const int next = num_levels() + 1;
    levels_.emplace_back(next, num_hypotheses_, schedule_.beta(next, 0));
  }
  return levels_[static_cast<std::size_t>(l - 1)];
}

void LevelPartition::insert(int l, std::size_t index, std::size_t key,
                            std::span<const double> column, double target) {
  if (l < 1) throw std::invalid_argument("insert: level must be >= 1");
  if (!std::isfinite(target)) throw std::invalid_argument("insert: target must be finite");
  if (!level_of_.try_emplace(index, l).second)
    throw std::invalid_argument("insert: observation " + std::to_string(index) + " already placed");

  LevelSet& set = ensure_level(l);
  set.insert(index, key, column, target, schedule_.beta(l, set.size() + 1));
  ++observations_;
  total_level_ = std::max(total_level_, l);

  if (schedule_.form() != RadiusForm::constant &&
      static_cast<double>(set.size()) >= schedule_.U(l)) {
    if (schedule_.c_beta() >= 1.0)
      throw InvariantViolation("level " + std::to_string(l) + " reached its cardinality cap");
    ++cardinality_violations_;
  }
}

double LevelPartition::width(int l, std::span<const double> column) const {
  if (column.size() != num_hypotheses_) throw std::invalid_argument("width: column size mismatch");
  return level(l).width(column);
}

std::vector<std::uint8_t> LevelPartition::intersection() const {
  std::vector<std::uint8_t> mask(num_hypotheses_, 1);
  const int top = std::min(total_level_, num_levels());
  for (int l = 1; l <= top; ++l) {
    const auto m = levels_[static_cast<std::size_t>(l - 1)].member_mask();
    for (std::size_t h = 0; h < num_hypotheses_; ++h) mask[h] &= m[h];
  }
  return mask;
}

int LevelPartition::level_of(std::size_t index) const {
  const auto it = level_of_.find(index);
  return it == level_of_.end() ? 0 : it->second;
}

std::vector<std::size_t> LevelPartition::occupancy() const {
  std::vector<std::size_t> out;
  out.reserve(levels_.size());
  for (const auto& set : levels_) out.push_back(set.size());
  return out;
}

int assign_level(std::span<const double> widths, int total_level, double threshold_base) {
  if (static_cast<int>(widths.size()) < total_level)
    throw std::invalid_argument("assign_level: need a width for every level 1..S");
  return assign_level([&](int l) { return widths[static_cast<std::size_t>(l - 1)]; }, total_level,
                      threshold_base);
}

std::vector<HypothesisId> confidence_members(const LevelPartition& partition, int l) {
  return partition.level(l).members();
}

double width(const LevelPartition& partition, const FunctionClass& cls, int l, InputId x) {
  if (cls.num_hypotheses() != partition.num_hypotheses())
    throw std::invalid_argument("width: class does not match partition");
  return partition.width(l, cls.column(x));
}

}  // namespace upac
