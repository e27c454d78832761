#include "upac/eluder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace upac {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// [lo, hi) or (lo, hi).
struct Interval {
  double lo;
  double hi;
  bool lo_open;
};

bool nonempty(const Interval& a) { return a.lo < a.hi; }

// Sorted, disjoint intervals.
using IntervalSet = std::vector<Interval>;

bool starts_before(const Interval& a, const Interval& b) {
  if (a.lo != b.lo) return a.lo < b.lo;
  return !a.lo_open && b.lo_open;
}

IntervalSet normalize(IntervalSet v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](const Interval& i) { return !nonempty(i); }),
          v.end());
  std::sort(v.begin(), v.end(), starts_before);
  IntervalSet out;
  for (const Interval& i : v) {
    // Touching [a,b) and [b,c) merge; [a,b) and (b,c) leave b out.
    if (!out.empty() && (i.lo < out.back().hi || (i.lo == out.back().hi && !i.lo_open))) {
      out.back().hi = std::max(out.back().hi, i.hi);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet out;
  for (const Interval& x : a) {
    for (const Interval& y : b) {
      Interval z;
      if (x.lo > y.lo) {
        z.lo = x.lo;
        z.lo_open = x.lo_open;
      } else if (y.lo > x.lo) {
        z.lo = y.lo;
        z.lo_open = y.lo_open;
      } else {
        z.lo = x.lo;
        z.lo_open = x.lo_open || y.lo_open;
      }
      z.hi = std::min(x.hi, y.hi);
      if (nonempty(z)) out.push_back(z);
    }
  }
  return normalize(std::move(out));
}

// a subset of b, both normalized.
bool covered_by(const IntervalSet& a, const IntervalSet& b) {
  for (const Interval& x : a) {
    bool inside = false;
    for (const Interval& y : b) {
      const bool lo_ok = y.lo < x.lo || (y.lo == x.lo && (!y.lo_open || x.lo_open));
      if (lo_ok && x.hi <= y.hi) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

double interior_point(const IntervalSet& set) {
  const Interval& i = set.front();
  if (std::isinf(i.hi)) return i.lo * (1.0 + kEpsilonSlack);
  return i.lo + 0.5 * (i.hi - i.lo);
}

struct PairTable {
  std::vector<std::pair<HypothesisId, HypothesisId>> pairs;
  // diff[u * P + p] = |f_i - f_j| at universe position u.
  std::vector<double> diff;
};

PairTable pair_table(const FunctionClass& cls, std::span<const InputId> universe) {
  PairTable t;
  const std::size_t n = cls.num_hypotheses();
  for (HypothesisId i = 0; i < n; ++i) {
    for (HypothesisId j = i + 1; j < n; ++j) {
      bool differs = false;
      for (InputId x : universe)
        if (cls.evaluate(i, x) != cls.evaluate(j, x)) differs = true;
      if (differs) t.pairs.emplace_back(i, j);
    }
  }
  const std::size_t P = t.pairs.size();
  t.diff.resize(universe.size() * P);
  for (std::size_t u = 0; u < universe.size(); ++u)
    for (std::size_t p = 0; p < P; ++p)
      t.diff[u * P + p] =
          std::abs(cls.evaluate(t.pairs[p].first, universe[u]) -
                   cls.evaluate(t.pairs[p].second, universe[u]));
  return t;
}

struct Search {
  const PairTable& table;
  std::size_t universe_size;
  double eps;
  std::unordered_map<std::uint32_t, IntervalSet> explored;
  std::vector<std::size_t> chain;
  std::vector<std::size_t> best_chain;
  IntervalSet best_feasible;

  // eps' values at which position u is independent given the pair sums.
  IntervalSet feasible_for(std::size_t u, const std::vector<double>& sums) const {
    const std::size_t P = table.pairs.size();
    IntervalSet g;
    for (std::size_t p = 0; p < P; ++p) {
      const double d = table.diff[u * P + p];
      if (d <= eps) continue;
      const double lo = std::sqrt(sums[p]);
      if (lo > eps) {
        g.push_back({lo, d, false});
      } else {
        g.push_back({eps, d, true});
      }
    }
    return normalize(std::move(g));
  }

  void dfs(std::uint32_t mask, const std::vector<double>& sums, const IntervalSet& feasible) {
    if (chain.size() > best_chain.size()) {
      best_chain = chain;
      best_feasible = feasible;
    }
    std::vector<std::pair<std::size_t, IntervalSet>> options;
    for (std::size_t u = 0; u < universe_size; ++u) {
      if (mask & (1u << u)) continue;
      IntervalSet next = intersect(feasible, feasible_for(u, sums));
      if (!next.empty()) options.emplace_back(u, std::move(next));
    }
    if (chain.size() + options.size() <= best_chain.size()) return;

    auto& seen = explored[mask];
    if (!seen.empty() && covered_by(feasible, seen)) return;
    IntervalSet merged = seen;
    merged.insert(merged.end(), feasible.begin(), feasible.end());
    seen = normalize(std::move(merged));

    const std::size_t P = table.pairs.size();
    for (auto& [u, next] : options) {
      std::vector<double> grown = sums;
      for (std::size_t p = 0; p < P; ++p) {
        const double d = table.diff[u * P + p];
        grown[p] += d * d;
      }
      chain.push_back(u);
      dfs(mask | (1u << u), grown, next);
      chain.pop_back();
      if (best_chain.size() == universe_size) return;
    }
  }
};

EluderCertificate certify(const FunctionClass& cls, std::vector<InputId> sequence, double eps,
                          double eps_used) {
  EluderCertificate cert;
  cert.epsilon = eps;
  cert.epsilon_used = eps_used;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const Independence ind =
        is_independent(cls, sequence[i], std::span(sequence).first(i), eps_used);
    if (!ind.independent) throw std::logic_error("eluder: sequence failed its own replay");
    cert.witnesses.push_back(ind.witness);
  }
  cert.sequence = std::move(sequence);
  return cert;
}

}  // namespace

Independence is_independent(const FunctionClass& cls, InputId x,
                            std::span<const InputId> predecessors, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("is_independent: eps must be positive");
  const std::size_t n = cls.num_hypotheses();
  const auto at_x = cls.column(x);
  std::vector<std::span<const double>> pred;
  for (InputId p : predecessors) pred.push_back(cls.column(p));
  const double eps2 = eps * eps;
  for (HypothesisId i = 0; i < n; ++i) {
    for (HypothesisId j = 0; j < n; ++j) {
      if (!(at_x[i] - at_x[j] > eps)) continue;
      double sum = 0.0;
      for (const auto& c : pred) {
        const double d = c[i] - c[j];
        sum += d * d;
        if (sum > eps2) break;
      }
      if (sum <= eps2) return {true, {i, j}};
    }
  }
  return {};
}

bool verify_certificate(const FunctionClass& cls, const EluderCertificate& certificate) {
  const auto& seq = certificate.sequence;
  const double e = certificate.epsilon_used;
  if (!(e > certificate.epsilon)) return false;
  if (certificate.witnesses.size() != seq.size()) return false;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!is_independent(cls, seq[i], std::span(seq).first(i), e).independent) return false;
    const auto [f1, f2] = certificate.witnesses[i];
    if (f1 >= cls.num_hypotheses() || f2 >= cls.num_hypotheses()) return false;
    double sum = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      const double d = cls.evaluate(f1, seq[j]) - cls.evaluate(f2, seq[j]);
      sum += d * d;
    }
    if (!(sum <= e * e) || !(cls.evaluate(f1, seq[i]) - cls.evaluate(f2, seq[i]) > e))
      return false;
  }
  return true;
}

EluderResult eluder_dimension_exact(const FunctionClass& cls, std::span<const InputId> universe,
                                    double eps, std::size_t cap) {
  if (!(eps > 0.0)) throw std::invalid_argument("eluder_dimension_exact: eps must be positive");
  if (universe.size() > cap || universe.size() > 31)
    throw std::invalid_argument("eluder_dimension_exact: universe exceeds the exact-search cap");
  const PairTable table = pair_table(cls, universe);
  Search search{table, universe.size(), eps, {}, {}, {}, {}};
  const IntervalSet start{{eps, kInf, true}};
  search.best_feasible = start;
  search.dfs(0, std::vector<double>(table.pairs.size(), 0.0), start);

  std::vector<InputId> sequence;
  for (std::size_t u : search.best_chain) sequence.push_back(universe[u]);
  const double eps_used =
      sequence.empty() ? eps * (1.0 + kEpsilonSlack) : interior_point(search.best_feasible);
  EluderResult result;
  result.dimension = sequence.size();
  result.certificate = certify(cls, std::move(sequence), eps, eps_used);
  return result;
}

EluderResult eluder_dimension_greedy(const FunctionClass& cls, std::span<const InputId> universe,
                                     double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eluder_dimension_greedy: eps must be positive");
  const double eps_used = eps * (1.0 + kEpsilonSlack);
  // Independence only weakens as predecessors are added, so a rejected
  // element can never be accepted later and one pass suffices.
  EluderResult result;
  result.certificate.epsilon = eps;
  result.certificate.epsilon_used = eps_used;
  for (InputId x : universe) {
    const Independence ind = is_independent(cls, x, result.certificate.sequence, eps_used);
    if (!ind.independent) continue;
    result.certificate.sequence.push_back(x);
    result.certificate.witnesses.push_back(ind.witness);
  }
  result.dimension = result.certificate.sequence.size();
  return result;
}

bool prop3_audit(std::span<const WidthRecord> run_widths, double eps, double d_e) {
  if (!(eps > 0.0)) throw std::invalid_argument("prop3_audit: eps must be positive");
  for (std::size_t t = 1; t < run_widths.size(); ++t)
    if (run_widths[t].beta < run_widths[t - 1].beta)
      throw std::invalid_argument("prop3_audit: radius sequence is not nondecreasing");
  if (run_widths.empty()) return true;
  std::size_t count = 0;
  for (const WidthRecord& r : run_widths)
    if (r.width > eps) ++count;
  const double beta_T = run_widths.back().beta;
  return static_cast<double>(count) <= (beta_T / (eps * eps) + 1.0) * d_e;
}

}  // namespace upac
