// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "upac/confidence.hpp"
#include "upac/eluder.hpp"
#include "upac/harness.hpp"

using namespace upac;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream o;
  o.precision(precision);
  o << v;
  return o.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), first);
  return s;
}

ExperimentConfig small_bandit(double delta, std::size_t seeds) {
  ExperimentConfig c;
  c.algorithm = Algorithm::upac_oful;
  c.bandit.type = BanditInstance::Type::random_finite;
  c.bandit.hypotheses = 16;
  c.bandit.inputs = 8;
  c.K = 2000;
  c.agent.delta = delta;
  c.agent.c_beta = 1.0;
  c.seeds = seed_range(1, seeds);
  return c;
}

ExperimentConfig small_mdp(double delta, std::size_t seeds) {
  ExperimentConfig c;
  c.algorithm = Algorithm::upac_vtr;
  c.mdp.states = 3;
  c.mdp.actions = 2;
  c.mdp.basis = 2;
  c.mdp.resolution = 7;  // 8 candidate kernels
  c.mdp.horizon = 4;
  c.K = 500;
  c.agent.delta = delta;
  c.agent.c_beta = 1.0;
  c.seeds = seed_range(1, seeds);
  return c;
}

// Runs every seed separately so that an invariant exception marks only its run.
struct BanditBatch {
  std::vector<BanditRunLog> logs;
  std::size_t aborted = 0;
};
struct MdpBatch {
  std::vector<MdpRunLog> logs;
  std::size_t aborted = 0;
};

BanditBatch run_bandits(const ExperimentConfig& c) {
  BanditBatch b;
  for (auto s : c.seeds) {
    try {
      b.logs.push_back(run_bandit_seed(c, s));
    } catch (const InvariantViolation&) {
      ++b.aborted;
    }
  }
  return b;
}

MdpBatch run_mdps(const ExperimentConfig& c) {
  MdpBatch b;
  for (auto s : c.seeds) {
    try {
      b.logs.push_back(run_mdp_seed(c, s));
    } catch (const InvariantViolation&) {
      ++b.aborted;
    }
  }
  return b;
}

// Levels whose final occupancy reached U_l; occupancy only grows, so the final
// value bounds every earlier step.
std::size_t cap_breaches(const PartitionSummary& p) {
  std::size_t n = p.cardinality_violations;
  for (std::size_t l = 0; l < p.occupancy.size(); ++l)
    if (!(static_cast<double>(p.occupancy[l]) < p.caps[l])) ++n;
  return n;
}

// Shared runs for criteria 1, 3 and 7.
struct SmallRuns {
  BanditBatch bandit;
  MdpBatch mdp;
  double seconds = 0.0;
};

SmallRuns& small_runs() {
  static SmallRuns runs = [] {
    SmallRuns r;
    const auto t0 = Clock::now();
    r.bandit = run_bandits(small_bandit(0.1, 100));
    r.mdp = run_mdps(small_mdp(0.1, 50));
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

Outcome level_cardinality() {
  const auto& r = small_runs();
  std::size_t breaches = r.bandit.aborted + r.mdp.aborted;
  double worst = 0.0;
  auto scan = [&](const PartitionSummary& p) {
    breaches += cap_breaches(p);
    for (std::size_t l = 0; l < p.occupancy.size(); ++l)
      worst = std::max(worst, static_cast<double>(p.occupancy[l]) / p.caps[l]);
  };
  for (const auto& log : r.bandit.logs) scan(log.partition);
  for (const auto& log : r.mdp.logs) scan(log.partition);
  const bool fast = r.seconds < 120.0;
  return {breaches == 0 && fast,
          "violations=" + std::to_string(breaches) + " over 100 bandit + 50 MDP runs, max |C^l|/U_l=" +
              fmt(worst) + ", runtime=" + fmt(r.seconds, 3) + "s (limit 120s)"};
}

Outcome coverage() {
  const auto bandit = run_bandits(small_bandit(0.2, 100));
  const auto mdp = run_mdps(small_mdp(0.2, 100));
  std::size_t bandit_ok = 0, mdp_ok = 0;
  for (const auto& log : bandit.logs) bandit_ok += coverage_failures(log) == 0;
  for (const auto& log : mdp.logs) mdp_ok += coverage_failures(log) == 0;
  const double fb = static_cast<double>(bandit_ok) / 100.0;
  const double fm = static_cast<double>(mdp_ok) / 100.0;
  return {fb >= 0.6 && fm >= 0.6 && bandit.aborted == 0 && mdp.aborted == 0,
          "delta=0.2: covered-at-all-times fraction bandit=" + fmt(fb) + ", MDP=" + fmt(fm) +
              " (need >= 0.6)"};
}

Outcome optimism() {
  const auto& r = small_runs();
  std::size_t checked = 0, violations = 0;
  for (const auto& log : r.bandit.logs)
    for (const auto& round : log.rounds)
      if (round.covered) {
        ++checked;
        violations += !(round.ucb >= round.best_value);
      }
  std::size_t episodes = 0;
  for (const auto& log : r.mdp.logs)
    for (const auto& e : log.episodes)
      if (e.covered) {
        ++episodes;
        violations += !(e.optimistic_value >= e.true_optimal_value);
      }
  return {violations == 0 && checked > 0 && episodes > 0,
          "violations=" + std::to_string(violations) + " over " + std::to_string(checked) +
              " covered rounds and " + std::to_string(episodes) + " covered episodes (zero tolerance)"};
}

// Linear d = 2 instance shared by criteria 4 and 5.
struct LinearRuns {
  std::vector<BanditRunLog> logs;
  double seconds = 0.0;
  double c_beta = 1.0;
};

LinearRuns& linear_runs() {
  static LinearRuns runs = [] {
    LinearRuns r;
    ExperimentConfig c;
    c.algorithm = Algorithm::upac_oful;
    c.bandit.type = BanditInstance::Type::linear_sphere;
    c.bandit.dim = 2;
    c.bandit.actions = 8;
    c.bandit.grid = 11;
    c.bandit.theta = {0.8, 0.3};
    c.bandit.noise_sd = 1.0;
    c.K = 100000;
    c.agent.delta = 0.1;
    c.agent.c_beta = r.c_beta;
    c.eps_grid = {0.1};
    c.seeds = seed_range(1, 20);
    const auto t0 = Clock::now();
    r.logs = run_experiment(c).bandit;
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

Outcome plateau() {
  const auto& r = linear_runs();
  const std::vector<double> eps{0.1};
  double c1 = 0.0, c2 = 0.0;
  for (const auto& log : r.logs) {
    const auto d = deltas(log);
    c1 += static_cast<double>(uniform_pac_counts(std::span(d).first(10000), eps)[0]);
    c2 += static_cast<double>(uniform_pac_counts(std::span(d).first(20000), eps)[0]);
  }
  c1 /= static_cast<double>(r.logs.size());
  c2 /= static_cast<double>(r.logs.size());
  const double limit = 0.05 * c1 + 5.0;
  // The runs extend to K = 10^5 for criterion 5; the whole batch must fit the limit.
  return {c2 - c1 <= limit && r.seconds < 300.0,
          "c_beta=" + fmt(r.c_beta) + ", eps=0.1: mean count(1e4)=" + fmt(c1) + ", count(2e4)=" +
              fmt(c2) + ", growth=" + fmt(c2 - c1) + " (limit " + fmt(limit) + "), runtime " +
              fmt(r.seconds, 3) + "s for 20 x 1e5 rounds (limit 300s)"};
}

Outcome regret_shape() {
  const auto& r = linear_runs();
  std::size_t ok = 0;
  std::vector<double> slopes;
  for (const auto& log : r.logs) {
    const auto fit = regret_slope(cumulative_regret(log), 1000, 100000);
    slopes.push_back(fit.slope);
    ok += fit.slope <= 0.7;
  }
  std::sort(slopes.begin(), slopes.end());
  return {ok >= 15, "slope over k in [1e3, 1e5] <= 0.7 in " + std::to_string(ok) +
                        "/20 runs (need 15), median slope=" + fmt(slopes[slopes.size() / 2]) +
                        ", max=" + fmt(slopes.back())};
}

Outcome width_count_audit() {
  ExperimentConfig c = small_bandit(0.1, 20);
  c.bandit.hypotheses = 8;
  c.bandit.inputs = 8;
  std::size_t audits = 0, failures = 0;
  double worst = 0.0;
  for (auto seed : c.seeds) {
    const auto log = run_bandit_seed(c, seed);
    const auto problem = make_bandit_problem(c.bandit, seed);
    std::vector<InputId> universe(problem.cls.num_inputs());
    std::iota(universe.begin(), universe.end(), InputId{0});
    std::map<int, std::vector<WidthRecord>> by_level;
    for (const auto& round : log.rounds) by_level[round.level].push_back({round.width, round.level_beta});
    for (const auto& [l, records] : by_level) {
      const double eps = std::ldexp(1.0, -l);
      const auto de = eluder_dimension_exact(problem.cls, universe, eps).dimension;
      ++audits;
      if (!prop3_audit(records, eps, static_cast<double>(de))) ++failures;
      std::size_t count = 0;
      for (const auto& w : records) count += w.width > eps;
      const double bound = (records.back().beta / (eps * eps) + 1.0) * static_cast<double>(de);
      if (bound > 0.0) worst = std::max(worst, static_cast<double>(count) / bound);
    }
  }
  return {failures == 0 && audits > 0,
          "failures=" + std::to_string(failures) + " over " + std::to_string(audits) +
              " (run, level) audits on 8x8 classes, max count/bound=" + fmt(worst)};
}

Outcome decomposition() {
  const auto& r = small_runs();
  const double tol = 1e-9 * 4.0;
  std::size_t checked = 0, violations = 0;
  double identity = 0.0;
  for (const auto& log : r.mdp.logs)
    for (const auto& e : log.episodes) {
      // rhs telescopes to V_{k,1}(s1) - V^{pi_k}_1(s1).
      const double v_pi = e.true_optimal_value - e.delta;
      identity = std::max(identity, std::abs(e.decomposition_rhs - (e.optimistic_value - v_pi)));
      if (!e.covered) continue;
      ++checked;
      violations += !(e.decomposition_lhs <= e.decomposition_rhs + tol);
    }
  return {violations == 0 && checked > 0,
          "violations=" + std::to_string(violations) + " over " + std::to_string(checked) +
              " covered episodes in 50 runs (float tolerance " + fmt(tol) +
              "), max telescoping residual=" + fmt(identity, 3)};
}

Outcome eluder_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0, bad_certs = 0, nonmonotone = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + rng() % 4, m = 2 + rng() % 5;
    const double eps = std::vector<double>{0.1, 0.2, 0.3}[rng() % 3];
    const auto cls = random_finite_class(n, m, 1000 + static_cast<std::uint64_t>(i));
    std::vector<InputId> universe(m);
    std::iota(universe.begin(), universe.end(), InputId{0});
    const auto r = eluder_dimension_exact(cls, universe, eps);
    if (r.dimension != oracle::eluder_dimension(oracle::table_of(cls), eps)) ++mismatches;
    if (!verify_certificate(cls, r.certificate)) ++bad_certs;
    if (eluder_dimension_exact(cls, universe, 2.0 * eps).dimension > r.dimension) ++nonmonotone;
  }
  bool witness_ok = true;
  std::string witness;
  for (std::size_t d : {2u, 3u}) {
    std::vector<std::vector<double>> basis(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) basis[i][i] = 1.0;
    const auto cls = FunctionClass::parametric(basis, ParameterGrid{d, 5});
    std::vector<InputId> universe(d);
    std::iota(universe.begin(), universe.end(), InputId{0});
    const auto r = eluder_dimension_exact(cls, universe, 0.1);
    witness_ok = witness_ok && r.dimension >= d && verify_certificate(cls, r.certificate);
    witness += " d=" + std::to_string(d) + ":" + std::to_string(r.dimension);
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && bad_certs == 0 && nonmonotone == 0 && witness_ok && secs < 60.0,
          "mismatches=" + std::to_string(mismatches) + "/50, invalid certificates=" +
              std::to_string(bad_certs) + ", monotonicity breaks=" + std::to_string(nonmonotone) +
              ", linear witness" + witness + ", runtime=" + fmt(secs, 3) + "s"};
}

Outcome fixed_point() {
  double worst = 0.0;
  std::size_t bad = 0, cases = 0;
  for (int l = 1; l <= 8; ++l)
    for (double dk : {1.0, 2.0, 4.0})
      for (double de : {1.0, 2.0, 4.0})
        for (double h : {1.0, 4.0})
          for (double delta : {0.3, 0.1, 0.01}) {
            ++cases;
            const double u = solve_U(l, dk, de, delta, h);
            const double res = std::abs(u - cardinality_rhs(u, l, dk, de, delta, h)) / u;
            worst = std::max(worst, res);
            if (!(res <= 1e-8) || !(u / delta > std::exp(1.0))) ++bad;
          }
  return {bad == 0, std::to_string(cases) + " grid points, failures=" + std::to_string(bad) +
                        ", max relative residual=" + fmt(worst, 3)};
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Compares every file of two output directories byte for byte.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
  std::size_t other = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++other;
  if (names.empty() || names.size() != other) return false;
  for (const auto& n : names) {
    if (!fs::exists(b / n) || read_bytes(a / n) != read_bytes(b / n)) return false;
    ++files;
  }
  return true;
}

Outcome determinism(const std::string& tool, const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string bandit_cfg = R"({
  "algorithm": "upac-oful",
  "instance": {"type": "random-finite", "hypotheses": 16, "inputs": 8, "action_subset": 5},
  "K": 1500, "delta": 0.1, "eps_grid": [0.05, 0.1, 0.2], "seeds": [1, 2, 3, 4],
  "output": {"prefix": "bandit"}
})";
  const std::string mdp_cfg = R"({
  "algorithm": "upac-vtr",
  "instance": {"type": "linear-mixture", "states": 3, "actions": 2, "basis": 2,
               "resolution": 7, "horizon": 4},
  "K": 300, "delta": 0.1, "eps_grid": [0.1, 0.5], "seeds": [1, 2, 3],
  "output": {"prefix": "mdp"}
})";
  std::ofstream(work / "bandit.json") << bandit_cfg;
  std::ofstream(work / "mdp.json") << mdp_cfg;
  std::size_t files = 0;
  bool ok = true;
  for (const auto& [kind, cfg] : {std::pair{"bandit", "bandit.json"}, std::pair{"mdp", "mdp.json"}}) {
    for (const char* run : {"a", "b"}) {
      const fs::path out = work / (std::string(kind) + "_" + run);
      if (!tool.empty()) {
        const std::string cmd = "\"" + tool + "\" " + kind + " run --config \"" +
                                (work / cfg).string() + "\" --out-dir \"" + out.string() +
                                "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) ok = false;
      } else {
        auto config = load_config(work / cfg);
        config.output.dir = out;
        write_outputs(config, run_experiment(config));
      }
    }
    ok = ok && same_tree(work / (std::string(kind) + "_a"), work / (std::string(kind) + "_b"), files);
  }
  return {ok && files == 5, std::string(tool.empty() ? "in-process" : "CLI") +
                                " runs twice: " + std::to_string(files) +
                                " CSV/JSON files byte-identical (expected 5)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string tool;
  std::string work = (fs::temp_directory_path() / "upac_acceptance").string();
  app.add_option("--tool", tool, "Path to the upac executable for the determinism check");
  app.add_option("--work-dir", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"level cardinality", level_cardinality},
      {"coverage", coverage},
      {"optimism", optimism},
      {"uniform-PAC plateau", plateau},
      {"regret shape", regret_shape},
      {"width-count audit", width_count_audit},
      {"regret decomposition", decomposition},
      {"eluder oracle", eluder_oracle},
      {"fixed-point solver", fixed_point},
      {"determinism", [&] { return determinism(tool, work); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
