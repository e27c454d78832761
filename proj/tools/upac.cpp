// upac: run bandit/MDP experiments, compute eluder dimensions, merge summaries.

#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "upac/eluder.hpp"
#include "upac/error.hpp"
#include "upac/harness.hpp"

namespace {

int run_experiment_command(const std::string& config_path, bool episodic, std::size_t threads,
                           const std::string& out_dir) {
  upac::ExperimentConfig config = upac::load_config(config_path);
  if (upac::is_episodic(config.algorithm) != episodic)
    throw std::invalid_argument("config algorithm '" + upac::to_string(config.algorithm) +
                                "' does not match the '" + (episodic ? "mdp" : "bandit") +
                                "' command");
  if (threads > 0) config.threads = threads;
  if (!out_dir.empty()) config.output.dir = out_dir;
  const upac::ExperimentResult result = upac::run_experiment(config);
  for (const auto& p : upac::write_outputs(config, result)) std::cout << p.string() << '\n';
  return 0;
}

int eluder_command(const std::string& class_path, double eps, const std::string& method,
                   std::size_t cap) {
  const upac::FunctionClass cls = upac::load_matrix_file(class_path);
  std::vector<upac::InputId> universe(cls.num_inputs());
  std::iota(universe.begin(), universe.end(), upac::InputId{0});
  const bool exact = method == "exact" || (method == "auto" && universe.size() <= cap);
  const upac::EluderResult r = exact ? upac::eluder_dimension_exact(cls, universe, eps, cap)
                                     : upac::eluder_dimension_greedy(cls, universe, eps);
  nlohmann::ordered_json j;
  j["dimension"] = r.dimension;
  j["method"] = exact ? "exact" : "greedy";
  j["epsilon"] = r.certificate.epsilon;
  j["epsilon_used"] = r.certificate.epsilon_used;
  j["sequence"] = r.certificate.sequence;
  auto witnesses = nlohmann::ordered_json::array();
  for (const auto& w : r.certificate.witnesses) witnesses.push_back({w.first, w.second});
  j["witnesses"] = witnesses;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int report_command(const std::string& pattern, const std::string& out_path) {
  const auto files = upac::expand_glob(pattern);
  if (files.empty()) throw std::invalid_argument("no files match " + pattern);
  std::vector<std::string> texts;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + f.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    texts.push_back(ss.str());
  }
  const std::string merged = upac::merge_summaries(texts);
  if (out_path.empty()) {
    std::cout << merged;
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << merged;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform-PAC bandit and value-targeted MDP simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t threads = 0;

  auto* bandit = app.add_subcommand("bandit", "Nonlinear bandit experiments");
  bandit->require_subcommand(1);
  auto* bandit_run = bandit->add_subcommand("run", "Run a bandit experiment");
  bandit_run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  bandit_run->add_option("--threads", threads, "Worker threads (0 = hardware)");
  bandit_run->add_option("--out-dir", out_dir, "Override the output directory");

  auto* mdp = app.add_subcommand("mdp", "Episodic MDP experiments");
  mdp->require_subcommand(1);
  auto* mdp_run = mdp->add_subcommand("run", "Run an MDP experiment");
  mdp_run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  mdp_run->add_option("--threads", threads, "Worker threads (0 = hardware)");
  mdp_run->add_option("--out-dir", out_dir, "Override the output directory");

  std::string class_path, method = "auto";
  double eps = 0.0;
  std::size_t cap = upac::kDefaultExactCap;
  auto* eluder = app.add_subcommand("eluder", "Eluder dimension of a finite class");
  eluder->require_subcommand(1);
  auto* dim = eluder->add_subcommand("dim", "Compute dim_E with a certificate");
  dim->add_option("--class", class_path, "Class matrix file")->required();
  dim->add_option("--eps", eps, "Scale eps > 0")->required()->check(CLI::PositiveNumber);
  dim->add_option("--method", method, "auto, exact or greedy")
      ->check(CLI::IsMember({"auto", "exact", "greedy"}));
  dim->add_option("--cap", cap, "Largest universe for exact search");

  std::string logs, report_out;
  auto* report = app.add_subcommand("report", "Merge summary JSON files");
  report->add_option("--logs", logs, "Glob of summary files")->required();
  report->add_option("--out", report_out, "Write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bandit_run) return run_experiment_command(config_path, false, threads, out_dir);
    if (*mdp_run) return run_experiment_command(config_path, true, threads, out_dir);
    if (*dim) return eluder_command(class_path, eps, method, cap);
    if (*report) return report_command(logs, report_out);
  } catch (const upac::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
