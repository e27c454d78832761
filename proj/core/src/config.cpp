#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "upac/error.hpp"
#include "upac/harness.hpp"

namespace upac {
namespace {

using nlohmann::json;

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the 1-based offset of the offending byte.
    const auto [line, column] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    // Drop the library's own position prefix; ParseError appends ours.
    std::string msg = e.what();
    const auto at = msg.find(": ", msg.find("column"));
    if (at != std::string::npos) msg = msg.substr(at + 2);
    throw ParseError(what + ": " + msg, line, column);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void schema_error(const std::string& key, const std::string& msg) {
  throw std::invalid_argument("config: '" + key + "' " + msg);
}

template <class T>
T get(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    schema_error(key, "is missing or has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key);
}

std::size_t get_count(const json& j, const std::string& key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) schema_error(key, "must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::optional<std::uint64_t> get_seed(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number_unsigned()) schema_error(key, "must be a nonnegative integer");
  return j.at(key).get<std::uint64_t>();
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "upac-oful") return Algorithm::upac_oful;
  if (s == "upac-vtr") return Algorithm::upac_vtr;
  if (s == "baseline-eluder-ucb") return Algorithm::baseline_eluder_ucb;
  if (s == "baseline-ucrl-vtr") return Algorithm::baseline_ucrl_vtr;
  schema_error("algorithm", "must be one of upac-oful, upac-vtr, baseline-eluder-ucb, baseline-ucrl-vtr");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void parse_bandit_instance(const json& j, const std::filesystem::path& base, BanditInstance& out) {
  const std::string type = get<std::string>(j, "type");
  if (type == "random-finite") {
    out.type = BanditInstance::Type::random_finite;
    out.hypotheses = get_count(j, "hypotheses", out.hypotheses);
    out.inputs = get_count(j, "inputs", out.inputs);
  } else if (type == "linear-sphere") {
    out.type = BanditInstance::Type::linear_sphere;
    out.dim = get_count(j, "dim", out.dim);
    out.actions = get_count(j, "actions", out.actions);
    out.grid = get_count(j, "grid", out.grid);
  } else if (type == "matrix-file") {
    out.type = BanditInstance::Type::matrix_file;
    out.file = resolve(base, get<std::string>(j, "file"));
  } else {
    schema_error("instance.type", "must be random-finite, linear-sphere or matrix-file");
  }
  out.seed = get_seed(j, "seed");
  if (j.contains("truth") && !j.at("truth").is_null()) out.truth = get_count(j, "truth", 0);
  out.theta = get_or<std::vector<double>>(j, "theta", {});
  out.noise_sd = get_or<double>(j, "noise_sd", out.noise_sd);
  out.action_subset = get_count(j, "action_subset", 0);
}

void parse_mdp_instance(const json& j, const std::filesystem::path& base, MdpInstance& out) {
  const std::string type = get<std::string>(j, "type");
  if (type == "linear-mixture") {
    out.type = MdpInstance::Type::linear_mixture;
    out.states = get_count(j, "states", out.states);
    out.actions = get_count(j, "actions", out.actions);
    out.basis = get_count(j, "basis", out.basis);
    out.resolution = get_count(j, "resolution", out.resolution);
    out.horizon = static_cast<int>(get_count(j, "horizon", static_cast<std::size_t>(out.horizon)));
  } else if (type == "mdp-file") {
    out.type = MdpInstance::Type::mdp_file;
    out.file = resolve(base, get<std::string>(j, "file"));
  } else {
    schema_error("instance.type", "must be linear-mixture or mdp-file");
  }
  out.seed = get_seed(j, "seed");
  if (j.contains("truth") && !j.at("truth").is_null()) out.truth = get_count(j, "truth", 0);
  out.initial = get_or<std::vector<double>>(j, "initial", {});
}

std::vector<std::uint64_t> parse_seeds(const json& j) {
  if (j.is_array()) {
    std::vector<std::uint64_t> out;
    for (const auto& s : j) {
      if (!s.is_number_unsigned()) schema_error("seeds", "entries must be nonnegative integers");
      out.push_back(s.get<std::uint64_t>());
    }
    return out;
  }
  if (j.is_object()) {
    const auto first = get<std::uint64_t>(j, "first");
    const auto count = get<std::uint64_t>(j, "count");
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(first + i);
    return out;
  }
  schema_error("seeds", "must be an array or {first, count}");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  ExperimentConfig c;
  c.algorithm = parse_algorithm(get<std::string>(j, "algorithm"));
  if (is_episodic(c.algorithm)) {
    parse_mdp_instance(j.at("instance"), base_dir, c.mdp);
  } else {
    parse_bandit_instance(j.at("instance"), base_dir, c.bandit);
  }
  c.K = get_count(j, "K", c.K);
  c.agent.delta = get_or<double>(j, "delta", c.agent.delta);
  c.agent.c_beta = get_or<double>(j, "c_beta", c.agent.c_beta);
  if (j.contains("d_K") && !j.at("d_K").is_null()) c.agent.d_k = get<double>(j, "d_K");
  if (j.contains("d_E")) {
    const json& d = j.at("d_E");
    if (d.is_number()) {
      c.agent.d_e = {d.get<double>()};
    } else if (!d.is_null()) {
      c.agent.d_e = get<std::vector<double>>(j, "d_E");
    }
  }
  const std::string covering = get_or<std::string>(j, "covering", "exact");
  if (covering == "exact") {
    c.agent.covering = CoveringMode::exact;
  } else if (covering == "parametric") {
    c.agent.covering = CoveringMode::parametric;
  } else {
    schema_error("covering", "must be exact or parametric");
  }
  c.eps_grid = get_or<std::vector<double>>(j, "eps_grid", c.eps_grid);
  if (j.contains("seeds")) c.seeds = parse_seeds(j.at("seeds"));
  c.threads = get_count(j, "threads", 0);
  if (j.contains("output")) {
    const json& o = j.at("output");
    c.output.dir = resolve(base_dir, get_or<std::string>(o, "dir", "."));
    c.output.prefix = get_or<std::string>(o, "prefix", c.output.prefix);
  } else {
    c.output.dir = base_dir;
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

MdpFile parse_mdp_file(const std::string& text) {
  const json j = parse_json(text, "mdp file");
  MdpFile f;
  try {
    f.horizon = j.at("horizon").get<int>();
    const auto reward = j.at("reward").get<std::vector<std::vector<double>>>();
    if (reward.empty()) throw std::invalid_argument("mdp file: empty reward table");
    const std::size_t S = reward.size(), A = reward.front().size();
    std::vector<double> flat;
    for (const auto& row : reward) {
      if (row.size() != A) throw std::invalid_argument("mdp file: ragged reward table");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    f.reward = RewardTable(S, A, std::move(flat));
    for (const auto& kernel : j.at("candidates")) {
      const auto p = kernel.get<std::vector<std::vector<std::vector<double>>>>();
      if (p.size() != S) throw std::invalid_argument("mdp file: kernel has wrong state count");
      std::vector<double> probs;
      for (const auto& by_action : p) {
        if (by_action.size() != A) throw std::invalid_argument("mdp file: kernel has wrong action count");
        for (const auto& row : by_action) {
          if (row.size() != S) throw std::invalid_argument("mdp file: kernel row has wrong length");
          probs.insert(probs.end(), row.begin(), row.end());
        }
      }
      f.candidates.emplace_back(S, A, std::move(probs));
    }
    if (j.contains("initial")) f.initial = j.at("initial").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("mdp file: ") + e.what());
  }
  if (f.candidates.empty()) throw std::invalid_argument("mdp file: no candidate kernels");
  return f;
}

MdpFile load_mdp_file(const std::filesystem::path& path) { return parse_mdp_file(read_file(path)); }

}  // namespace upac
