#include "upac/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "upac/error.hpp"

namespace upac {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what + " (line " + std::to_string(line) +
                         (column ? ", column " + std::to_string(column) : std::string()) + ")"),
      line_(line),
      column_(column) {}

double apply_link(Link link, double z) {
  switch (link) {
    case Link::identity:
      return z;
    case Link::logistic:
      return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

std::size_t ParameterGrid::size() const {
  if (dim == 0 || points_per_axis == 0) return 0;
  std::size_t n = 1;
  for (std::size_t i = 0; i < dim; ++i) n *= points_per_axis;
  return n;
}

double ParameterGrid::spacing() const {
  return points_per_axis > 1 ? 1.0 / static_cast<double>(points_per_axis - 1) : 1.0;
}

std::vector<double> ParameterGrid::point(std::size_t index) const {
  if (index >= size()) throw std::domain_error("grid index out of range");
  std::vector<double> theta(dim);
  const double step = points_per_axis > 1 ? spacing() : 0.0;
  for (std::size_t i = dim; i-- > 0;) {
    theta[i] = static_cast<double>(index % points_per_axis) * step;
    index /= points_per_axis;
  }
  return theta;
}

std::size_t ParameterGrid::nearest(std::span<const double> theta) const {
  if (theta.size() != dim) throw std::invalid_argument("nearest: dimension mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double c = std::clamp(theta[i], 0.0, 1.0);
    auto k = static_cast<std::size_t>(std::lround(c * static_cast<double>(points_per_axis - 1)));
    index = index * points_per_axis + std::min(k, points_per_axis - 1);
  }
  return index;
}

FunctionClass FunctionClass::finite(const std::vector<std::vector<double>>& values,
                                    double lower, double upper) {
  if (values.empty()) throw std::invalid_argument("finite class needs at least one hypothesis");
  if (!(lower <= upper)) throw std::invalid_argument("finite class: lower > upper");
  FunctionClass cls;
  cls.kind_ = ClassKind::finite;
  cls.num_hypotheses_ = values.size();
  cls.num_inputs_ = values.front().size();
  cls.lower_ = lower;
  cls.upper_ = upper;
  cls.values_.resize(cls.num_hypotheses_ * cls.num_inputs_);
  for (std::size_t h = 0; h < values.size(); ++h) {
    if (values[h].size() != cls.num_inputs_)
      throw std::invalid_argument("finite class: ragged value table");
    for (std::size_t x = 0; x < cls.num_inputs_; ++x) {
      const double v = values[h][x];
      if (!std::isfinite(v) || v < lower || v > upper)
        throw std::domain_error("finite class: value outside [lower, upper]");
      cls.values_[x * cls.num_hypotheses_ + h] = v;
    }
  }
  return cls;
}

FunctionClass FunctionClass::parametric(std::vector<std::vector<double>> features,
                                        ParameterGrid grid, Link link, double lower,
                                        double upper) {
  if (grid.size() == 0) throw std::invalid_argument("parametric class: empty grid");
  FunctionClass cls;
  cls.kind_ = link == Link::identity ? ClassKind::linear : ClassKind::generalized_linear;
  cls.num_hypotheses_ = grid.size();
  cls.num_inputs_ = features.size();
  cls.lower_ = lower;
  cls.upper_ = upper;
  cls.link_ = link;
  cls.grid_ = grid;

  double max_l1 = 0.0;
  for (const auto& phi : features) {
    if (phi.size() != grid.dim) throw std::invalid_argument("parametric class: feature dimension");
    double l1 = 0.0;
    for (double v : phi) l1 += std::abs(v);
    max_l1 = std::max(max_l1, l1);
  }
  // |f_theta - f_theta'| <= ||phi||_1 ||theta - theta'||_inf, times sup |link'|.
  cls.lipschitz_ = link == Link::logistic ? max_l1 / 4.0 : max_l1;

  cls.values_.resize(cls.num_hypotheses_ * cls.num_inputs_);
  for (std::size_t h = 0; h < cls.num_hypotheses_; ++h) {
    const auto theta = grid.point(h);
    for (std::size_t x = 0; x < cls.num_inputs_; ++x) {
      double z = 0.0;
      for (std::size_t i = 0; i < grid.dim; ++i) z += theta[i] * features[x][i];
      const double v = apply_link(link, z);
      if (v < lower || v > upper)
        throw std::domain_error("parametric class: member leaves [lower, upper]");
      cls.values_[x * cls.num_hypotheses_ + h] = v;
    }
  }
  cls.features_ = std::move(features);
  return cls;
}

void FunctionClass::check_hypothesis(HypothesisId h) const {
  if (h >= num_hypotheses_) throw std::domain_error("unknown hypothesis " + std::to_string(h));
}

void FunctionClass::check_input(InputId x) const {
  if (x >= num_inputs_) throw std::domain_error("unknown input " + std::to_string(x));
}

double FunctionClass::evaluate(HypothesisId h, InputId x) const {
  check_hypothesis(h);
  check_input(x);
  return values_[x * num_hypotheses_ + h];
}

std::span<const double> FunctionClass::column(InputId x) const {
  check_input(x);
  return {values_.data() + x * num_hypotheses_, num_hypotheses_};
}

double FunctionClass::log_cardinality() const {
  return std::log(static_cast<double>(num_hypotheses_));
}

std::span<const double> FunctionClass::features(InputId x) const {
  check_input(x);
  if (features_.empty()) return {};
  return features_[x];
}

std::vector<double> FunctionClass::parameter(HypothesisId h) const {
  check_hypothesis(h);
  if (kind_ == ClassKind::finite) return {};
  return grid_.point(h);
}

double squared_loss(const FunctionClass& cls, HypothesisId f, HypothesisId g,
                    std::span<const InputId> inputs) {
  double total = 0.0;
  for (InputId x : inputs) {
    const double d = cls.evaluate(f, x) - cls.evaluate(g, x);
    total += d * d;
  }
  return total;
}

double empirical_loss(const FunctionClass& cls, HypothesisId f, const Dataset& data) {
  double total = 0.0;
  for (const auto& s : data) {
    const double d = cls.evaluate(f, s.input) - s.target;
    total += d * d;
  }
  return total;
}

HypothesisId fit_least_squares(const FunctionClass& cls, const Dataset& data) {
  if (data.empty()) return 0;
  // Aggregate per input so each hypothesis costs O(distinct inputs).
  std::vector<double> count(cls.num_inputs(), 0.0), sum(cls.num_inputs(), 0.0);
  std::vector<InputId> seen;
  for (const auto& s : data) {
    if (s.input >= cls.num_inputs()) throw std::domain_error("unknown input");
    if (count[s.input] == 0.0) seen.push_back(s.input);
    count[s.input] += 1.0;
    sum[s.input] += s.target;
  }
  HypothesisId best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (HypothesisId h = 0; h < cls.num_hypotheses(); ++h) {
    // Drops the constant sum of R^2; argmin is unchanged.
    double loss = 0.0;
    for (InputId x : seen) {
      const double v = cls.evaluate(h, x);
      loss += count[x] * v * v - 2.0 * v * sum[x];
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = h;
    }
  }
  return best;
}

double covering_bound(const FunctionClass& cls, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("covering_bound: alpha must be positive");
  if (cls.kind() == ClassKind::finite) return cls.log_cardinality();
  return static_cast<double>(cls.parameter_dim()) * std::log1p(cls.lipschitz() / alpha);
}

double exact_log_covering(const FunctionClass& cls) { return cls.log_cardinality(); }

std::vector<double> linear_least_squares(const FunctionClass& cls, const Dataset& data) {
  if (cls.kind() != ClassKind::linear)
    throw std::invalid_argument("linear_least_squares: class is not linear");
  const auto d = static_cast<Eigen::Index>(cls.parameter_dim());
  Eigen::MatrixXd design(static_cast<Eigen::Index>(data.size()), d);
  Eigen::VectorXd targets(static_cast<Eigen::Index>(data.size()));
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto phi = cls.features(data[k].input);
    for (Eigen::Index i = 0; i < d; ++i) design(static_cast<Eigen::Index>(k), i) = phi[i];
    targets(static_cast<Eigen::Index>(k)) = data[k].target;
  }
  Eigen::VectorXd theta = design.completeOrthogonalDecomposition().solve(targets);
  return {theta.data(), theta.data() + theta.size()};
}

FunctionClass load_matrix(std::istream& in, double lower, double upper) {
  std::string line;
  std::size_t line_no = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return true;
    }
    return false;
  };

  if (!next_content_line()) throw ParseError("matrix file: missing header", line_no + 1);
  std::size_t hypotheses = 0, inputs = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> hypotheses >> inputs) || (header >> extra))
      throw ParseError("matrix file: header must be 'hypotheses inputs'", line_no, 1);
    if (hypotheses == 0 || inputs == 0)
      throw ParseError("matrix file: header counts must be positive", line_no, 1);
  }

  std::vector<std::vector<double>> values;
  values.reserve(hypotheses);
  while (values.size() < hypotheses) {
    if (!next_content_line())
      throw ParseError("matrix file: expected " + std::to_string(hypotheses) + " rows, got " +
                           std::to_string(values.size()),
                       line_no + 1);
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      pos = line.find_first_not_of(" \t\r", pos);
      if (pos == std::string::npos) break;
      const auto end = line.find_first_of(" \t\r", pos);
      const std::string token = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v))
        throw ParseError("matrix file: bad number '" + token + "'", line_no, pos + 1);
      if (v < lower || v > upper)
        throw ParseError("matrix file: value " + token + " outside range", line_no, pos + 1);
      row.push_back(v);
      if (end == std::string::npos) break;
      pos = end;
    }
    if (row.size() != inputs)
      throw ParseError("matrix file: expected " + std::to_string(inputs) + " values, got " +
                           std::to_string(row.size()),
                       line_no, 1);
    values.push_back(std::move(row));
  }
  if (next_content_line()) throw ParseError("matrix file: trailing content", line_no, 1);
  return FunctionClass::finite(values, lower, upper);
}

FunctionClass load_matrix_file(const std::filesystem::path& path, double lower, double upper) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_matrix(in, lower, upper);
}

}  // namespace upac
