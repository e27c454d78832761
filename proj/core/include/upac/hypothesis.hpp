#pragma once

// Function classes over a finite input universe.
//
// Every class is materialized as a dense table value(h, x) so that all
// confidence-set extremizations downstream are exact enumerations. The
// parametric kinds (linear, generalized linear) keep their feature map and
// parameter grid so covering bounds and analytic fits can be computed.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

namespace upac {

using InputId = std::size_t;
using HypothesisId = std::size_t;

enum class ClassKind { finite, linear, generalized_linear };

enum class Link { identity, logistic };

double apply_link(Link link, double z);

/// Regular grid over [0,1]^dim with `points_per_axis` values per coordinate.
/// Points are enumerated lexicographically (last coordinate fastest), so
/// index 0 is the origin.
struct ParameterGrid {
  std::size_t dim = 0;
  std::size_t points_per_axis = 0;

  std::size_t size() const;
  double spacing() const;
  std::vector<double> point(std::size_t index) const;
  /// Grid point closest in every coordinate to theta (clamped to [0,1]).
  std::size_t nearest(std::span<const double> theta) const;
};

struct Sample {
  InputId input;
  double target;
};

using Dataset = std::vector<Sample>;

class FunctionClass {
 public:
  /// values[h][x]; every row must have the same length.
  static FunctionClass finite(const std::vector<std::vector<double>>& values,
                              double lower = 0.0, double upper = 1.0);

  /// f_theta(x) = link(<theta, features[x]>) for theta on the grid. Throws
  /// std::domain_error if some grid member leaves [lower, upper] on some input.
  static FunctionClass parametric(std::vector<std::vector<double>> features,
                                  ParameterGrid grid,
                                  Link link = Link::identity,
                                  double lower = 0.0, double upper = 1.0);

  ClassKind kind() const noexcept { return kind_; }
  std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
  std::size_t num_inputs() const noexcept { return num_inputs_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

  double evaluate(HypothesisId h, InputId x) const;

  /// Values of every hypothesis at x, indexed by hypothesis.
  std::span<const double> column(InputId x) const;

  double log_cardinality() const;

  // Parametric metadata; empty/zero for the finite kind.
  Link link() const noexcept { return link_; }
  const ParameterGrid& grid() const noexcept { return grid_; }
  std::size_t parameter_dim() const noexcept { return grid_.dim; }
  double lipschitz() const noexcept { return lipschitz_; }
  std::span<const double> features(InputId x) const;
  std::vector<double> parameter(HypothesisId h) const;

 private:
  FunctionClass() = default;

  void check_hypothesis(HypothesisId h) const;
  void check_input(InputId x) const;

  ClassKind kind_ = ClassKind::finite;
  std::size_t num_hypotheses_ = 0;
  std::size_t num_inputs_ = 0;
  double lower_ = 0.0;
  double upper_ = 1.0;
  // Input-major: values_[x * num_hypotheses_ + h].
  std::vector<double> values_;

  Link link_ = Link::identity;
  ParameterGrid grid_{};
  double lipschitz_ = 0.0;
  std::vector<std::vector<double>> features_;
};

/// Sum over the listed inputs of (f(x) - g(x))^2.
double squared_loss(const FunctionClass& cls, HypothesisId f, HypothesisId g,
                    std::span<const InputId> inputs);

/// Sum over the dataset of (f(x_k) - R_k)^2.
double empirical_loss(const FunctionClass& cls, HypothesisId f, const Dataset& data);

/// Exact least-squares member by enumeration; ties go to the lowest index and
/// an empty dataset returns hypothesis 0. Targets are used unclipped.
HypothesisId fit_least_squares(const FunctionClass& cls, const Dataset& data);

/// Upper bound on log N(F, alpha, sup-norm): log|F| for the finite kind and
/// d log(1 + L/alpha) for the parametric kinds.
double covering_bound(const FunctionClass& cls, double alpha);

/// log |F| regardless of kind; the grid is itself a finite cover.
double exact_log_covering(const FunctionClass& cls);

/// Unconstrained ordinary least squares on the raw features of a linear class
/// (pseudo-inverse for rank-deficient designs). Used as an independent path for
/// checking grid fits.
std::vector<double> linear_least_squares(const FunctionClass& cls, const Dataset& data);

/// Plain-text matrix: header "hypotheses inputs" followed by one whitespace
/// separated row of values per hypothesis. Throws ParseError.
FunctionClass load_matrix(std::istream& in, double lower = 0.0, double upper = 1.0);
FunctionClass load_matrix_file(const std::filesystem::path& path,
                               double lower = 0.0, double upper = 1.0);

}  // namespace upac
