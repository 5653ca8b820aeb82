#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Algebraic structure of a scalar function of strictly positive variables.
/// Monomial:  c * prod_i x_i^{a_i} with c > 0.
/// Posynomial: sum of monomials.
/// Signomial: difference of posynomials.
/// Opaque: no structure is claimed.
enum class StructureClass { Monomial, Posynomial, Signomial, Opaque };

/// Black-box scalar function with first derivatives.
/// eval writes the value and, when grad is non-null, the dense gradient.
struct ScalarFunction {
  std::function<void(const Vector& x, double& value, Vector* grad)> eval;
  StructureClass structure{StructureClass::Opaque};
  std::string name;  // used in diagnostics
};

/// Inequality constraints are g_i(x) <= 1, equalities h_j(x) = 1.
struct Problem {
  int n_vars{0};
  ScalarFunction objective;
  std::vector<ScalarFunction> ineq_constraints;
  std::vector<ScalarFunction> eq_constraints;
  Vector lower_bounds;  // elementwise strictly positive floor
  std::vector<std::string> variable_names;
  std::map<std::string, std::string> metadata;
};

/// One full evaluation of a problem at a point: objective, constraints,
/// and their gradients. grad_g is N x n (one row per inequality).
struct Evaluation {
  Vector x;
  double f{0.0};
  Vector grad_f;
  Vector g;
  Matrix grad_g;
  Vector h;
  Matrix grad_h;
};

/// Reference solution used to classify solver outcomes.
struct KnownOptimum {
  Vector x;
  double f{0.0};
};

struct NonFiniteEvaluation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnnormalizableConstraint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a point required by the log transform has a nonpositive
/// objective or constraint value. Offenders lists the function names.
struct TransformFailure : std::runtime_error {
  explicit TransformFailure(const std::string& what,
                            std::vector<std::string> offenders_ = {})
      : std::runtime_error(what), offenders(std::move(offenders_)) {}
  std::vector<std::string> offenders;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingConstants : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lsqp
