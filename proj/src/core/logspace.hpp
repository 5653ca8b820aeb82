#pragma once

#include "core/qp.hpp"
#include "core/types.hpp"

namespace lsqp {

/// Problem data re-expressed in y = log(x) with logged values:
/// objective log f(e^y), inequalities log g_i(e^y) <= 0, equalities
/// log h_j(e^y) = 0. Gradients follow the chain rule
/// d log F(e^y) / dy_i = x_i dF/dx_i / F.
struct LogEvaluation {
  Vector y;
  double log_f{0.0};
  Vector log_grad_f;
  Vector log_g;
  Matrix log_grad_g;
  Vector log_h;
  Matrix log_grad_h;
};

/// Maps an x-space evaluation into log space. Every logged quantity must be
/// strictly positive at x; otherwise throws TransformFailure naming the
/// offending functions.
[[nodiscard]] LogEvaluation log_transform(const Problem& problem,
                                          const Evaluation& eval);

/// Quadratic model of the logged problem around eval.y with Hessian
/// approximation B: linearized rows J d + log g <= 0 and J d + log h = 0.
[[nodiscard]] QpData build_log_subproblem(const LogEvaluation& eval,
                                          const Matrix& B);

}  // namespace lsqp
