#include "core/logspace.hpp"

#include "core/problem.hpp"

#include <cmath>

namespace lsqp {

LogEvaluation log_transform(const Problem& problem, const Evaluation& eval) {
  const PositivityReport positivity = check_positivity(problem, eval);
  if (!positivity.all_positive) {
    std::string what = "log transform undefined, nonpositive value of:";
    for (const auto& name : positivity.offenders) what += " " + name;
    throw TransformFailure(what, positivity.offenders);
  }

  LogEvaluation out;
  out.y = eval.x.array().log();
  out.log_f = std::log(eval.f);
  out.log_grad_f = eval.x.cwiseProduct(eval.grad_f) / eval.f;

  const auto n_ineq = eval.g.size();
  const auto n_eq = eval.h.size();
  out.log_g.resize(n_ineq);
  out.log_grad_g.resize(n_ineq, eval.x.size());
  for (Eigen::Index i = 0; i < n_ineq; ++i) {
    out.log_g[i] = std::log(eval.g[i]);
    out.log_grad_g.row(i) =
        (eval.x.cwiseProduct(eval.grad_g.row(i).transpose()) / eval.g[i])
            .transpose();
  }
  out.log_h.resize(n_eq);
  out.log_grad_h.resize(n_eq, eval.x.size());
  for (Eigen::Index j = 0; j < n_eq; ++j) {
    out.log_h[j] = std::log(eval.h[j]);
    out.log_grad_h.row(j) =
        (eval.x.cwiseProduct(eval.grad_h.row(j).transpose()) / eval.h[j])
            .transpose();
  }
  return out;
}

QpData build_log_subproblem(const LogEvaluation& eval, const Matrix& B) {
  QpData qp;
  qp.H = B;
  qp.c = eval.log_grad_f;
  qp.A_ineq = eval.log_grad_g;
  qp.b_ineq = eval.log_g;
  qp.A_eq = eval.log_grad_h;
  qp.b_eq = eval.log_h;
  qp.n_soft_ineq = static_cast<int>(eval.log_g.size());
  return qp;
}

}  // namespace lsqp
