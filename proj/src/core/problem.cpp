#include "core/problem.hpp"

#include <cmath>
#include <utility>

namespace lsqp {

namespace {

void check_finite(double value, const Vector& grad, const std::string& name) {
  if (!std::isfinite(value) || !grad.allFinite()) {
    throw NonFiniteEvaluation("non-finite evaluation of " + name);
  }
}

std::string display_name(const ScalarFunction& f, const std::string& fallback) {
  return f.name.empty() ? fallback : f.name;
}

}  // namespace

Evaluation evaluate_point(const Problem& problem, const Vector& x) {
  if (x.size() != problem.n_vars) {
    throw DimensionMismatch("point has wrong dimension");
  }
  if (problem.lower_bounds.size() == x.size()) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < problem.lower_bounds[i] * (1.0 - 1e-9)) {
        throw std::invalid_argument("variable " + std::to_string(i) +
                                    " below its lower bound");
      }
    }
  }

  Evaluation eval;
  eval.x = x;
  const auto n = x.size();
  const auto n_ineq = static_cast<Eigen::Index>(problem.ineq_constraints.size());
  const auto n_eq = static_cast<Eigen::Index>(problem.eq_constraints.size());

  eval.grad_f.setZero(n);
  problem.objective.eval(x, eval.f, &eval.grad_f);
  check_finite(eval.f, eval.grad_f, display_name(problem.objective, "objective"));

  eval.g.resize(n_ineq);
  eval.grad_g.resize(n_ineq, n);
  Vector grad(n);
  for (Eigen::Index i = 0; i < n_ineq; ++i) {
    problem.ineq_constraints[i].eval(x, eval.g[i], &grad);
    check_finite(eval.g[i], grad,
                 display_name(problem.ineq_constraints[i],
                              "inequality " + std::to_string(i)));
    eval.grad_g.row(i) = grad.transpose();
  }

  eval.h.resize(n_eq);
  eval.grad_h.resize(n_eq, n);
  for (Eigen::Index j = 0; j < n_eq; ++j) {
    problem.eq_constraints[j].eval(x, eval.h[j], &grad);
    check_finite(eval.h[j], grad,
                 display_name(problem.eq_constraints[j],
                              "equality " + std::to_string(j)));
    eval.grad_h.row(j) = grad.transpose();
  }
  return eval;
}

PositivityReport check_positivity(const Problem& problem, const Evaluation& eval) {
  PositivityReport report;
  auto flag = [&report](double value, std::string name) {
    if (!(value > 0.0)) {
      report.all_positive = false;
      report.offenders.push_back(std::move(name));
    }
  };
  flag(eval.f, display_name(problem.objective, "objective"));
  for (Eigen::Index i = 0; i < eval.g.size(); ++i) {
    flag(eval.g[i], display_name(problem.ineq_constraints[i],
                                 "inequality " + std::to_string(i)));
  }
  for (Eigen::Index j = 0; j < eval.h.size(); ++j) {
    flag(eval.h[j], display_name(problem.eq_constraints[j],
                                 "equality " + std::to_string(j)));
  }
  return report;
}

namespace {

ScalarFunction divide_by_monomial(ScalarFunction lhs, gp::Monomial m) {
  ScalarFunction f;
  f.structure = lhs.structure;  // monomial quotients preserve the class
  f.name = lhs.name;
  f.eval = [lhs = std::move(lhs), m = std::move(m)](const Vector& x,
                                                    double& value, Vector* grad) {
    double lhs_value = 0.0;
    Vector lhs_grad;
    lhs.eval(x, lhs_value, grad != nullptr ? &lhs_grad : nullptr);
    Vector m_grad;
    const double m_value =
        gp::eval_monomial(m, x, grad != nullptr ? &m_grad : nullptr);
    value = lhs_value / m_value;
    if (grad != nullptr) {
      *grad = (lhs_grad - value * m_grad) / m_value;
    }
  };
  return f;
}

ScalarFunction scale_by_constant(ScalarFunction lhs, double rhs) {
  if (rhs == 1.0) return lhs;
  ScalarFunction f;
  f.structure = lhs.structure;
  f.name = lhs.name;
  f.eval = [lhs = std::move(lhs), rhs](const Vector& x, double& value,
                                       Vector* grad) {
    lhs.eval(x, value, grad);
    value /= rhs;
    if (grad != nullptr) *grad /= rhs;
  };
  return f;
}

ScalarFunction shift_by(ScalarFunction lhs, double delta) {
  ScalarFunction f;
  // Adding a positive constant turns a monomial into a two-term posynomial.
  f.structure = lhs.structure == StructureClass::Monomial
                    ? StructureClass::Posynomial
                    : lhs.structure;
  f.name = lhs.name;
  f.eval = [lhs = std::move(lhs), delta](const Vector& x, double& value,
                                         Vector* grad) {
    lhs.eval(x, value, grad);
    value += delta;
  };
  return f;
}

}  // namespace

Problem construct_standard_form(const RawProblemDescription& desc) {
  Problem problem;
  problem.n_vars = desc.n_vars;
  problem.objective = desc.objective;
  if (desc.lower_bounds.has_value()) {
    if (desc.lower_bounds->size() != desc.n_vars) {
      throw DimensionMismatch("lower bound vector has wrong dimension");
    }
    problem.lower_bounds = *desc.lower_bounds;
  } else {
    problem.lower_bounds = Vector::Constant(desc.n_vars, kDefaultVariableFloor);
  }
  problem.variable_names = desc.variable_names;
  if (problem.variable_names.empty()) {
    for (int i = 0; i < desc.n_vars; ++i) {
      problem.variable_names.push_back("x" + std::to_string(i + 1));
    }
  }

  for (const auto& constraint : desc.constraints) {
    ScalarFunction normalized;
    if (constraint.rhs_term.has_value()) {
      normalized = divide_by_monomial(constraint.lhs, *constraint.rhs_term);
    } else if (constraint.rhs > 0.0) {
      normalized = scale_by_constant(constraint.lhs, constraint.rhs);
    } else {
      // lhs <= rhs with rhs <= 0 becomes lhs + (1 - rhs) <= 1. Dividing by a
      // nonpositive constant would flip or destroy the relation, so shift
      // instead; the shift is exact and keeps the left side's structure class
      // apart from promoting monomials to posynomials.
      normalized = shift_by(constraint.lhs, 1.0 - constraint.rhs);
    }
    if (constraint.relation == Relation::LessEqual) {
      problem.ineq_constraints.push_back(std::move(normalized));
    } else {
      problem.eq_constraints.push_back(std::move(normalized));
    }
  }
  return problem;
}

}  // namespace lsqp
