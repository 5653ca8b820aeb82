#include "core/engine.hpp"

#include "core/logspace.hpp"
#include "core/problem.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

namespace lsqp {

namespace {

constexpr double kArmijoC1 = 1e-4;
constexpr double kBacktrackFactor = 0.5;
constexpr int kMaxBacktracks = 25;
constexpr double kPenaltyGrowth = 1.1;
constexpr double kFeasibleShortcutTol = 1e-9;

/// Problem data seen through the lens the algorithm iterates in. For Sqp the
/// canonical point v is x itself and residuals are g - 1 / h - 1; for Lsqp
/// v = log x and residuals are log g / log h.
struct CanonicalEval {
  Vector v;
  Evaluation eval;
  double phi{0.0};
  Vector grad_phi;
  Vector r_g;
  Matrix J_g;
  Vector r_h;
  Matrix J_h;
};

CanonicalEval make_canonical(const Problem& problem, Algorithm algorithm,
                             const Vector& x) {
  CanonicalEval ce;
  ce.eval = evaluate_point(problem, x);
  if (algorithm == Algorithm::Sqp) {
    ce.v = x;
    ce.phi = ce.eval.f;
    ce.grad_phi = ce.eval.grad_f;
    ce.r_g = ce.eval.g.array() - 1.0;
    ce.J_g = ce.eval.grad_g;
    ce.r_h = ce.eval.h.array() - 1.0;
    ce.J_h = ce.eval.grad_h;
  } else {
    LogEvaluation lev = log_transform(problem, ce.eval);
    ce.v = std::move(lev.y);
    ce.phi = lev.log_f;
    ce.grad_phi = std::move(lev.log_grad_f);
    ce.r_g = std::move(lev.log_g);
    ce.J_g = std::move(lev.log_grad_g);
    ce.r_h = std::move(lev.log_h);
    ce.J_h = std::move(lev.log_grad_h);
  }
  return ce;
}

[[nodiscard]] double l1_violation(const Vector& r_g, const Vector& r_h) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < r_g.size(); ++i) v += std::max(0.0, r_g[i]);
  for (Eigen::Index j = 0; j < r_h.size(); ++j) v += std::abs(r_h[j]);
  return v;
}

[[nodiscard]] double merit_of(const CanonicalEval& ce, double penalty) {
  return ce.phi + penalty * l1_violation(ce.r_g, ce.r_h);
}

/// Worst violation of the standard-form constraints at a user-space point.
[[nodiscard]] double user_violation(const Evaluation& eval) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < eval.g.size(); ++i) {
    v = std::max(v, eval.g[i] - 1.0);
  }
  for (Eigen::Index j = 0; j < eval.h.size(); ++j) {
    v = std::max(v, std::abs(eval.h[j] - 1.0));
  }
  return v;
}

/// Shared driver for both algorithms. The multiplier vector is laid out as
/// [inequalities, equalities, lower bounds]; bound slots without a usable
/// bound row (nonpositive bound in log space) stay pinned at zero.
class Driver {
 public:
  Driver(const Problem& problem, Algorithm algorithm,
         const SolverOptions& options)
      : problem_(problem), algorithm_(algorithm), options_(options) {
    n_ = problem.n_vars;
    n_ineq_ = static_cast<int>(problem.ineq_constraints.size());
    n_eq_ = static_cast<int>(problem.eq_constraints.size());
  }

  SolveResult run(const Vector& x0_in) {
    Vector x0 = x0_in.cwiseMax(problem_.lower_bounds);

    for (int i = 0; i < n_; ++i) {
      const double lb = problem_.lower_bounds[i];
      if (algorithm_ == Algorithm::Sqp) {
        bound_rows_.push_back(i);
        bound_levels_.push_back(lb);
      } else if (lb > 0.0) {
        bound_rows_.push_back(i);
        bound_levels_.push_back(std::log(lb));
      }
    }

    CanonicalEval ce;
    try {
      ce = make_canonical(problem_, algorithm_, x0);
    } catch (const TransformFailure& e) {
      return initial_transform_failure(evaluate_point(problem_, x0), e.what());
    }

    double penalty = options_.merit_penalty_init;
    Vector mu = Vector::Zero(n_ineq_ + n_eq_ + n_);
    mu.head(n_ineq_ + n_eq_).setOnes();
    for (size_t r = 0; r < bound_rows_.size(); ++r) {
      mu[n_ineq_ + n_eq_ + bound_rows_[r]] = 1.0;
    }

    SolveResult res;
    res.trace.push_back(record_of(ce, penalty, 0.0));

    // A point that is already feasible and stationary needs no multiplier
    // estimate; report it as converged without entering the loop.
    if (user_violation(ce.eval) <= kFeasibleShortcutTol &&
        ce.grad_phi.lpNorm<Eigen::Infinity>() <
            options_.eps_grad_lagrangian) {
      mu.setZero();
      return finish(std::move(res), ce, mu, Termination::GradLagrangian, "");
    }

    Matrix B = Matrix::Identity(n_, n_);
    for (int k = 0; k < options_.max_iterations; ++k) {
      const double viol = l1_violation(ce.r_g, ce.r_h);
      QpData qp = assemble(ce, B, k);
      QpSolution sol;
      std::string why;
      if (!solve_with_fallback(qp, penalty, viol, sol, why)) {
        B.setIdentity();
        qp = assemble(ce, B, k);
        if (!solve_with_fallback(qp, penalty, viol, sol, why)) {
          return finish(std::move(res), ce, mu, Termination::LineSearchFailure,
                        "QP subproblem failed: " + why);
        }
      }

      const Vector& d = sol.d;
      const Vector mu_qp = gather_multipliers(sol);

      const double merit0 = ce.phi + penalty * viol;
      const double slope =
          ce.grad_phi.dot(d) + penalty * (merit_lin_residual(qp, d) - viol);

      std::optional<CanonicalEval> trial;
      auto merit_fn = [&](const Vector& v_trial) -> double {
        trial.reset();
        const Vector x_trial = algorithm_ == Algorithm::Sqp
                                   ? v_trial
                                   : Vector(v_trial.array().exp());
        try {
          CanonicalEval next = make_canonical(problem_, algorithm_, x_trial);
          const double m = merit_of(next, penalty);
          trial = std::move(next);
          return m;
        } catch (const TransformFailure&) {
          if (!options_.enforce_positivity_in_linesearch) throw;
          return std::numeric_limits<double>::infinity();
        } catch (const NonFiniteEvaluation&) {
          return std::numeric_limits<double>::infinity();
        } catch (const std::invalid_argument&) {
          return std::numeric_limits<double>::infinity();
        }
      };

      LineSearchResult ls;
      try {
        ls = armijo_line_search(merit_fn, ce.v, merit0, d, slope);
      } catch (const TransformFailure& e) {
        return finish(std::move(res), ce, mu, Termination::TransformFailure,
                      e.what());
      }
      if (!ls.accepted) {
        return finish(std::move(res), ce, mu, Termination::LineSearchFailure,
                      "no acceptable step within 25 backtracks");
      }

      CanonicalEval ce_next = std::move(*trial);
      const Vector s = ls.alpha * d;
      mu += ls.alpha * (mu_qp - mu);

      const Vector gl_next = grad_lagrangian(ce_next, mu);
      const Vector gl_curr = grad_lagrangian(ce, mu);
      res.trace.push_back(record_of(ce_next, penalty, s.norm()));

      const double gl_norm = gl_next.lpNorm<Eigen::Infinity>();
      if (gl_norm < options_.eps_grad_lagrangian) {
        return finish(std::move(res), ce_next, mu,
                      Termination::GradLagrangian, "");
      }
      if (s.norm() < options_.eps_step) {
        return finish(std::move(res), ce_next, mu, Termination::SmallStep, "");
      }

      const Vector y_pair = gl_next - gl_curr;
      damped_bfgs_update(B, s, y_pair);
      ce = std::move(ce_next);
    }
    return finish(std::move(res), ce, mu, Termination::MaxIter,
                  "iteration budget exhausted");
  }

 private:
  [[nodiscard]] IterationRecord record_of(const CanonicalEval& ce,
                                          double penalty,
                                          double step_norm) const {
    IterationRecord rec;
    rec.x = ce.eval.x;
    rec.f = ce.eval.f;
    rec.merit = merit_of(ce, penalty);
    rec.step_norm = step_norm;
    rec.constraint_violation = l1_violation(ce.r_g, ce.r_h);
    rec.penalty = penalty;
    return rec;
  }

  [[nodiscard]] Vector grad_lagrangian(const CanonicalEval& ce,
                                       const Vector& mu) const {
    Vector gl = ce.grad_phi;
    if (n_ineq_ > 0) gl += ce.J_g.transpose() * mu.head(n_ineq_);
    if (n_eq_ > 0) gl += ce.J_h.transpose() * mu.segment(n_ineq_, n_eq_);
    gl -= mu.tail(n_);
    return gl;
  }

  [[nodiscard]] QpData assemble(const CanonicalEval& ce, const Matrix& B,
                                int k) const {
    const int n_bound = static_cast<int>(bound_rows_.size());
    const bool trusted =
        k < static_cast<int>(options_.trust_fractions.size());
    const double t = trusted ? options_.trust_fractions[static_cast<size_t>(k)]
                             : 0.0;
    int n_trust = 0;
    if (trusted) {
      n_trust = algorithm_ == Algorithm::Sqp ? 2 * n_
                                             : (t < 1.0 ? 2 * n_ : n_);
    }

    QpData qp;
    qp.H = B;
    qp.c = ce.grad_phi;
    qp.A_ineq = Matrix::Zero(n_ineq_ + n_bound + n_trust, n_);
    qp.b_ineq = Vector::Zero(n_ineq_ + n_bound + n_trust);
    if (n_ineq_ > 0) {
      qp.A_ineq.topRows(n_ineq_) = ce.J_g;
      qp.b_ineq.head(n_ineq_) = ce.r_g;
    }
    for (int r = 0; r < n_bound; ++r) {
      const int i = bound_rows_[static_cast<size_t>(r)];
      qp.A_ineq(n_ineq_ + r, i) = -1.0;
      qp.b_ineq[n_ineq_ + r] = bound_levels_[static_cast<size_t>(r)] - ce.v[i];
    }
    if (trusted) {
      int row = n_ineq_ + n_bound;
      for (int i = 0; i < n_; ++i) {
        if (algorithm_ == Algorithm::Sqp) {
          qp.A_ineq(row, i) = 1.0;
          qp.b_ineq[row++] = -t * ce.v[i];
          qp.A_ineq(row, i) = -1.0;
          qp.b_ineq[row++] = -t * ce.v[i];
        } else {
          qp.A_ineq(row, i) = 1.0;
          qp.b_ineq[row++] = -std::log1p(t);
          if (t < 1.0) {
            qp.A_ineq(row, i) = -1.0;
            qp.b_ineq[row++] = std::log1p(-t);
          }
        }
      }
    }
    qp.A_eq = ce.J_h;
    qp.b_eq = ce.r_h;
    qp.n_soft_ineq = n_ineq_;
    return qp;
  }

  /// Merit-visible violation left by the step d in the linearized model:
  /// positive parts of the soft inequality rows plus absolute equality
  /// residuals. Hard rows (bounds, trust region) do not enter the merit.
  [[nodiscard]] static double merit_lin_residual(const QpData& qp,
                                                 const Vector& d) {
    double r = 0.0;
    for (int i = 0; i < qp.n_soft_ineq; ++i) {
      r += std::max(0.0, qp.A_ineq.row(i).dot(d) + qp.b_ineq[i]);
    }
    for (Eigen::Index j = 0; j < qp.A_eq.rows(); ++j) {
      r += std::abs(qp.A_eq.row(j).dot(d) + qp.b_eq[j]);
    }
    return r;
  }

  /// Decides whether a subproblem solution is accurate enough to hand to the
  /// line search. Stationarity slop is measured against the terms that make
  /// it up. Feasibility slop is measured in merit units: the penalty
  /// multiplies whatever linearized violation the step leaves behind, so the
  /// defect must stay small next to the decrease the step promises.
  [[nodiscard]] static bool trustworthy(const QpData& qp,
                                        const QpSolution& sol, double penalty,
                                        double viol, bool check_feasibility) {
    const Vector hd = qp.H * sol.d;
    Vector pull = Vector::Zero(sol.d.size());
    if (qp.A_ineq.rows() > 0) pull += qp.A_ineq.transpose() * sol.mu_ineq;
    if (qp.A_eq.rows() > 0) pull += qp.A_eq.transpose() * sol.mu_eq;
    const double stat = (hd + qp.c + pull).lpNorm<Eigen::Infinity>();
    const double stat_scale = 1.0 + hd.lpNorm<Eigen::Infinity>() +
                              qp.c.lpNorm<Eigen::Infinity>() +
                              pull.lpNorm<Eigen::Infinity>();
    if (stat > 1e-6 * stat_scale) return false;

    if (check_feasibility) {
      const double defect = penalty * merit_lin_residual(qp, sol.d);
      const double descent = std::max(0.0, -(qp.c.dot(sol.d) - penalty * viol));
      const double floor = 1e-10 * penalty * (1.0 + viol) +
                           1e-12 * (1.0 + std::abs(qp.c.dot(sol.d)));
      if (defect > 0.5 * descent + floor) return false;
    }
    return true;
  }

  /// Penalty for the upcoming line search: at least a margin above the
  /// multipliers of the merit-visible rows so the step is a descent
  /// direction, decaying halfway toward that level when the multipliers
  /// shrink, so one early spike cannot pin the merit to an excessive penalty.
  [[nodiscard]] double next_penalty(double penalty, const QpData& qp,
                                    const QpSolution& sol) const {
    double mu_merit = 0.0;
    if (qp.n_soft_ineq > 0) {
      mu_merit = sol.mu_ineq.head(qp.n_soft_ineq).lpNorm<Eigen::Infinity>();
    }
    if (sol.mu_eq.size() > 0) {
      mu_merit = std::max(mu_merit, sol.mu_eq.lpNorm<Eigen::Infinity>());
    }
    const double need = kPenaltyGrowth * mu_merit;
    return std::max({options_.merit_penalty_init, need,
                     0.5 * (penalty + need)});
  }

  bool solve_with_fallback(const QpData& qp, double& penalty, double viol,
                           QpSolution& out, std::string& why) const {
    try {
      out = solve_qp(qp);
      if (out.status == QpStatus::Optimal) {
        const double pen = next_penalty(penalty, qp, out);
        if (trustworthy(qp, out, pen, viol, true)) {
          penalty = pen;
          return true;
        }
        why = "subproblem solution failed the accuracy check";
        return false;
      }
      if (out.status == QpStatus::Infeasible) {
        out = solve_qp_elastic(qp, penalty);
        if (out.status == QpStatus::Optimal) {
          // The relaxation leaves real residuals on the soft rows; they are
          // credited in the merit slope, so feasibility is not gated here.
          // An exact relaxed optimum always descends, so an uphill slope
          // estimate exposes an inaccurate solve.
          const double pen = next_penalty(penalty, qp, out);
          const double slope_est =
              qp.c.dot(out.d) +
              pen * (merit_lin_residual(qp, out.d) - viol);
          if (trustworthy(qp, out, pen, viol, false) &&
              slope_est <= 1e-12 * (1.0 + pen * viol)) {
            penalty = pen;
            return true;
          }
          why = "subproblem solution failed the accuracy check";
          return false;
        }
        why = "elastic relaxation did not reach optimality";
        return false;
      }
      why = "active-set iteration limit";
      return false;
    } catch (const NumericalBreakdown& e) {
      why = e.what();
      return false;
    }
  }

  [[nodiscard]] Vector gather_multipliers(const QpSolution& sol) const {
    Vector mu = Vector::Zero(n_ineq_ + n_eq_ + n_);
    if (n_ineq_ > 0) mu.head(n_ineq_) = sol.mu_ineq.head(n_ineq_);
    if (n_eq_ > 0) mu.segment(n_ineq_, n_eq_) = sol.mu_eq;
    for (size_t r = 0; r < bound_rows_.size(); ++r) {
      mu[n_ineq_ + n_eq_ + bound_rows_[r]] =
          sol.mu_ineq[n_ineq_ + static_cast<Eigen::Index>(r)];
    }
    return mu;
  }

  SolveResult finish(SolveResult res, const CanonicalEval& ce,
                     const Vector& mu, Termination termination,
                     std::string detail) const {
    res.x_final = ce.eval.x;
    res.f_final = ce.eval.f;
    res.iterations = static_cast<int>(res.trace.size()) - 1;
    res.termination = termination;
    res.multipliers = mu;
    res.grad_lagrangian_norm =
        grad_lagrangian(ce, mu).lpNorm<Eigen::Infinity>();
    res.max_violation = user_violation(ce.eval);
    res.detail = std::move(detail);
    return res;
  }

  SolveResult initial_transform_failure(Evaluation ev0,
                                        std::string detail) const {
    SolveResult res;
    res.x_final = ev0.x;
    res.f_final = ev0.f;
    res.iterations = 0;
    res.termination = Termination::TransformFailure;
    IterationRecord rec;
    rec.x = ev0.x;
    rec.f = ev0.f;
    rec.merit = std::numeric_limits<double>::quiet_NaN();
    rec.constraint_violation = user_violation(ev0);
    rec.penalty = options_.merit_penalty_init;
    res.trace.push_back(std::move(rec));
    res.multipliers = Vector::Zero(n_ineq_ + n_eq_ + n_);
    res.grad_lagrangian_norm = std::numeric_limits<double>::quiet_NaN();
    res.max_violation = user_violation(ev0);
    res.detail = std::move(detail);
    return res;
  }

  const Problem& problem_;
  Algorithm algorithm_;
  const SolverOptions& options_;
  int n_{0};
  int n_ineq_{0};
  int n_eq_{0};
  std::vector<int> bound_rows_;
  std::vector<double> bound_levels_;  // canonical-space bound values
};

}  // namespace

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::GradLagrangian: return "GradLagrangian";
    case Termination::SmallStep: return "SmallStep";
    case Termination::MaxIter: return "MaxIter";
    case Termination::LineSearchFailure: return "LineSearchFailure";
    case Termination::TransformFailure: return "TransformFailure";
  }
  return "Unknown";
}

std::string algorithm_name(Algorithm a) {
  return a == Algorithm::Sqp ? "sqp" : "lsqp";
}

QpData build_subproblem(const Evaluation& eval, const Matrix& B) {
  QpData qp;
  qp.H = B;
  qp.c = eval.grad_f;
  qp.A_ineq = eval.grad_g;
  qp.b_ineq = eval.g.array() - 1.0;
  qp.A_eq = eval.grad_h;
  qp.b_eq = eval.h.array() - 1.0;
  qp.n_soft_ineq = static_cast<int>(eval.g.size());
  return qp;
}

LineSearchResult armijo_line_search(
    const std::function<double(const Vector&)>& merit_fn, const Vector& v,
    double merit0, const Vector& d, double directional_derivative) {
  const double slope = std::min(directional_derivative, 0.0);
  // Allow rounding-level non-decrease so that near-stationary points, where
  // any representable step changes the merit by at most a few ulps, resolve
  // as small steps instead of line-search failures.
  const double noise_floor = 1e-14 * (1.0 + std::abs(merit0));
  double alpha = 1.0;
  for (int trial = 0; trial <= kMaxBacktracks; ++trial) {
    const double m = merit_fn(v + alpha * d);
    if (std::isfinite(m) &&
        m <= merit0 + kArmijoC1 * alpha * slope + noise_floor) {
      return LineSearchResult{true, alpha, m};
    }
    alpha *= kBacktrackFactor;
  }
  return LineSearchResult{false, 0.0, merit0};
}

BfgsOutcome damped_bfgs_update(Matrix& B, const Vector& s, const Vector& y) {
  if (!s.allFinite() || !y.allFinite()) return BfgsOutcome::Skipped;
  const Vector Bs = B * s;
  const double sBs = s.dot(Bs);
  if (!(sBs > 1e-14)) return BfgsOutcome::Skipped;
  const double sy = s.dot(y);
  double theta = 1.0;
  if (sy < 0.2 * sBs) theta = 0.8 * sBs / (sBs - sy);
  const Vector r = theta * y + (1.0 - theta) * Bs;
  const double sr = s.dot(r);
  if (!(sr > 1e-14)) return BfgsOutcome::Skipped;
  Matrix updated =
      B - (Bs * Bs.transpose()) / sBs + (r * r.transpose()) / sr;
  if (!updated.allFinite()) return BfgsOutcome::Skipped;
  B = 0.5 * (updated + updated.transpose());
  return BfgsOutcome::Updated;
}

SolveResult solve(const Problem& problem, Algorithm algorithm,
                  const Vector& x0, const SolverOptions& options) {
  if (x0.size() != problem.n_vars) {
    throw DimensionMismatch("initial point has wrong dimension");
  }
  return Driver(problem, algorithm, options).run(x0);
}

SolveResult solve_sqp(const Problem& problem, const Vector& x0,
                      const SolverOptions& options) {
  return solve(problem, Algorithm::Sqp, x0, options);
}

SolveResult solve_lsqp(const Problem& problem, const Vector& x0,
                       const SolverOptions& options) {
  return solve(problem, Algorithm::Lsqp, x0, options);
}

}  // namespace lsqp
