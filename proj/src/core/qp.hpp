#pragma once

#include "core/types.hpp"

namespace lsqp {

/// Convex quadratic program
///   minimize    0.5 d'Hd + c'd
///   subject to  A_ineq d + b_ineq <= 0,  A_eq d + b_eq = 0
/// with H symmetric positive definite. Each b entry carries the constraint
/// residual at the linearization point, so feasibility reads a'd + b <= 0.
///
/// n_soft_ineq marks how many leading inequality rows may be relaxed by
/// solve_qp_elastic; -1 means all of them. Rows past that count (variable
/// bounds, trust regions) are always hard.
struct QpData {
  Matrix H;
  Vector c;
  Matrix A_ineq;
  Vector b_ineq;
  Matrix A_eq;
  Vector b_eq;
  int n_soft_ineq{-1};
};

enum class QpStatus { Optimal, Infeasible, IterLimit };

struct QpSolution {
  Vector d;
  Vector mu_ineq;  // one multiplier per inequality row, zero if inactive
  Vector mu_eq;    // equality multipliers, free sign
  QpStatus status{QpStatus::Optimal};
  double kkt_residual{0.0};  // max of stationarity, feasibility, complementarity
};

/// Dual active-set method in the style of Goldfarb and Idnani: start from the
/// unconstrained minimizer and add violated constraints one at a time, taking
/// dual steps that drop blocking rows as needed. Throws NumericalBreakdown
/// when H is not positive definite.
[[nodiscard]] QpSolution solve_qp(const QpData& qp);

/// L1 relaxation of the soft rows: slack variables with linear cost `penalty`
/// absorb any infeasibility among the first n_soft_ineq inequality rows and
/// all equality rows, so the relaxed program is always feasible as long as the
/// hard rows admit d = 0. Returns the step (slacks stripped) and the original
/// rows' multipliers.
[[nodiscard]] QpSolution solve_qp_elastic(const QpData& qp, double penalty);

}  // namespace lsqp
