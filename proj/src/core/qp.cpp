#include "core/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <vector>

namespace lsqp {

namespace {

constexpr double kViolationTol = 1e-10;
constexpr double kConsistencyTol = 1e-8;

/// Worst KKT defect of a candidate solution: stationarity, feasibility, and
/// complementarity measured directly against the given problem data.
[[nodiscard]] double kkt_defect(const QpData& qp, const QpSolution& sol) {
  const int n = static_cast<int>(qp.H.rows());
  const int n_ineq = static_cast<int>(qp.A_ineq.rows());
  const int n_eq = static_cast<int>(qp.A_eq.rows());
  const double stat =
      (qp.H * sol.d + qp.c +
       (n_ineq > 0 ? Vector(qp.A_ineq.transpose() * sol.mu_ineq)
                   : Vector(Vector::Zero(n))) +
       (n_eq > 0 ? Vector(qp.A_eq.transpose() * sol.mu_eq)
                 : Vector(Vector::Zero(n))))
          .cwiseAbs()
          .maxCoeff();
  double feas = 0.0;
  double comp = 0.0;
  for (int i = 0; i < n_ineq; ++i) {
    const double resid = qp.A_ineq.row(i).dot(sol.d) + qp.b_ineq[i];
    feas = std::max(feas, resid);
    comp = std::max(comp, std::abs(sol.mu_ineq[i] * resid));
  }
  for (int j = 0; j < n_eq; ++j) {
    feas = std::max(feas, std::abs(qp.A_eq.row(j).dot(sol.d) + qp.b_eq[j]));
  }
  return std::max({stat, feas, comp});
}

/// Dual active-set solver. Constraints are addressed through a unified row
/// index: [0, n_eq) are equalities, [n_eq, n_eq + n_ineq) are inequalities.
class DualActiveSet {
 public:
  explicit DualActiveSet(const QpData& qp) : qp_(qp) {
    n_ = static_cast<int>(qp.H.rows());
    n_ineq_ = static_cast<int>(qp.A_ineq.rows());
    n_eq_ = static_cast<int>(qp.A_eq.rows());
    if (qp.H.cols() != n_ || qp.c.size() != n_ ||
        (n_ineq_ > 0 && qp.A_ineq.cols() != n_) ||
        (n_eq_ > 0 && qp.A_eq.cols() != n_) || qp.b_ineq.size() != n_ineq_ ||
        qp.b_eq.size() != n_eq_) {
      throw DimensionMismatch("inconsistent QP dimensions");
    }
    iter_cap_ = 50 * (n_ + n_ineq_ + n_eq_) + 10;
    active_mask_.assign(static_cast<size_t>(n_eq_ + n_ineq_), false);
  }

  QpSolution run() {
    Eigen::LLT<Matrix> llt(qp_.H);
    if (llt.info() != Eigen::Success) {
      throw NumericalBreakdown("QP Hessian is not positive definite");
    }
    d_ = llt.solve(-qp_.c);

    QpStatus status = QpStatus::Optimal;
    for (int e = 0; e < n_eq_ && status == QpStatus::Optimal; ++e) {
      status = drive_to_active(e);
    }
    while (status == QpStatus::Optimal) {
      const int p = most_violated();
      if (p < 0) break;
      status = drive_to_active(p);
    }
    return extract(status);
  }

 private:
  [[nodiscard]] bool is_eq(int row) const { return row < n_eq_; }

  [[nodiscard]] Vector normal(int row) const {
    return is_eq(row) ? Vector(qp_.A_eq.row(row).transpose())
                      : Vector(qp_.A_ineq.row(row - n_eq_).transpose());
  }

  /// Right-hand side in the internal form a'd <= rhs. Rows arrive encoded as
  /// a'd + b <= 0 (or = 0), so rhs = -b.
  [[nodiscard]] double rhs(int row) const {
    return is_eq(row) ? -qp_.b_eq[row] : -qp_.b_ineq[row - n_eq_];
  }

  /// Roundoff scale of a_p'd - rhs_p.
  [[nodiscard]] double row_scale(const Vector& a_p, double b_p) const {
    return std::max({1.0, std::abs(b_p), a_p.cwiseAbs().dot(d_.cwiseAbs())});
  }

  [[nodiscard]] int most_violated() const {
    int best = -1;
    double best_v = 0.0;
    for (int i = 0; i < n_ineq_; ++i) {
      const int row = n_eq_ + i;
      if (active_mask_[static_cast<size_t>(row)]) continue;
      const double viol = qp_.A_ineq.row(i).dot(d_) + qp_.b_ineq[i];
      if (viol <= 0.0) continue;
      const double scale = std::max(
          {1.0, std::abs(qp_.b_ineq[i]),
           qp_.A_ineq.row(i).cwiseAbs().dot(d_.cwiseAbs().transpose())});
      const double v = viol / scale;
      if (v > kViolationTol && v > best_v * (1.0 + 1e-12)) {
        best_v = v;
        best = row;
      }
    }
    return best;
  }

  /// Assembles the KKT matrix for the current active set and solves
  /// [H N'; N 0] [top; bottom] = [rhs_top; rhs_bottom]. The factored matrix
  /// carries a tiny dual regularization so that it stays well posed when
  /// active normals become nearly dependent, while the refinement iterations
  /// drive the residual of the true, unregularized system down; the data is
  /// equilibrated, so the absolute delta has a uniform meaning.
  void solve_kkt(const Vector& rhs_top, const Vector& rhs_bottom, Vector& top,
                 Vector& bottom) {
    constexpr double kDualRegularization = 1e-12;
    const int m = static_cast<int>(active_.size());
    Matrix K = Matrix::Zero(n_ + m, n_ + m);
    K.topLeftCorner(n_, n_) = qp_.H;
    for (int k = 0; k < m; ++k) {
      const Vector a = normal(active_[static_cast<size_t>(k)]);
      K.block(n_ + k, 0, 1, n_) = a.transpose();
      K.block(0, n_ + k, n_, 1) = a;
    }
    Matrix K_reg = K;
    K_reg.bottomRightCorner(m, m).diagonal().setConstant(-kDualRegularization);
    Vector rhs(n_ + m);
    rhs.head(n_) = rhs_top;
    rhs.tail(m) = rhs_bottom;
    const Eigen::FullPivLU<Matrix> lu(K_reg);
    Vector sol = lu.solve(rhs);
    for (int round = 0; round < 2; ++round) {
      sol += lu.solve(rhs - K * sol);
    }
    top = sol.head(n_);
    bottom = sol.tail(m);
  }

  /// Takes the violated row p into the active set, dropping blocking rows
  /// along the way. Maintains stationarity of the dual iterate throughout.
  QpStatus drive_to_active(int p) {
    const Vector a_p = normal(p);
    const double b_p = rhs(p);
    double resid = a_p.dot(d_) - b_p;
    const double sigma = resid >= 0.0 ? 1.0 : -1.0;
    double mu_new = 0.0;
    Vector z, q;

    while (true) {
      if (++iters_ > iter_cap_) return QpStatus::IterLimit;
      solve_kkt(-sigma * a_p,
                Vector::Zero(static_cast<Eigen::Index>(active_.size())), z, q);
      const double ztHz = z.dot(qp_.H * z);
      const bool primal_possible = ztHz > 1e-12 * std::max(1.0, a_p.squaredNorm());

      if (!primal_possible &&
          std::abs(resid) <= kConsistencyTol * row_scale(a_p, b_p)) {
        return QpStatus::Optimal;  // dependent and already consistent, skip
      }

      const double nu_full = primal_possible
                                 ? std::abs(resid) / ztHz
                                 : std::numeric_limits<double>::infinity();

      double nu_block = std::numeric_limits<double>::infinity();
      int blocker = -1;
      for (size_t k = 0; k < active_.size(); ++k) {
        if (is_eq(active_[k])) continue;  // equality multipliers are free
        const double qk = q[static_cast<Eigen::Index>(k)];
        if (qk < -1e-14) {
          const double nu_k = -mu_active_[k] / qk;
          if (nu_k < nu_block) {
            nu_block = nu_k;
            blocker = static_cast<int>(k);
          }
        }
      }

      if (nu_full == std::numeric_limits<double>::infinity() &&
          blocker < 0) {
        return QpStatus::Infeasible;
      }

      const double nu = std::min(nu_full, nu_block);
      if (primal_possible) {
        d_ += nu * z;
        resid = a_p.dot(d_) - b_p;
      }
      for (size_t k = 0; k < active_.size(); ++k) {
        mu_active_[k] += nu * q[static_cast<Eigen::Index>(k)];
      }
      mu_new += sigma * nu;

      if (nu_full <= nu_block) {
        active_.push_back(p);
        mu_active_.push_back(mu_new);
        active_mask_[static_cast<size_t>(p)] = true;
        return QpStatus::Optimal;
      }
      active_mask_[static_cast<size_t>(active_[static_cast<size_t>(blocker)])] =
          false;
      active_.erase(active_.begin() + blocker);
      mu_active_.erase(mu_active_.begin() + blocker);
    }
  }

  /// Expands the active-set multipliers into full-length vectors and scores
  /// the candidate by its worst KKT defect (stationarity, feasibility,
  /// complementarity).
  [[nodiscard]] QpSolution materialize(const Vector& d,
                                       const std::vector<double>& mu_active,
                                       QpStatus status) const {
    QpSolution out;
    out.status = status;
    out.d = d;
    out.mu_ineq = Vector::Zero(n_ineq_);
    out.mu_eq = Vector::Zero(n_eq_);
    for (size_t k = 0; k < active_.size(); ++k) {
      const int row = active_[k];
      if (is_eq(row)) {
        out.mu_eq[row] = mu_active[k];
      } else {
        out.mu_ineq[row - n_eq_] = std::max(0.0, mu_active[k]);
      }
    }
    out.kkt_residual = kkt_defect(qp_, out);
    return out;
  }

  [[nodiscard]] QpSolution extract(QpStatus status) {
    QpSolution out = materialize(d_, mu_active_, status);
    if (status != QpStatus::Optimal) return out;

    // Re-solve the equality-constrained subproblem defined by the final
    // active set in one shot, replacing the values accumulated over many
    // small dual steps when, and only when, that actually improves the
    // measured KKT defect.
    const int m = static_cast<int>(active_.size());
    Vector b_active(m);
    for (int k = 0; k < m; ++k) {
      b_active[k] = rhs(active_[static_cast<size_t>(k)]);
    }
    Vector d_clean, mu_vec;
    solve_kkt(-qp_.c, b_active, d_clean, mu_vec);
    if (!d_clean.allFinite() || !mu_vec.allFinite()) return out;
    const std::vector<double> mu_clean(mu_vec.data(), mu_vec.data() + m);
    const QpSolution polished = materialize(d_clean, mu_clean, status);
    return polished.kkt_residual < out.kkt_residual ? polished : out;
  }

  const QpData& qp_;
  int n_{0};
  int n_ineq_{0};
  int n_eq_{0};
  int iters_{0};
  int iter_cap_{0};
  Vector d_;
  std::vector<int> active_;
  std::vector<double> mu_active_;
  std::vector<bool> active_mask_;
};

}  // namespace

QpSolution solve_qp(const QpData& qp) {
  // Equilibrate before solving: a symmetric diagonal rescaling brings the
  // Hessian to unit diagonal, and every constraint row is then rescaled to
  // unit norm. Together these make the solver's violation and dependence
  // tolerances mean the same thing for every variable and row regardless of
  // the caller's units. The step and the multipliers are mapped back to the
  // original coordinates afterwards; the substitution d = D d' leaves
  // multipliers untouched, while row scaling divides them by the row norm.
  const int n = static_cast<int>(qp.H.rows());
  const int n_ineq = static_cast<int>(qp.A_ineq.rows());
  const int n_eq = static_cast<int>(qp.A_eq.rows());

  Vector var_scale = Vector::Ones(n);
  for (int i = 0; i < n; ++i) {
    const double h = qp.H(i, i);
    if (h > 0.0 && std::isfinite(h)) var_scale[i] = 1.0 / std::sqrt(h);
  }

  QpData scaled = qp;
  scaled.H = var_scale.asDiagonal() * qp.H * var_scale.asDiagonal();
  scaled.c = var_scale.asDiagonal() * qp.c;
  if (n_ineq > 0) scaled.A_ineq = qp.A_ineq * var_scale.asDiagonal();
  if (n_eq > 0) scaled.A_eq = qp.A_eq * var_scale.asDiagonal();

  Vector s_ineq = Vector::Ones(n_ineq);
  Vector s_eq = Vector::Ones(n_eq);
  for (int i = 0; i < n_ineq; ++i) {
    const double norm = scaled.A_ineq.row(i).norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      s_ineq[i] = norm;
      scaled.A_ineq.row(i) /= norm;
      scaled.b_ineq[i] /= norm;
    }
  }
  for (int j = 0; j < n_eq; ++j) {
    const double norm = scaled.A_eq.row(j).norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      s_eq[j] = norm;
      scaled.A_eq.row(j) /= norm;
      scaled.b_eq[j] /= norm;
    }
  }

  QpSolution sol = DualActiveSet(scaled).run();
  sol.d = var_scale.asDiagonal() * sol.d;
  sol.mu_ineq = sol.mu_ineq.cwiseQuotient(s_ineq);
  sol.mu_eq = sol.mu_eq.cwiseQuotient(s_eq);
  sol.kkt_residual = kkt_defect(qp, sol);
  return sol;
}

QpSolution solve_qp_elastic(const QpData& qp, double penalty) {
  const int n = static_cast<int>(qp.H.rows());
  const int n_ineq = static_cast<int>(qp.A_ineq.rows());
  const int n_eq = static_cast<int>(qp.A_eq.rows());
  const int n_soft =
      qp.n_soft_ineq < 0 ? n_ineq : std::min(qp.n_soft_ineq, n_ineq);
  const int n_slack = n_soft + 2 * n_eq;
  if (n_slack == 0) return solve_qp(qp);
  const int n_ext = n + n_slack;

  QpData ext;
  ext.H = Matrix::Zero(n_ext, n_ext);
  ext.H.topLeftCorner(n, n) = qp.H;
  // Tiny curvature keeps the extended Hessian positive definite; the slack
  // cost is carried by the linear penalty term. Scaling it to the Hessian
  // keeps the extended problem as well conditioned as the original.
  const double slack_curvature =
      1e-8 * std::max(1e-4, qp.H.diagonal().cwiseAbs().mean());
  ext.H.bottomRightCorner(n_slack, n_slack)
      .diagonal()
      .setConstant(slack_curvature);
  ext.c = Vector::Zero(n_ext);
  ext.c.head(n) = qp.c;
  ext.c.tail(n_slack).setConstant(penalty);

  ext.A_ineq = Matrix::Zero(n_ineq + n_slack, n_ext);
  ext.b_ineq = Vector::Zero(n_ineq + n_slack);
  for (int i = 0; i < n_ineq; ++i) {
    ext.A_ineq.block(i, 0, 1, n) = qp.A_ineq.row(i);
    if (i < n_soft) ext.A_ineq(i, n + i) = -1.0;
    ext.b_ineq[i] = qp.b_ineq[i];
  }
  for (int s = 0; s < n_slack; ++s) {
    ext.A_ineq(n_ineq + s, n + s) = -1.0;  // slack nonnegativity
  }
  ext.A_eq = Matrix::Zero(n_eq, n_ext);
  ext.b_eq = qp.b_eq;
  for (int j = 0; j < n_eq; ++j) {
    ext.A_eq.block(j, 0, 1, n) = qp.A_eq.row(j);
    ext.A_eq(j, n + n_soft + j) = -1.0;
    ext.A_eq(j, n + n_soft + n_eq + j) = 1.0;
  }

  const QpSolution ext_sol = solve_qp(ext);
  QpSolution out;
  out.status = ext_sol.status;
  out.d = ext_sol.d.head(n);
  out.mu_ineq = ext_sol.mu_ineq.head(n_ineq);
  out.mu_eq = ext_sol.mu_eq;
  out.kkt_residual = ext_sol.kkt_residual;
  return out;
}

}  // namespace lsqp
