#include "agrotrack/control/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agrotrack/errors.hpp"

namespace agrotrack::control {
namespace {

double max_violation(const QpProblem& qp, const Eigen::VectorXd& x) {
  if (qp.A.rows() == 0) return 0.0;
  return std::max(0.0, (qp.A * x - qp.b).maxCoeff());
}

bool independent_of(const Eigen::MatrixXd& rows, const Eigen::RowVectorXd& candidate) {
  if (rows.rows() == 0) return candidate.norm() > 0.0;
  Eigen::MatrixXd stacked(rows.rows() + 1, rows.cols());
  stacked << rows, candidate;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(stacked);
  lu.setThreshold(1e-10);
  return lu.rank() == stacked.rows();
}

Eigen::MatrixXd working_rows(const QpProblem& qp, const std::vector<int>& w) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(w.size()), qp.H.cols());
  for (std::size_t k = 0; k < w.size(); ++k) rows.row(static_cast<Eigen::Index>(k)) = qp.A.row(w[k]);
  return rows;
}

}  // namespace

double QpSolution::kkt_residual() const { return std::max({stationarity, complementarity, primal_violation}); }

QpSolution solve_qp(const QpProblem& qp, const QpOptions& opt) {
  const Eigen::Index n = qp.H.rows();
  if (qp.H.cols() != n || qp.f.size() != n) fail(ErrorKind::dimension, "solve_qp: H must be n x n and f length n");
  if (qp.A.rows() != qp.b.size() || (qp.A.rows() > 0 && qp.A.cols() != n))
    fail(ErrorKind::dimension, "solve_qp: constraint matrix shape mismatch");

  Eigen::LLT<Eigen::MatrixXd> llt(qp.H);
  if (llt.info() != Eigen::Success) fail(ErrorKind::numerical, "solve_qp: Hessian is not positive definite");

  const double tol = opt.feasibility_tol;
  Eigen::VectorXd x;
  if (qp.feasible_start && max_violation(qp, *qp.feasible_start) <= tol) {
    x = *qp.feasible_start;
  } else if (Eigen::VectorXd u = llt.solve(-qp.f); max_violation(qp, u) <= tol) {
    x = u;
  } else if (Eigen::VectorXd z = Eigen::VectorXd::Zero(n); max_violation(qp, z) <= tol) {
    x = z;
  } else {
    fail(ErrorKind::infeasible, "solve_qp: no feasible starting point");
  }

  const Eigen::Index m = qp.A.rows();
  std::vector<int> work;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(qp.A.row(i).dot(x) - qp.b(i)) <= tol &&
        independent_of(working_rows(qp, work), qp.A.row(i)) && static_cast<Eigen::Index>(work.size()) < n)
      work.push_back(static_cast<int>(i));
  }

  QpSolution sol;
  Eigen::VectorXd lambda_w;
  for (sol.iterations = 0; sol.iterations < opt.max_iterations; ++sol.iterations) {
    const auto nw = static_cast<Eigen::Index>(work.size());
    const Eigen::MatrixXd Aw = working_rows(qp, work);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + nw, n + nw);
    K.topLeftCorner(n, n) = qp.H;
    K.topRightCorner(n, nw) = Aw.transpose();
    K.bottomLeftCorner(nw, n) = Aw;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + nw);
    rhs.head(n) = -(qp.H * x + qp.f);
    const Eigen::VectorXd sln = K.fullPivLu().solve(rhs);
    const Eigen::VectorXd p = sln.head(n);
    lambda_w = sln.tail(nw);

    if (p.norm() <= 1e-12 * (1.0 + x.norm())) {
      if (nw == 0) {
        sol.optimal = true;
        break;
      }
      Eigen::Index worst = 0;
      const double most_negative = lambda_w.minCoeff(&worst);  // first index on ties
      if (most_negative >= -1e-12) {
        sol.optimal = true;
        break;
      }
      work.erase(work.begin() + worst);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::find(work.begin(), work.end(), static_cast<int>(i)) != work.end()) continue;
      const double ap = qp.A.row(i).dot(p);
      if (ap <= 1e-14) continue;
      const double step = std::max(0.0, (qp.b(i) - qp.A.row(i).dot(x)) / ap);
      if (step < alpha) {
        alpha = step;
        blocking = static_cast<int>(i);
      }
    }
    x += alpha * p;
    if (blocking >= 0) {
      work.push_back(blocking);
      std::sort(work.begin(), work.end());
    }
  }

  sol.x = x;
  sol.lambda = Eigen::VectorXd::Zero(m);
  if (sol.optimal)
    for (std::size_t k = 0; k < work.size(); ++k) sol.lambda(work[k]) = std::max(0.0, lambda_w(static_cast<Eigen::Index>(k)));
  sol.active = work;

  Eigen::VectorXd grad = qp.H * x + qp.f;
  if (m > 0) grad += qp.A.transpose() * sol.lambda;
  sol.stationarity = grad.lpNorm<Eigen::Infinity>();
  for (Eigen::Index i = 0; i < m; ++i)
    sol.complementarity = std::max(sol.complementarity, std::abs(sol.lambda(i) * (qp.A.row(i).dot(x) - qp.b(i))));
  sol.primal_violation = max_violation(qp, x);
  return sol;
}

}  // namespace agrotrack::control
