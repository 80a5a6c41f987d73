#include "pixelinv/linsolve.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace pixelinv {

namespace {

std::string describe(const SolveReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "PCG did not converge: relative residual %.3e after %d "
                "iterations",
                r.residual_norm, r.iterations);
  return buf;
}

}  // namespace

SolveError::SolveError(const SolveReport& report)
    : std::runtime_error(describe(report)), report_(report) {}

SpdSolver::SpdSolver(const Eigen::SparseMatrix<double>& matrix,
                     SolverOptions options)
    : matrix_(matrix),
      inv_diag_(matrix.rows()),
      tol_(options.tol),
      max_iter_(options.max_iter > 0 ? options.max_iter
                                     : 10 * static_cast<int>(matrix.rows())) {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("SpdSolver: matrix must be square");
  }
  if (!(tol_ > 0.0)) throw std::invalid_argument("SpdSolver: tol must be > 0");
  const Eigen::VectorXd d = matrix.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      throw std::invalid_argument("SpdSolver: non-positive diagonal entry");
    }
    inv_diag_[i] = 1.0 / d[i];
  }
}

SolveReport SpdSolver::solve(const Eigen::VectorXd& rhs) const {
  ++solve_count_;
  const Eigen::Index n = inv_diag_.size();
  if (rhs.size() != n) {
    throw std::invalid_argument("SpdSolver: right-hand side size mismatch");
  }

  SolveReport report;
  report.solution = Eigen::VectorXd::Zero(n);
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    report.converged = true;
    return report;
  }

  Eigen::VectorXd& x = report.solution;
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z(n), p(n), q(n);
  const double target = tol_ * rhs_norm;

  // The recursive residual drifts from the true one; after it reports
  // convergence the true residual is checked and CG restarts from x if needed.
  while (report.iterations < max_iter_) {
    z = inv_diag_.cwiseProduct(r);
    p = z;
    double rz = r.dot(z);
    while (report.iterations < max_iter_ && r.norm() > target) {
      q.noalias() = matrix_ * p;
      const double alpha = rz / p.dot(q);
      x += alpha * p;
      r -= alpha * q;
      ++report.iterations;
      z = inv_diag_.cwiseProduct(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    r = rhs - matrix_ * x;
    if (r.norm() <= target) break;
  }

  report.residual_norm = (rhs - matrix_ * x).norm() / rhs_norm;
  report.converged = report.residual_norm <= tol_;
  return report;
}

SolveReport solve_spd(const Eigen::SparseMatrix<double>& matrix,
                      const Eigen::VectorXd& rhs, SolverOptions options) {
  SpdSolver solver(matrix, options);
  SolveReport report = solver.solve(rhs);
  if (!report.converged) throw SolveError(report);
  return report;
}

std::vector<SolveReport> solve_multi(const Eigen::SparseMatrix<double>& matrix,
                                     std::span<const Eigen::VectorXd> rhs,
                                     SolverOptions options) {
  SpdSolver solver(matrix, options);
  std::vector<SolveReport> reports;
  reports.reserve(rhs.size());
  for (const auto& y : rhs) reports.push_back(solver.solve(y));
  return reports;
}

}  // namespace pixelinv
