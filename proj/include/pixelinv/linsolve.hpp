#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <span>
#include <stdexcept>
#include <vector>

namespace pixelinv {

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0 selects 10 * N
};

struct SolveReport {
  Eigen::VectorXd solution;
  int iterations = 0;
  double residual_norm = 0.0;  // ||B x - y||_2 / ||y||_2
  bool converged = false;
};

class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const SolveReport& report);
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Jacobi-preconditioned conjugate gradients for one SPD matrix. The
/// preconditioner is built once; every call to solve() is counted.
class SpdSolver {
 public:
  SpdSolver(const Eigen::SparseMatrix<double>& matrix, SolverOptions options);

  /// Never throws on non-convergence; inspect SolveReport::converged.
  SolveReport solve(const Eigen::VectorXd& rhs) const;

  int solve_count() const { return solve_count_; }
  int size() const { return static_cast<int>(inv_diag_.size()); }

 private:
  const Eigen::SparseMatrix<double>& matrix_;
  Eigen::VectorXd inv_diag_;
  double tol_;
  int max_iter_;
  mutable int solve_count_ = 0;
};

/// Throws SolveError if the relative residual does not reach tol.
SolveReport solve_spd(const Eigen::SparseMatrix<double>& matrix,
                      const Eigen::VectorXd& rhs, SolverOptions options = {});

/// One report per right-hand side; failures are flagged per report.
std::vector<SolveReport> solve_multi(const Eigen::SparseMatrix<double>& matrix,
                                     std::span<const Eigen::VectorXd> rhs,
                                     SolverOptions options = {});

}  // namespace pixelinv
