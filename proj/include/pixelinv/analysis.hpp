#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pixelinv/forward.hpp"

namespace pixelinv {

// --- Loewner-order utilities -------------------------------------------------

/// Smallest eigenvalue of a (numerically) symmetric matrix. Throws
/// std::invalid_argument if the asymmetry exceeds 1e-9 * max(1, |A|_max).
double loewner_min_eig(const Eigen::MatrixXd& a);

/// True iff A - B is positive semidefinite up to -tol.
bool loewner_geq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double tol);

// --- Conditioning ------------------------------------------------------------

struct SpectralReport {
  Eigen::VectorXd singular_values;  // descending
  double condition = 0.0;           // sigma_max / sigma_min
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
};

class RankDeficientError : public std::runtime_error {
 public:
  explicit RankDeficientError(SpectralReport report);
  const SpectralReport& report() const { return report_; }

 private:
  SpectralReport report_;
};

/// sigma_min below this fraction of sigma_max counts as rank-deficient.
inline constexpr double kRankTolerance = 1e-14;

/// Full SVD of a #measurements x n Jacobian. Throws RankDeficientError when
/// sigma_min <= kRankTolerance * sigma_max.
SpectralReport condition_number(const Eigen::MatrixXd& jacobian);
SpectralReport condition_number(const JacobianStack& jacobian);

// --- Residual functional -----------------------------------------------------

/// Which measurements make up the data vector.
struct MeasurementLayout {
  /// Empty means the symmetric layout: all m*m pairs, flattened row-major.
  std::vector<std::pair<int, int>> pairs;

  static MeasurementLayout symmetric() { return {}; }
  static MeasurementLayout of_pairs(std::vector<std::pair<int, int>> p) {
    return {std::move(p)};
  }
  bool is_symmetric() const { return pairs.empty(); }
  int size(int m) const {
    return is_symmetric() ? m * m : static_cast<int>(pairs.size());
  }
};

/// R(sigma) = || F(sigma) - data ||^2 for one forward setup. Holds a
/// reference to `setup`, which must outlive the problem.
class ResidualProblem {
 public:
  ResidualProblem(const ForwardSetup& setup, MeasurementLayout layout,
                  Eigen::VectorXd data, SolverOptions options = {});

  /// Data generated by the model itself at `truth`.
  static ResidualProblem exact_data(const ForwardSetup& setup,
                                    MeasurementLayout layout,
                                    const Sigma& truth,
                                    SolverOptions options = {});

  struct Evaluation {
    Eigen::VectorXd values;    // flattened measurements
    Eigen::MatrixXd jacobian;  // #measurements x n, empty if not requested
  };
  Evaluation evaluate(const Sigma& sigma, bool with_jacobian) const;

  const ForwardSetup& setup() const { return *setup_; }
  const MeasurementLayout& layout() const { return layout_; }
  const Eigen::VectorXd& data() const { return data_; }
  int num_pixels() const { return setup_->grid.size(); }

 private:
  const ForwardSetup* setup_;
  MeasurementLayout layout_;
  Eigen::VectorXd data_;
  SolverOptions options_;
};

struct ResidualValue {
  double value = 0.0;
  Eigen::VectorXd gradient;  // 2 J^T (F - data)
};

ResidualValue residual(const ResidualProblem& problem, const Sigma& sigma);

// --- Levenberg-Marquardt -----------------------------------------------------

struct LmOptions {
  int max_iter = 100;
  double lambda0 = 1e-3;
  double sigma_floor = 1e-6;
  int max_rejections = 10;
  /// Search directions: sigma = sigma0 + directions * theta. Empty selects
  /// all pixels.
  Eigen::MatrixXd directions;
  /// Stop once R <= rel_tol^2 * |data|^2.
  double rel_tol = 1e-12;
};

struct LmIterate {
  int iteration = 0;
  double residual = 0.0;
  double lambda = 0.0;
  bool accepted = false;
};

struct LmResult {
  Sigma sigma = Sigma::constant(1);
  double residual = 0.0;
  std::vector<LmIterate> trace;  // entry 0 is the starting point
  int accepted_steps = 0;
  bool converged = false;
  std::string stop_reason;
};

class ReconstructionError : public std::runtime_error {
 public:
  ReconstructionError(const std::string& what, LmResult partial);
  const LmResult& partial() const { return partial_; }

 private:
  LmResult partial_;
};

/// Marquardt-scaled damping (lambda * diag(J^T J)); lambda/3 on accepted
/// steps, lambda*2 on rejected ones. Steps that push any sigma_i below
/// sigma_floor are rejected. Throws ReconstructionError after
/// max_rejections consecutive rejections without convergence.
LmResult reconstruct_lm(const ResidualProblem& problem, const Sigma& sigma0,
                        const LmOptions& options = {});

/// Matrix with one unit column per listed pixel, for LmOptions::directions.
Eigen::MatrixXd pixel_directions(int n, const std::vector<int>& pixels);

}  // namespace pixelinv
