#include "pixelinv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pixelinv/dense.hpp"

namespace pixelinv {

double loewner_min_eig(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw std::invalid_argument("loewner_min_eig: matrix is not symmetric");
  }
  return symmetric_eigenvalues(a)[0];
}

bool loewner_geq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double tol) {
  return loewner_min_eig(a - b) >= -tol;
}

namespace {

std::string rank_message(const SpectralReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "rank-deficient %ldx%ld Jacobian: sigma_min/sigma_max = %.3e",
                static_cast<long>(r.rows), static_cast<long>(r.cols),
                r.singular_values.size() ? r.singular_values.tail(1)[0] /
                                               r.singular_values[0]
                                         : 0.0);
  return buf;
}

}  // namespace

RankDeficientError::RankDeficientError(SpectralReport report)
    : std::runtime_error(rank_message(report)), report_(std::move(report)) {}

SpectralReport condition_number(const Eigen::MatrixXd& jacobian) {
  if (jacobian.cols() == 0 || jacobian.rows() < jacobian.cols()) {
    throw std::invalid_argument(
        "condition_number: need at least as many rows as columns");
  }
  SpectralReport report;
  report.rows = jacobian.rows();
  report.cols = jacobian.cols();
  report.singular_values = singular_values(jacobian);
  const double smax = report.singular_values[0];
  const double smin = report.singular_values.tail(1)[0];
  if (!(smax > 0.0) || smin <= kRankTolerance * smax) {
    report.condition = std::numeric_limits<double>::infinity();
    throw RankDeficientError(std::move(report));
  }
  report.condition = smax / smin;
  return report;
}

SpectralReport condition_number(const JacobianStack& jacobian) {
  return condition_number(jacobian.flatten());
}

ResidualProblem::ResidualProblem(const ForwardSetup& setup,
                                 MeasurementLayout layout,
                                 Eigen::VectorXd data, SolverOptions options)
    : setup_(&setup),
      layout_(std::move(layout)),
      data_(std::move(data)),
      options_(options) {
  const int m = static_cast<int>(setup.loads.size());
  if (data_.size() != layout_.size(m)) {
    throw std::invalid_argument("ResidualProblem: data size does not match layout");
  }
}

ResidualProblem ResidualProblem::exact_data(const ForwardSetup& setup,
                                            MeasurementLayout layout,
                                            const Sigma& truth,
                                            SolverOptions options) {
  ResidualProblem p(setup, layout,
                    Eigen::VectorXd::Zero(layout.size(
                        static_cast<int>(setup.loads.size()))),
                    options);
  p.data_ = p.evaluate(truth, false).values;
  return p;
}

ResidualProblem::Evaluation ResidualProblem::evaluate(const Sigma& sigma,
                                                      bool with_jacobian) const {
  Evaluation out;
  if (layout_.is_symmetric()) {
    const MatrixMeasurement fm =
        forward_matrix(setup_->stiffness, sigma, setup_->loads, options_);
    const Eigen::Index m = fm.values.rows();
    // Row-major flattening, matching JacobianStack::flatten.
    out.values.resize(m * m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index k = 0; k < m; ++k) out.values[j * m + k] = fm.values(j, k);
    }
    if (with_jacobian) out.jacobian = fm.jacobian.flatten();
  } else {
    PairMeasurement pm = forward_pairs(setup_->stiffness, sigma, setup_->loads,
                                       layout_.pairs, with_jacobian, options_);
    out.values = std::move(pm.values);
    out.jacobian = std::move(pm.jacobian);
  }
  return out;
}

ResidualValue residual(const ResidualProblem& problem, const Sigma& sigma) {
  const auto eval = problem.evaluate(sigma, true);
  const Eigen::VectorXd r = eval.values - problem.data();
  return {r.squaredNorm(), 2.0 * eval.jacobian.transpose() * r};
}

ReconstructionError::ReconstructionError(const std::string& what,
                                         LmResult partial)
    : std::runtime_error(what), partial_(std::move(partial)) {}

Eigen::MatrixXd pixel_directions(int n, const std::vector<int>& pixels) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t c = 0; c < pixels.size(); ++c) d(pixels[c], c) = 1.0;
  return d;
}

LmResult reconstruct_lm(const ResidualProblem& problem, const Sigma& sigma0,
                        const LmOptions& options) {
  const int n = problem.num_pixels();
  if (sigma0.size() != n) {
    throw std::invalid_argument("reconstruct_lm: sigma0 size mismatch");
  }
  const Eigen::MatrixXd dirs = options.directions.size() == 0
                                   ? Eigen::MatrixXd::Identity(n, n)
                                   : options.directions;
  if (dirs.rows() != n) {
    throw std::invalid_argument("reconstruct_lm: directions must have n rows");
  }
  const double stop_level =
      options.rel_tol * options.rel_tol * problem.data().squaredNorm();

  LmResult result;
  result.sigma = sigma0;
  auto eval = problem.evaluate(result.sigma, true);
  Eigen::VectorXd r = eval.values - problem.data();
  result.residual = r.squaredNorm();
  double lambda = options.lambda0;
  result.trace.push_back({0, result.residual, lambda, true});

  int rejections = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    if (result.residual <= stop_level) {
      result.converged = true;
      result.stop_reason = "residual below tolerance";
      return result;
    }
    const Eigen::MatrixXd j = eval.jacobian * dirs;
    const Eigen::MatrixXd a = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    const double diag_floor = 1e-30 + 1e-12 * a.diagonal().maxCoeff();
    Eigen::MatrixXd damped = a;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      damped(i, i) += lambda * std::max(a(i, i), diag_floor);
    }
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    const double predicted = -(2.0 * g.dot(step) + step.dot(a * step));
    if (!(predicted > 1e-14 * result.residual)) {
      result.converged = true;
      result.stop_reason = "no further predicted decrease";
      return result;
    }

    const Eigen::VectorXd candidate = result.sigma.vector() + dirs * step;
    bool accepted = false;
    if (candidate.minCoeff() > options.sigma_floor) {
      const Sigma trial(candidate);
      auto trial_eval = problem.evaluate(trial, true);
      Eigen::VectorXd trial_r = trial_eval.values - problem.data();
      const double trial_res = trial_r.squaredNorm();
      if (trial_res < result.residual) {
        accepted = true;
        result.sigma = trial;
        result.residual = trial_res;
        eval = std::move(trial_eval);
        r = std::move(trial_r);
      }
    }

    if (accepted) {
      lambda /= 3.0;
      rejections = 0;
      ++result.accepted_steps;
    } else {
      lambda *= 2.0;
      if (++rejections >= options.max_rejections) {
        result.trace.push_back({it, result.residual, lambda, false});
        result.stop_reason = "no acceptable step";
        throw ReconstructionError(
            "reconstruct_lm: no acceptable step after " +
                std::to_string(options.max_rejections) + " damping increases",
            std::move(result));
      }
    }
    result.trace.push_back({it, result.residual, lambda, accepted});
  }
  result.stop_reason = "iteration limit";
  result.converged = result.residual <= stop_level;
  return result;
}

}  // namespace pixelinv
