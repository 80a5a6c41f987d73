#include "pixelinv/dense.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace pixelinv {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm2(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index q = 0; q < a.cols(); ++q) {
    for (Eigen::Index p = 0; p < q; ++p) s += 2.0 * a(p, q) * a(p, q);
  }
  return s;
}

}  // namespace

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& input) {
  if (input.rows() != input.cols()) {
    throw std::invalid_argument("symmetric_eigenvalues: matrix must be square");
  }
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  const Eigen::Index n = a.rows();
  const double scale2 = a.squaredNorm();
  const double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= eps * eps * scale2) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with J the (p,q) plane rotation.
        for (Eigen::Index r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  Eigen::VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& input) {
  if (input.rows() < input.cols()) {
    throw std::invalid_argument("singular_values: need rows >= cols");
  }
  Eigen::MatrixXd u = input;
  const Eigen::Index n = u.cols();
  const double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = u.col(i).squaredNorm();
        const double beta = u.col(j).squaredNorm();
        const double gamma = u.col(i).dot(u.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Eigen::VectorXd ui = u.col(i);
        u.col(i) = c * ui - s * u.col(j);
        u.col(j) = s * ui + c * u.col(j);
      }
    }
    if (!rotated) break;
  }

  Eigen::VectorXd sv(n);
  for (Eigen::Index i = 0; i < n; ++i) sv[i] = u.col(i).norm();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  return sv;
}

}  // namespace pixelinv
