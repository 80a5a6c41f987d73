#include "pixelinv/forward.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pixelinv {

namespace {

void check_positive(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      throw std::invalid_argument("Sigma: entry " + std::to_string(i) +
                                  " must be positive");
    }
  }
}

void check_dims(const StiffnessSet& set, const Sigma& sigma) {
  if (sigma.size() != set.num_pixels()) {
    throw std::invalid_argument("sigma size does not match pixel count");
  }
}

Eigen::VectorXd solve_or_throw(const SpdSolver& solver,
                               const Eigen::VectorXd& rhs) {
  SolveReport r = solver.solve(rhs);
  if (!r.converged) throw SolveError(r);
  return std::move(r.solution);
}

}  // namespace

Sigma::Sigma(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("Sigma: empty");
  check_positive(values_);
}

Sigma::Sigma(const Eigen::VectorXd& values)
    : Sigma(std::vector<double>(values.data(), values.data() + values.size())) {}

Sigma Sigma::constant(int n, double value) {
  return Sigma(std::vector<double>(static_cast<std::size_t>(n), value));
}

Sigma Sigma::with(int i, double value) const {
  std::vector<double> v = values_;
  v.at(static_cast<std::size_t>(i)) = value;
  return Sigma(std::move(v));
}

Eigen::MatrixXd JacobianStack::flatten() const {
  const int m = num_functionals();
  Eigen::MatrixXd out(m * m, num_pixels());
  for (int i = 0; i < num_pixels(); ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) out(j * m + k, i) = slices[i](j, k);
    }
  }
  return out;
}

SingleMeasurement forward_single(const StiffnessSet& set, const Sigma& sigma,
                                 const LoadVector& y_l, const LoadVector& y_r,
                                 SolverOptions options) {
  check_dims(set, sigma);
  const SparseMatrix b = global_matrix(set, sigma.values());
  SpdSolver solver(b, options);
  const Eigen::VectorXd lambda_l = solve_or_throw(solver, y_l.y);
  const Eigen::VectorXd lambda_r = solve_or_throw(solver, y_r.y);

  SingleMeasurement out;
  out.value = lambda_l.dot(y_r.y);
  out.gradient.resize(set.num_pixels());
  for (int i = 0; i < set.num_pixels(); ++i) {
    out.gradient[i] = -lambda_l.dot(set.pixel_matrices[i] * lambda_r);
  }
  out.solves = solver.solve_count();
  return out;
}

MatrixMeasurement forward_matrix(const StiffnessSet& set, const Sigma& sigma,
                                 std::span<const LoadVector> loads,
                                 SolverOptions options) {
  check_dims(set, sigma);
  if (loads.empty()) throw std::invalid_argument("forward_matrix: m must be >= 1");
  const int m = static_cast<int>(loads.size());
  const int n_free = set.num_free;

  const SparseMatrix b = global_matrix(set, sigma.values());
  SpdSolver solver(b, options);
  Eigen::MatrixXd lambda(n_free, m);
  Eigen::MatrixXd y(n_free, m);
  for (int j = 0; j < m; ++j) {
    y.col(j) = loads[j].y;
    lambda.col(j) = solve_or_throw(solver, loads[j].y);
  }

  MatrixMeasurement out;
  // F_{j,k} = l_k(u^{l_j}) = (lambda_j)^T y_k
  out.values = lambda.transpose() * y;
  out.jacobian.slices.reserve(set.num_pixels());
  for (const SparseMatrix& bi : set.pixel_matrices) {
    const Eigen::MatrixXd w = bi * lambda;
    out.jacobian.slices.push_back(-(lambda.transpose() * w));
  }
  out.solves = solver.solve_count();
  return out;
}

PairMeasurement forward_pairs(const StiffnessSet& set, const Sigma& sigma,
                              std::span<const LoadVector> loads,
                              std::span<const std::pair<int, int>> pairs,
                              bool with_jacobian, SolverOptions options) {
  check_dims(set, sigma);
  const int m = static_cast<int>(loads.size());
  for (const auto& [l, r] : pairs) {
    if (l < 0 || l >= m || r < 0 || r >= m) {
      throw std::invalid_argument("forward_pairs: functional index out of range");
    }
  }

  const SparseMatrix b = global_matrix(set, sigma.values());
  SpdSolver solver(b, options);
  std::vector<Eigen::VectorXd> lambda(m);
  auto ensure = [&](int j) {
    if (lambda[j].size() == 0) lambda[j] = solve_or_throw(solver, loads[j].y);
  };

  PairMeasurement out;
  out.values.resize(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    ensure(pairs[p].first);
    out.values[p] = lambda[pairs[p].first].dot(loads[pairs[p].second].y);
  }
  if (with_jacobian) {
    out.jacobian.resize(static_cast<Eigen::Index>(pairs.size()),
                        set.num_pixels());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      ensure(pairs[p].second);
      const Eigen::VectorXd& ll = lambda[pairs[p].first];
      const Eigen::VectorXd& lr = lambda[pairs[p].second];
      for (int i = 0; i < set.num_pixels(); ++i) {
        out.jacobian(p, i) = -ll.dot(set.pixel_matrices[i] * lr);
      }
    }
  }
  out.solves = solver.solve_count();
  return out;
}

Eigen::MatrixXd directional_derivative(const JacobianStack& jacobian,
                                       std::span<const double> tau) {
  if (static_cast<int>(tau.size()) != jacobian.num_pixels()) {
    throw std::invalid_argument("directional_derivative: size mismatch");
  }
  const int m = jacobian.num_functionals();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    out += tau[i] * jacobian.slices[i];
  }
  return out;
}

ForwardSetup make_setup(int nx, int k, double radius_fraction) {
  PixelGrid grid(nx);
  TriMesh mesh = build_mesh(grid, k);
  StiffnessSet stiffness = assemble_pixel_matrices(mesh, grid);
  std::vector<DiskSpec> disks = standard_disk_layout(mesh, grid, radius_fraction);
  std::vector<LoadVector> loads = assemble_loads(mesh, disks);
  return {grid, std::move(mesh), std::move(stiffness), std::move(disks),
          std::move(loads)};
}

ForwardSetup refine_setup(const ForwardSetup& base, int k_fine) {
  TriMesh fine = build_mesh(base.grid, k_fine);
  std::vector<DiskSpec> disks;
  disks.reserve(base.disks.size());
  for (const DiskSpec& d : base.disks) {
    disks.push_back(transfer_disk(base.mesh, d, fine));
  }
  StiffnessSet stiffness = assemble_pixel_matrices(fine, base.grid);
  std::vector<LoadVector> loads = assemble_loads(fine, disks);
  return {base.grid, std::move(fine), std::move(stiffness), std::move(disks),
          std::move(loads)};
}

Eigen::MatrixXd true_reference(const ForwardSetup& base, const Sigma& sigma,
                               int k_max, SolverOptions options) {
  const int k = base.mesh.k;
  if (k_max < k || k_max % k != 0 || ((k_max / k) & (k_max / k - 1)) != 0) {
    throw std::invalid_argument(
        "true_reference: k_max must be k times a power of two");
  }
  const ForwardSetup fine = refine_setup(base, k_max);
  return forward_matrix(fine.stiffness, sigma, fine.loads, options).values;
}

}  // namespace pixelinv
