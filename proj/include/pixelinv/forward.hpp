#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

#include "pixelinv/assembly.hpp"
#include "pixelinv/linsolve.hpp"
#include "pixelinv/mesh.hpp"

namespace pixelinv {

/// Pixelwise diffusivity, strictly positive in every entry.
class Sigma {
 public:
  explicit Sigma(std::vector<double> values);
  explicit Sigma(const Eigen::VectorXd& values);
  static Sigma constant(int n, double value = 1.0);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  Eigen::Map<const Eigen::VectorXd> vector() const {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }

  /// Copy with entry i replaced; throws if value <= 0.
  Sigma with(int i, double value) const;

 private:
  std::vector<double> values_;
};

/// dF/dsigma_i for a symmetric measurement layout; slice i is m x m.
struct JacobianStack {
  std::vector<Eigen::MatrixXd> slices;

  int num_pixels() const { return static_cast<int>(slices.size()); }
  int num_functionals() const {
    return slices.empty() ? 0 : static_cast<int>(slices.front().rows());
  }

  /// (m*m) x n matrix; row j*m + k holds dF_{j,k}/dsigma.
  Eigen::MatrixXd flatten() const;
};

struct SingleMeasurement {
  double value = 0.0;
  Eigen::VectorXd gradient;
  int solves = 0;
};

struct MatrixMeasurement {
  Eigen::MatrixXd values;  // F(sigma), m x m
  JacobianStack jacobian;
  int solves = 0;
};

/// Measurements F_{l_j, r_j} for an arbitrary list of (l, r) index pairs.
struct PairMeasurement {
  Eigen::VectorXd values;
  Eigen::MatrixXd jacobian;  // p x n, empty unless requested
  int solves = 0;
};

/// F_{l,r}(sigma) = (lambda_l)^T y_r and dF/dsigma_i = -(lambda_l)^T B_i lambda_r,
/// from exactly two solves with B_sigma.
SingleMeasurement forward_single(const StiffnessSet& set, const Sigma& sigma,
                                 const LoadVector& y_l, const LoadVector& y_r,
                                 SolverOptions options = {});

/// Symmetric layout: all m*m entries and all n Jacobian slices from m solves.
MatrixMeasurement forward_matrix(const StiffnessSet& set, const Sigma& sigma,
                                 std::span<const LoadVector> loads,
                                 SolverOptions options = {});

/// Non-symmetric layout. Values need one solve per distinct left index; the
/// Jacobian additionally needs the distinct right indices.
PairMeasurement forward_pairs(const StiffnessSet& set, const Sigma& sigma,
                              std::span<const LoadVector> loads,
                              std::span<const std::pair<int, int>> pairs,
                              bool with_jacobian, SolverOptions options = {});

/// F'(sigma) tau = sum_i tau_i * slice_i.
Eigen::MatrixXd directional_derivative(const JacobianStack& jacobian,
                                       std::span<const double> tau);

/// Everything needed to evaluate the forward operator on one mesh.
struct ForwardSetup {
  PixelGrid grid;
  TriMesh mesh;
  StiffnessSet stiffness;
  std::vector<DiskSpec> disks;
  std::vector<LoadVector> loads;
};

/// Mesh, pixel matrices and the standard boundary-pixel disk layout.
ForwardSetup make_setup(int nx, int k, double radius_fraction = 0.25);

/// Rebuilds on a nested refinement with the same disk regions: the disks
/// resolved on `base.mesh` are transferred, not re-resolved, so only the
/// discrete space changes.
ForwardSetup refine_setup(const ForwardSetup& base, int k_fine);

/// F(sigma) on the mesh with refinement k_max, used as a stand-in for the
/// exact-solution operator. k_max must be base.mesh.k times a power of two.
Eigen::MatrixXd true_reference(const ForwardSetup& base, const Sigma& sigma,
                               int k_max, SolverOptions options = {});

}  // namespace pixelinv
