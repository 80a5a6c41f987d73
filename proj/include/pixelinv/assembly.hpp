#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <span>
#include <vector>

#include "pixelinv/mesh.hpp"

namespace pixelinv {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ElementMatrix = Eigen::Matrix3d;

/// P1 stiffness of one triangle: entry (a,b) = area * grad(L_a) . grad(L_b).
/// Throws std::invalid_argument for zero or negative (clockwise) area.
ElementMatrix element_stiffness(Point a, Point b, Point c);

/// Pixel stiffness matrices over the interior (free) vertices together with
/// the sigma-independent part b0, so that B_sigma = b0 + sum_i sigma_i B_i.
struct StiffnessSet {
  std::vector<SparseMatrix> pixel_matrices;
  SparseMatrix b0;
  int num_free = 0;

  int num_pixels() const { return static_cast<int>(pixel_matrices.size()); }
};

/// Sums element matrices pixel by pixel; Dirichlet vertices are dropped from
/// rows and columns. b0 is the zero matrix for the diffusion model.
StiffnessSet assemble_pixel_matrices(const TriMesh& mesh,
                                     const PixelGrid& grid);

/// Direct global assembly with element weights sigma[element_pixel[e]],
/// without any per-pixel intermediate.
SparseMatrix assemble_global(const TriMesh& mesh, std::span<const double> sigma);

/// Pixel matrices recovered from global assemblies only:
/// B_i = B_{1+e_i} - B_1 and b0 = B_1 - sum_i B_i.
StiffnessSet pixel_matrices_by_difference(const TriMesh& mesh,
                                          const PixelGrid& grid);

/// B_sigma = b0 + sum_i sigma_i B_i. Rejects sigma of the wrong length or
/// with any entry <= 0.
SparseMatrix global_matrix(const StiffnessSet& set,
                           std::span<const double> sigma);

struct LoadVector {
  Eigen::VectorXd y;
  DiskSpec disk;
  bool touches_interior = true;  // false when every entry is zero
};

/// y_j = integral over the resolved disk of the hat function L_j, i.e. area/3
/// per element vertex; boundary vertices are discarded.
LoadVector assemble_load(const TriMesh& mesh, const DiskSpec& disk);

std::vector<LoadVector> assemble_loads(const TriMesh& mesh,
                                       std::span<const DiskSpec> disks);

double max_abs_entry(const SparseMatrix& a);

/// `i j value` per stored entry, 1-based, 17 significant digits.
void write_coordinate(std::ostream& out, const SparseMatrix& a);

}  // namespace pixelinv
