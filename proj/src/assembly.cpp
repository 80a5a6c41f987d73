#include "pixelinv/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pixelinv {

namespace {

using Triplet = Eigen::Triplet<double>;

void scatter(const TriMesh& mesh, std::size_t e, double weight,
             std::vector<Triplet>& out) {
  const auto& tri = mesh.triangles[e];
  const ElementMatrix ke = element_stiffness(
      mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
  for (int a = 0; a < 3; ++a) {
    const int row = mesh.free_index[tri[a]];
    if (row < 0) continue;
    for (int b = 0; b < 3; ++b) {
      const int col = mesh.free_index[tri[b]];
      if (col < 0) continue;
      out.emplace_back(row, col, weight * ke(a, b));
    }
  }
}

SparseMatrix compress(int n, const std::vector<Triplet>& triplets) {
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

void check_sigma(std::span<const double> sigma, std::size_t expected) {
  if (sigma.size() != expected) {
    throw std::invalid_argument("sigma has " + std::to_string(sigma.size()) +
                                " entries, expected " +
                                std::to_string(expected));
  }
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0)) {
      throw std::invalid_argument("sigma[" + std::to_string(i) +
                                  "] must be positive");
    }
  }
}

}  // namespace

ElementMatrix element_stiffness(Point a, Point b, Point c) {
  const double twice_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  if (!(twice_area > 0.0)) {
    throw std::invalid_argument(
        "element_stiffness: degenerate or clockwise triangle");
  }
  // Unnormalized gradients: grad(L_v) = g_v / (2 * area).
  const Eigen::Vector2d g[3] = {{b.y - c.y, c.x - b.x},
                                {c.y - a.y, a.x - c.x},
                                {a.y - b.y, b.x - a.x}};
  ElementMatrix ke;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) ke(i, j) = g[i].dot(g[j]) / (2.0 * twice_area);
  }
  return ke;
}

StiffnessSet assemble_pixel_matrices(const TriMesh& mesh,
                                     const PixelGrid& grid) {
  if (grid.nx() != mesh.nx) {
    throw std::invalid_argument("assemble_pixel_matrices: grid/mesh mismatch");
  }
  std::vector<std::vector<Triplet>> per_pixel(grid.size());
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
    scatter(mesh, e, 1.0, per_pixel[mesh.element_pixel[e]]);
  }

  StiffnessSet set;
  set.num_free = mesh.num_free;
  set.pixel_matrices.reserve(grid.size());
  for (const auto& triplets : per_pixel) {
    set.pixel_matrices.push_back(compress(mesh.num_free, triplets));
  }
  set.b0 = SparseMatrix(mesh.num_free, mesh.num_free);
  return set;
}

SparseMatrix assemble_global(const TriMesh& mesh,
                             std::span<const double> sigma) {
  check_sigma(sigma, static_cast<std::size_t>(mesh.nx) * mesh.nx);
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.triangles.size());
  for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
    scatter(mesh, e, sigma[mesh.element_pixel[e]], triplets);
  }
  return compress(mesh.num_free, triplets);
}

StiffnessSet pixel_matrices_by_difference(const TriMesh& mesh,
                                          const PixelGrid& grid) {
  const int n = grid.size();
  std::vector<double> sigma(n, 1.0);
  const SparseMatrix b_one = assemble_global(mesh, sigma);

  StiffnessSet set;
  set.num_free = mesh.num_free;
  set.pixel_matrices.reserve(n);
  SparseMatrix sum(mesh.num_free, mesh.num_free);
  for (int i = 0; i < n; ++i) {
    sigma[i] = 2.0;
    SparseMatrix bi = assemble_global(mesh, sigma) - b_one;
    sigma[i] = 1.0;
    bi.prune(0.0);
    sum += bi;
    set.pixel_matrices.push_back(std::move(bi));
  }
  set.b0 = b_one - sum;
  set.b0.prune(0.0);
  return set;
}

SparseMatrix global_matrix(const StiffnessSet& set,
                           std::span<const double> sigma) {
  check_sigma(sigma, set.pixel_matrices.size());
  SparseMatrix b = set.b0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    b += sigma[i] * set.pixel_matrices[i];
  }
  return b;
}

LoadVector assemble_load(const TriMesh& mesh, const DiskSpec& disk) {
  LoadVector load{Eigen::VectorXd::Zero(mesh.num_free), disk, false};
  for (int e : disk.element_set) {
    const double third = mesh.area(e) / 3.0;
    for (int v : mesh.triangles[e]) {
      const int j = mesh.free_index[v];
      if (j < 0) continue;
      load.y[j] += third;
      load.touches_interior = true;
    }
  }
  return load;
}

std::vector<LoadVector> assemble_loads(const TriMesh& mesh,
                                       std::span<const DiskSpec> disks) {
  std::vector<LoadVector> loads;
  loads.reserve(disks.size());
  for (const DiskSpec& d : disks) loads.push_back(assemble_load(mesh, d));
  return loads;
}

double max_abs_entry(const SparseMatrix& a) {
  double m = 0.0;
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

void write_coordinate(std::ostream& out, const SparseMatrix& a) {
  char buf[64];
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
  }
}

}  // namespace pixelinv
