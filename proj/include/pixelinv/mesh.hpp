#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace pixelinv {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform nx-by-nx partition of the unit square. Pixel indices are 0-based,
/// row-major from the lower-left corner (index 0 is the lower-left pixel,
/// counting rightward then upward).
class PixelGrid {
 public:
  explicit PixelGrid(int nx);

  int nx() const { return nx_; }
  int size() const { return nx_ * nx_; }
  double side() const { return 1.0 / nx_; }

  int pixel_of(int ix, int iy) const { return iy * nx_ + ix; }
  int column(int pixel) const { return pixel % nx_; }
  int row(int pixel) const { return pixel / nx_; }
  Point center(int pixel) const;
  bool is_boundary_pixel(int pixel) const;

  /// Closed-square membership, with slack for points computed in floating point.
  bool contains(int pixel, Point p, double slack = 1e-12) const;

 private:
  int nx_;
};

/// Conforming P1 triangulation of the unit square on a structured
/// (nx*k + 1)^2 lattice. Each lattice square is split by its lower-left to
/// upper-right diagonal, so every triangle lies inside exactly one pixel.
struct TriMesh {
  int nx = 0;
  int k = 0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> element_pixel;
  std::vector<bool> boundary_vertex;
  std::vector<int> free_index;  // -1 on boundary vertices
  int num_free = 0;

  int lattice_size() const { return nx * k; }
  double h() const { return 1.0 / (nx * k); }
  double area(std::size_t triangle) const;
  Point centroid(std::size_t triangle) const;

  /// Triangle that contains p (p strictly interior to a triangle gives a
  /// unique answer; points on edges resolve to one of the adjacent ones).
  int locate(Point p) const;
};

TriMesh build_mesh(const PixelGrid& grid, int k);

/// Same partition at twice the refinement; the coarse P1 space is a subspace
/// of the fine one.
TriMesh refine(const TriMesh& mesh);

/// Circular excitation/measurement subdomain resolved onto mesh elements.
struct DiskSpec {
  Point center;
  double radius = 0.0;
  std::vector<int> element_set;
  double area = 0.0;  // sum of resolved element areas
};

/// Selects every triangle whose centroid is strictly inside the disk.
/// Throws std::invalid_argument when the disk is not inside (0,1)^2 or no
/// centroid falls inside it.
DiskSpec resolve_disk(const TriMesh& mesh, Point center, double radius);

/// Carries a disk resolved on `coarse` over to a nested refinement `fine`:
/// the fine element set covers exactly the same region, so the functional is
/// unchanged and only the discrete space grows.
DiskSpec transfer_disk(const TriMesh& coarse, const DiskSpec& disk,
                       const TriMesh& fine);

/// One disk per boundary pixel, centered in the pixel with radius
/// radius_fraction / nx, ordered by pixel index (4nx - 4 disks).
std::vector<DiskSpec> standard_disk_layout(const TriMesh& mesh,
                                           const PixelGrid& grid,
                                           double radius_fraction = 0.25);

/// Boundary pixel indices in ascending order.
std::vector<int> boundary_pixels(const PixelGrid& grid);

/// Debug export: `v x y` per vertex, `t i j k pixel` per triangle, all
/// indices 1-based.
void write_mesh(std::ostream& out, const TriMesh& mesh);

}  // namespace pixelinv
