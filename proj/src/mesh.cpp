#include "pixelinv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pixelinv {

PixelGrid::PixelGrid(int nx) : nx_(nx) {
  if (nx < 1) throw std::invalid_argument("PixelGrid: nx must be >= 1");
}

Point PixelGrid::center(int pixel) const {
  return {(column(pixel) + 0.5) / nx_, (row(pixel) + 0.5) / nx_};
}

bool PixelGrid::is_boundary_pixel(int pixel) const {
  const int ix = column(pixel);
  const int iy = row(pixel);
  return ix == 0 || iy == 0 || ix == nx_ - 1 || iy == nx_ - 1;
}

bool PixelGrid::contains(int pixel, Point p, double slack) const {
  const double x0 = static_cast<double>(column(pixel)) / nx_;
  const double y0 = static_cast<double>(row(pixel)) / nx_;
  const double x1 = static_cast<double>(column(pixel) + 1) / nx_;
  const double y1 = static_cast<double>(row(pixel) + 1) / nx_;
  return p.x >= x0 - slack && p.x <= x1 + slack && p.y >= y0 - slack &&
         p.y <= y1 + slack;
}

double TriMesh::area(std::size_t triangle) const {
  const auto& t = triangles[triangle];
  const Point a = vertices[t[0]];
  const Point b = vertices[t[1]];
  const Point c = vertices[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point TriMesh::centroid(std::size_t triangle) const {
  const auto& t = triangles[triangle];
  const Point a = vertices[t[0]];
  const Point b = vertices[t[1]];
  const Point c = vertices[t[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

int TriMesh::locate(Point p) const {
  const int m = lattice_size();
  const double sx = p.x * m;
  const double sy = p.y * m;
  const int ix = std::clamp(static_cast<int>(std::floor(sx)), 0, m - 1);
  const int iy = std::clamp(static_cast<int>(std::floor(sy)), 0, m - 1);
  const int square = iy * m + ix;
  // Lower triangle of the square lies below the diagonal.
  const bool lower = (sy - iy) <= (sx - ix);
  return 2 * square + (lower ? 0 : 1);
}

TriMesh build_mesh(const PixelGrid& grid, int k) {
  if (k < 1) throw std::invalid_argument("build_mesh: k must be >= 1");

  TriMesh mesh;
  mesh.nx = grid.nx();
  mesh.k = k;
  const int m = grid.nx() * k;
  const int stride = m + 1;

  mesh.vertices.reserve(static_cast<std::size_t>(stride) * stride);
  mesh.boundary_vertex.reserve(mesh.vertices.capacity());
  mesh.free_index.reserve(mesh.vertices.capacity());
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      mesh.vertices.push_back({static_cast<double>(i) / m,
                               static_cast<double>(j) / m});
      const bool on_boundary = i == 0 || j == 0 || i == m || j == m;
      mesh.boundary_vertex.push_back(on_boundary);
      mesh.free_index.push_back(on_boundary ? -1 : mesh.num_free++);
    }
  }

  mesh.triangles.reserve(2 * static_cast<std::size_t>(m) * m);
  mesh.element_pixel.reserve(mesh.triangles.capacity());
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int v00 = j * stride + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + stride;
      const int v11 = v01 + 1;
      const int pixel = grid.pixel_of(i / k, j / k);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
      mesh.element_pixel.push_back(pixel);
      mesh.element_pixel.push_back(pixel);
    }
  }
  return mesh;
}

TriMesh refine(const TriMesh& mesh) {
  return build_mesh(PixelGrid(mesh.nx), 2 * mesh.k);
}

DiskSpec resolve_disk(const TriMesh& mesh, Point center, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("resolve_disk: radius must be positive");
  }
  if (center.x - radius <= 0.0 || center.x + radius >= 1.0 ||
      center.y - radius <= 0.0 || center.y + radius >= 1.0) {
    throw std::invalid_argument("resolve_disk: disk not contained in (0,1)^2");
  }

  DiskSpec disk{center, radius, {}, 0.0};
  const double r2 = radius * radius;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Point c = mesh.centroid(t);
    const double dx = c.x - center.x;
    const double dy = c.y - center.y;
    if (dx * dx + dy * dy < r2) {
      disk.element_set.push_back(static_cast<int>(t));
      disk.area += mesh.area(t);
    }
  }
  if (disk.element_set.empty()) {
    throw std::invalid_argument(
        "resolve_disk: no element centroid inside the disk (mesh too coarse "
        "for radius " + std::to_string(radius) + ")");
  }
  return disk;
}

DiskSpec transfer_disk(const TriMesh& coarse, const DiskSpec& disk,
                       const TriMesh& fine) {
  if (fine.nx != coarse.nx || fine.k % coarse.k != 0) {
    throw std::invalid_argument(
        "transfer_disk: target mesh is not a nested refinement");
  }
  std::vector<bool> selected(coarse.triangles.size(), false);
  for (int t : disk.element_set) selected[t] = true;

  DiskSpec out{disk.center, disk.radius, {}, 0.0};
  for (std::size_t t = 0; t < fine.triangles.size(); ++t) {
    if (selected[coarse.locate(fine.centroid(t))]) {
      out.element_set.push_back(static_cast<int>(t));
      out.area += fine.area(t);
    }
  }
  return out;
}

std::vector<int> boundary_pixels(const PixelGrid& grid) {
  std::vector<int> out;
  for (int p = 0; p < grid.size(); ++p) {
    if (grid.is_boundary_pixel(p)) out.push_back(p);
  }
  return out;
}

std::vector<DiskSpec> standard_disk_layout(const TriMesh& mesh,
                                           const PixelGrid& grid,
                                           double radius_fraction) {
  if (grid.nx() < 2) {
    throw std::invalid_argument("standard_disk_layout: nx must be >= 2");
  }
  if (!(radius_fraction > 0.0 && radius_fraction < 0.5)) {
    throw std::invalid_argument(
        "standard_disk_layout: radius_fraction must lie in (0, 0.5)");
  }
  std::vector<DiskSpec> disks;
  for (int p : boundary_pixels(grid)) {
    disks.push_back(
        resolve_disk(mesh, grid.center(p), radius_fraction / grid.nx()));
  }
  return disks;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  out.precision(17);
  for (const Point& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << "t " << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << ' '
        << mesh.element_pixel[t] + 1 << '\n';
  }
}

}  // namespace pixelinv
