#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "helmqmc/types.hpp"

namespace helmqmc {

/// Star-shaped obstacle boundary r = r(theta), 2 pi periodic and positive.
class StarObstacle {
 public:
  explicit StarObstacle(std::function<double(double)> radial_fn, std::string name = "star");

  /// (0.3 + sin^2 t)(1.5 + 1.4 cos 2t)
  static StarObstacle butterfly();
  static StarObstacle circle(double radius);

  double radius(double theta) const { return fn_(theta); }
  double derivative(double theta) const;
  Point2 point(double theta) const;

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  const std::string& name() const { return name_; }

  /// Boundary length, integrated on a fine uniform grid.
  double perimeter() const { return perimeter_; }

  /// Angles theta_0 = 0 < theta_1 < ... that split the boundary into n
  /// arcs of equal length.
  std::vector<double> equal_arclength_angles(int n) const;

 private:
  std::function<double(double)> fn_;
  std::string name_;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  double perimeter_ = 0.0;
};

enum class BoundaryTag : std::uint8_t { interior = 0, obstacle = 1, outer = 2 };

/// Symmetric quadrature on the reference triangle; weights sum to one and
/// multiply the physical triangle area.
struct TriQuadRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;  // barycentric
  std::vector<double> weights;
};

TriQuadRule quad_rule(int degree);

struct MeshOptions {
  /// Circle radii that become mesh rings. Knots inside the obstacle's
  /// blending zone or beyond the outer radius are ignored.
  std::vector<double> knots{3.0, 3.5, 4.0, 4.5, 4.52};
  /// A knot closer than this fraction of the local tangential spacing to the
  /// previous ring is skipped.
  double min_gap_fraction = 0.5;
  /// Ring density multipliers: a circular segment whose midpoint lies in
  /// [from, to] gets factor times as many rings. Used to resolve radial
  /// waves and the PML stretching.
  struct Refinement {
    double from = 0.0;
    double to = 0.0;
    double factor = 1.0;
  };
  std::vector<Refinement> refinements;
};

class TriMesh {
 public:
  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryTag>& boundary_tags() const { return tags_; }
  double h_max() const { return h_max_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  std::size_t edge_count() const;

  int n_theta() const { return n_theta_; }
  /// Radii of the vertex rings; NaN for rings that follow the obstacle.
  const std::vector<double>& ring_radii() const { return ring_radii_; }
  bool has_center() const { return has_center_; }

  double signed_area(std::size_t t) const;
  double total_area() const;
  double min_angle_degrees() const;

  /// Index of a triangle containing x, if any.
  std::optional<std::size_t> locate(const Point2& x) const;

  /// Barycentric coordinates of x in triangle t.
  std::array<double, 3> barycentric(std::size_t t, const Point2& x) const;

  void write(std::ostream& os) const;
  static TriMesh read(std::istream& is);

  friend TriMesh mesh_annulus(const StarObstacle&, double, int, int, const MeshOptions&);
  friend TriMesh mesh_disk(double, int, int, const MeshOptions&);

 private:
  void finalize();
  std::optional<std::size_t> locate_polar(const Point2& x) const;
  bool contains(std::size_t t, const Point2& x, double tol) const;

  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryTag> tags_;
  double h_max_ = 0.0;

  int n_theta_ = 0;
  bool has_center_ = false;
  std::vector<double> ring_radii_;
  // Triangles of polar cell (i, j) live at [cell_first_[j*n+i], +cell_count_).
  std::vector<int> cell_first_;
  std::vector<int> cell_count_;

  // Uniform bucket grid for point location away from circular rings.
  Point2 bucket_origin_ = Point2::Zero();
  double bucket_size_ = 1.0;
  int bucket_nx_ = 0;
  int bucket_ny_ = 0;
  std::vector<int> bucket_start_;
  std::vector<int> bucket_items_;
};

/// Fitted mesh of the region between a star-shaped obstacle and the circle
/// of radius r_outer: n_theta vertices per ring and n_radial + 1 rings.
/// Rings between the obstacle and the first knot interpolate linearly from
/// equal-arclength boundary points to the knot circle with geometric
/// grading; every ring beyond is a circle. n_radial = 0 picks the count that
/// makes cells roughly isotropic.
TriMesh mesh_annulus(const StarObstacle& obstacle, double r_outer, int n_theta, int n_radial,
                     const MeshOptions& options = {});

/// Polar mesh of the disk of radius r_outer with a centre fan.
TriMesh mesh_disk(double r_outer, int n_theta, int n_radial, const MeshOptions& options = {});

/// Ring count that mesh_annulus would choose for n_radial = 0.
int suggested_radial_count(const StarObstacle& obstacle, double r_outer, int n_theta, const MeshOptions& options = {});

}  // namespace helmqmc
