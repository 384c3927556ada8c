#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace nlflux {

using Vec2 = Eigen::Vector2d;

enum class BoundaryKind { Dirichlet, Neumann };

// A straight boundary edge [a, b], or (closed == true) the whole smooth
// boundary curve of a disk/ellipse.
struct BoundarySegment {
  BoundaryKind kind = BoundaryKind::Neumann;
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  bool closed = false;
};

struct CornerSpec {
  Vec2 point;
  double angle;  // interior angle
  int first;     // segment indices of the two Neumann edges meeting at point
  int second;
};

enum class Shape { UnitSquare, UnitDisk, Ellipse, UnitSquareCorner };

struct DomainSpec {
  Shape shape = Shape::UnitSquare;
  double a = 1.0;  // ellipse semi-axes (1,1 for the disk)
  double b = 1.0;
  std::vector<BoundarySegment> segments;
  std::optional<CornerSpec> corner;

  // Unit square with the edge x = 1 Neumann and the rest Dirichlet.
  static DomainSpec unit_square_mixed();
  static DomainSpec unit_disk();
  static DomainSpec ellipse(double a, double b);
  // Unit square whose edges x = 1 and y = 1 are Neumann and meet at (1,1).
  static DomainSpec unit_square_corner();

  bool is_curved() const { return shape == Shape::UnitDisk || shape == Shape::Ellipse; }
  bool has_dirichlet() const;
  std::string name() const;
};

struct Projection {
  Vec2 xbar = Vec2::Zero();
  Vec2 normal = Vec2::UnitX();   // outward
  Vec2 tangent = -Vec2::UnitY(); // (n2, -n1)
  double dist = 0.0;             // signed: positive inside the domain
  double curvature = 0.0;
  int segment = 0;
  double param = 0.0;            // ellipse/disk parameter angle of xbar
};

enum class RegionTag { Interior, NeumannCollar, CornerDisk, DirichletLayer };

const char* to_string(RegionTag tag);

inline Vec2 rotate_clockwise(const Vec2& n) { return Vec2(n.y(), -n.x()); }

// Open-set membership: boundary points are not inside.
bool inside(const DomainSpec& domain, const Vec2& x);
// Membership in the closure, with a tolerance of tol.
bool in_closure(const DomainSpec& domain, const Vec2& x, double tol = 1e-12);

// Closest boundary point. Ties between square edges prefer Neumann edges,
// then the lower segment index. Points where the projection is genuinely
// non-unique (disk center, ellipse medial axis) throw NonUniqueProjection.
Projection project(const DomainSpec& domain, const Vec2& x);

// Same as project() but never throws for non-uniqueness; one of the
// candidate closest points is returned.
Projection closest_point(const DomainSpec& domain, const Vec2& x);

double distance_to_dirichlet(const DomainSpec& domain, const Vec2& x);

// x_l on the curve through x parallel to the boundary, at signed arc length l
// in the +p direction. Throws ContourLeavesNeumannRegion if the point leaves
// the closure of the domain or projects onto a Dirichlet edge.
Vec2 contour_point(const DomainSpec& domain, const Vec2& x, double l);

// Unchecked variant used by assembly: flat edges extend as straight lines.
Vec2 contour_point(const DomainSpec& domain, const Projection& proj, const Vec2& x, double l);

RegionTag classify(const DomainSpec& domain, const Vec2& x, double delta);

// Ellipse helpers, exposed for tests.
namespace ellipse_detail {
Vec2 point(double a, double b, double t);
Vec2 normal(double a, double b, double t);
double curvature(double a, double b, double t);
double speed(double a, double b, double t);
// Unwrapped angle of the outward normal at parameter t.
double normal_angle(double a, double b, double t);
double closest_parameter(double a, double b, const Vec2& x);
}  // namespace ellipse_detail

}  // namespace nlflux
