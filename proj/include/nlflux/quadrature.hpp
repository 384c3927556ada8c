#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "nlflux/geometry.hpp"
#include "nlflux/kernels.hpp"

namespace nlflux {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points. Rules are computed once and cached.
const GaussRule& gauss_legendre(int n);

struct QuadratureConfig {
  int gauss_order = 16;
  double rel_tol = 1e-10;
  int contour_gauss_order = 24;
  // Angular panels never exceed this width (radians).
  double max_panel = 0.4;

  void validate() const;
};

// The set treated as "inside" when a ball is split: an intersection of
// half-planes or an axis-aligned ellipse centered at the origin.
class LocalRegion {
 public:
  static LocalRegion from_domain(const DomainSpec& domain);
  static LocalRegion half_plane(const Vec2& point, const Vec2& outward_normal);
  static LocalRegion wedge(const Vec2& corner, const Vec2& n1, const Vec2& n2);
  static LocalRegion ellipse(double a, double b);

  // Distance from origin along direction angle phi to the region boundary.
  // Infinity if the ray never leaves. Origin must lie in the closure.
  double exit_distance(const Vec2& origin, double phi) const;

  // Angular intervals where the ray leaves the region before distance delta,
  // further split at points where the exit distance is not smooth.
  std::vector<std::pair<double, double>> exterior_arcs(const Vec2& x, double delta) const;

 private:
  struct Line {
    Vec2 point;
    Vec2 normal;
  };
  std::vector<Line> lines_;
  bool is_ellipse_ = false;
  double a_ = 1.0, b_ = 1.0;

  void ellipse_breakpoints(const Vec2& x, double delta, std::vector<double>& out) const;
};

// Moments m(a,b) = integral of (d.e1)^a (d.e2)^b over a region, d = y - x,
// for a + b <= 4.
struct MomentTable {
  std::array<std::array<double, 5>, 5> m{};
  double operator()(int a, int b) const { return m[a][b]; }
};

// Closed form over the whole ball B(x, delta) (frame-independent).
MomentTable ball_moments(double delta);

// Moments over B(x, delta) minus the region, in the orthonormal frame (e1, e2).
MomentTable exterior_moments(const Vec2& x, double delta, const LocalRegion& region,
                             const Vec2& e1, const Vec2& e2, const QuadratureConfig& cfg = {});

enum class BallSide { InsideOmega, OutsideOmega };

double integrate_ball_region(const Vec2& x, double delta, const DomainSpec& domain, BallSide side,
                             const std::function<double(const Vec2&)>& f,
                             const QuadratureConfig& cfg = {});

// Exterior seen by a Neumann row: the whole complement for smooth domains,
// the half-plane beyond the projected edge for squares.
LocalRegion neumann_region(const DomainSpec& domain, const Projection& proj);

struct CollarCoefficients {
  double m_delta = 0.0;     // weight of the contour correction
  double f_factor = 0.0;    // exterior f-correction, rhs uses f (1 - f_factor)
  double g_first = 0.0;     // 2 * int_ext J (y - x).n
  MomentTable ext;          // exterior moments in the (n, p) frame
};

CollarCoefficients collar_coefficients(const Vec2& x, const Projection& proj, const KernelSet& k,
                                       const LocalRegion& region, const QuadratureConfig& cfg = {});

double m_delta(const Vec2& x, double delta, const DomainSpec& domain,
               const QuadratureConfig& cfg = {});

// Integral of H_delta(|l|) f(x_l) over [-delta, delta] along the parallel contour.
double contour_integral(const Vec2& x, double delta, const DomainSpec& domain,
                        const std::function<double(const Vec2&)>& f,
                        const QuadratureConfig& cfg = {});

}  // namespace nlflux
