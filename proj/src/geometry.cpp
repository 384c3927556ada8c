#include "nlflux/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlflux/errors.hpp"
#include "nlflux/quadrature.hpp"

namespace nlflux {

namespace {

constexpr double kTieTol = 1e-12;

BoundarySegment edge(Vec2 a, Vec2 b, BoundaryKind kind) {
  BoundarySegment s;
  s.kind = kind;
  s.a = a;
  s.b = b;
  return s;
}

// Square edges are stored counter-clockwise: bottom, right, top, left.
std::vector<BoundarySegment> square_edges(BoundaryKind bottom, BoundaryKind right,
                                          BoundaryKind top, BoundaryKind left) {
  return {edge({0, 0}, {1, 0}, bottom), edge({1, 0}, {1, 1}, right),
          edge({1, 1}, {0, 1}, top), edge({0, 1}, {0, 0}, left)};
}

Vec2 edge_normal(const BoundarySegment& s) {
  Vec2 t = (s.b - s.a).normalized();
  return rotate_clockwise(t);
}

Vec2 closest_on_segment(const BoundarySegment& s, const Vec2& x) {
  const Vec2 d = s.b - s.a;
  double t = (x - s.a).dot(d) / d.squaredNorm();
  t = std::clamp(t, 0.0, 1.0);
  return s.a + t * d;
}

Projection square_closest(const DomainSpec& domain, const Vec2& x) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  Vec2 best_pt = Vec2::Zero();
  for (int i = 0; i < static_cast<int>(domain.segments.size()); ++i) {
    const auto& seg = domain.segments[i];
    const Vec2 c = closest_on_segment(seg, x);
    const double d = (c - x).norm();
    bool take = false;
    if (best < 0 || d < best_d - kTieTol) {
      take = true;
    } else if (std::abs(d - best_d) <= kTieTol) {
      // Tie: Neumann edges win over Dirichlet ones, otherwise keep lower index.
      take = seg.kind == BoundaryKind::Neumann &&
             domain.segments[best].kind == BoundaryKind::Dirichlet;
    }
    if (take) {
      best = i;
      best_d = d;
      best_pt = c;
    }
  }
  Projection p;
  p.segment = best;
  p.xbar = best_pt;
  p.normal = edge_normal(domain.segments[best]);
  p.tangent = rotate_clockwise(p.normal);
  p.dist = (best_pt - x).dot(p.normal);
  p.curvature = 0.0;
  return p;
}

Projection disk_closest(const Vec2& x) {
  Projection p;
  const double r = x.norm();
  const double alpha = r > 0 ? std::atan2(x.y(), x.x()) : 0.0;
  p.param = alpha;
  p.normal = Vec2(std::cos(alpha), std::sin(alpha));
  p.xbar = p.normal;
  p.tangent = rotate_clockwise(p.normal);
  p.dist = 1.0 - r;
  p.curvature = 1.0;
  p.segment = 0;
  return p;
}

Projection ellipse_closest(const DomainSpec& d, const Vec2& x) {
  const double t = ellipse_detail::closest_parameter(d.a, d.b, x);
  Projection p;
  p.param = t;
  p.xbar = ellipse_detail::point(d.a, d.b, t);
  p.normal = ellipse_detail::normal(d.a, d.b, t);
  p.tangent = rotate_clockwise(p.normal);
  p.dist = (p.xbar - x).dot(p.normal);
  p.curvature = ellipse_detail::curvature(d.a, d.b, t);
  p.segment = 0;
  return p;
}

// Arc length along the parallel curve at offset s from parameter t0 down to t1
// (positive when t1 < t0, i.e. in the +p direction).
double parallel_arc(double a, double b, double s, double t0, double t1) {
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.25)));
  const auto& rule = gauss_legendre(20);
  double len = 0.0;
  const double w = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double c = lo + (k + 0.5) * w;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      len += 0.5 * w * rule.weights[q] * ellipse_detail::speed(a, b, c + 0.5 * w * rule.nodes[q]);
    }
  }
  len -= s * (ellipse_detail::normal_angle(a, b, hi) - ellipse_detail::normal_angle(a, b, lo));
  return t1 < t0 ? len : -len;
}

Vec2 ellipse_contour(const DomainSpec& d, const Projection& proj, double l) {
  if (l == 0.0) return proj.xbar - proj.dist * proj.normal;
  const double a = d.a, b = d.b, s = proj.dist, tx = proj.param;
  auto residual = [&](double t) { return parallel_arc(a, b, s, tx, t) - l; };
  auto rate = [&](double t) {
    return ellipse_detail::speed(a, b, t) * (1.0 - s * ellipse_detail::curvature(a, b, t));
  };
  // residual is strictly decreasing in t; bracket the root then polish.
  double step = std::abs(l) / std::max(rate(tx), 1e-3);
  double lo = tx, hi = tx;
  if (l > 0) {
    lo = tx - step;
    while (residual(lo) < 0) { step *= 2; lo = tx - step; }
  } else {
    hi = tx + step;
    while (residual(hi) > 0) { step *= 2; hi = tx + step; }
  }
  double t = tx - l / rate(tx);
  if (t <= lo || t >= hi) t = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double r = residual(t);
    if (std::abs(r) <= 1e-13) break;
    if (r > 0) lo = t; else hi = t;
    double tn = t + r / rate(t);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (hi - lo < 1e-15) break;
    t = tn;
  }
  return ellipse_detail::point(a, b, t) - s * ellipse_detail::normal(a, b, t);
}

}  // namespace

namespace ellipse_detail {

Vec2 point(double a, double b, double t) { return Vec2(a * std::cos(t), b * std::sin(t)); }

Vec2 normal(double a, double b, double t) {
  return Vec2(b * std::cos(t), a * std::sin(t)).normalized();
}

double speed(double a, double b, double t) {
  return std::hypot(a * std::sin(t), b * std::cos(t));
}

double curvature(double a, double b, double t) {
  const double st = std::sin(t), ct = std::cos(t);
  return a * b / std::pow(a * a * st * st + b * b * ct * ct, 1.5);
}

double normal_angle(double a, double b, double t) {
  const double raw = std::atan2(a * std::sin(t), b * std::cos(t));
  return t + std::remainder(raw - t, 2.0 * std::numbers::pi);
}

double closest_parameter(double a, double b, const Vec2& x) {
  const double c2 = b * b - a * a;
  auto F = [&](double t) {
    return c2 * std::sin(t) * std::cos(t) + a * x.x() * std::sin(t) - b * x.y() * std::cos(t);
  };
  auto dF = [&](double t) {
    return c2 * std::cos(2 * t) + a * x.x() * std::cos(t) + b * x.y() * std::sin(t);
  };
  double t = std::atan2(a * x.y(), b * x.x());
  bool ok = false;
  for (int it = 0; it < 50; ++it) {
    const double f = F(t), df = dF(t);
    if (std::abs(f) <= 1e-13) { ok = df > 0; break; }
    if (df <= 0) break;
    t -= f / df;
  }
  if (ok) return t;

  // Fallback: sample the distance, then bisect F on the bracket of the best sample.
  constexpr int n = 1440;
  const double dt = 2 * std::numbers::pi / n;
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double d = (point(a, b, k * dt) - x).squaredNorm();
    if (d < best_d) { best_d = d; best = k; }
  }
  double lo = (best - 1) * dt, hi = (best + 1) * dt;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) < 0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ellipse_detail

DomainSpec DomainSpec::unit_square_mixed() {
  DomainSpec d;
  d.shape = Shape::UnitSquare;
  d.segments = square_edges(BoundaryKind::Dirichlet, BoundaryKind::Neumann,
                            BoundaryKind::Dirichlet, BoundaryKind::Dirichlet);
  return d;
}

DomainSpec DomainSpec::unit_disk() {
  DomainSpec d;
  d.shape = Shape::UnitDisk;
  BoundarySegment s;
  s.closed = true;
  d.segments = {s};
  return d;
}

DomainSpec DomainSpec::ellipse(double a, double b) {
  if (!(a >= b && b > 0)) throw InvalidConfig("ellipse requires a >= b > 0");
  DomainSpec d;
  d.shape = Shape::Ellipse;
  d.a = a;
  d.b = b;
  BoundarySegment s;
  s.closed = true;
  d.segments = {s};
  return d;
}

DomainSpec DomainSpec::unit_square_corner() {
  DomainSpec d;
  d.shape = Shape::UnitSquareCorner;
  d.segments = square_edges(BoundaryKind::Dirichlet, BoundaryKind::Neumann,
                            BoundaryKind::Neumann, BoundaryKind::Dirichlet);
  d.corner = CornerSpec{Vec2(1, 1), std::numbers::pi / 2, 1, 2};
  return d;
}

bool DomainSpec::has_dirichlet() const {
  return std::any_of(segments.begin(), segments.end(),
                     [](const BoundarySegment& s) { return s.kind == BoundaryKind::Dirichlet; });
}

std::string DomainSpec::name() const {
  switch (shape) {
    case Shape::UnitSquare: return "square";
    case Shape::UnitDisk: return "disk";
    case Shape::Ellipse: return "ellipse";
    case Shape::UnitSquareCorner: return "corner";
  }
  return "?";
}

const char* to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::Interior: return "Interior";
    case RegionTag::NeumannCollar: return "NeumannCollar";
    case RegionTag::CornerDisk: return "CornerDisk";
    case RegionTag::DirichletLayer: return "DirichletLayer";
  }
  return "?";
}

bool inside(const DomainSpec& domain, const Vec2& x) {
  switch (domain.shape) {
    case Shape::UnitSquare:
    case Shape::UnitSquareCorner:
      return x.x() > 0 && x.x() < 1 && x.y() > 0 && x.y() < 1;
    case Shape::UnitDisk:
      return x.squaredNorm() < 1.0;
    case Shape::Ellipse: {
      const double q = x.x() * x.x() / (domain.a * domain.a) + x.y() * x.y() / (domain.b * domain.b);
      return q < 1.0;
    }
  }
  return false;
}

bool in_closure(const DomainSpec& domain, const Vec2& x, double tol) {
  switch (domain.shape) {
    case Shape::UnitSquare:
    case Shape::UnitSquareCorner:
      return x.x() >= -tol && x.x() <= 1 + tol && x.y() >= -tol && x.y() <= 1 + tol;
    case Shape::UnitDisk:
      return x.norm() <= 1.0 + tol;
    case Shape::Ellipse:
      if (inside(domain, x)) return true;
      return std::abs(closest_point(domain, x).dist) <= tol;
  }
  return false;
}

Projection closest_point(const DomainSpec& domain, const Vec2& x) {
  switch (domain.shape) {
    case Shape::UnitSquare:
    case Shape::UnitSquareCorner:
      return square_closest(domain, x);
    case Shape::UnitDisk:
      return disk_closest(x);
    case Shape::Ellipse:
      return ellipse_closest(domain, x);
  }
  throw Error("unknown shape");
}

Projection project(const DomainSpec& domain, const Vec2& x) {
  if (domain.shape == Shape::UnitDisk && x.norm() < 1e-14) {
    throw NonUniqueProjection("disk center has no unique closest boundary point");
  }
  if (domain.shape == Shape::Ellipse && domain.a > domain.b && std::abs(x.y()) < 1e-14 &&
      std::abs(x.x()) < domain.a - domain.b * domain.b / domain.a) {
    throw NonUniqueProjection("point lies on the ellipse medial axis");
  }
  return closest_point(domain, x);
}

double distance_to_dirichlet(const DomainSpec& domain, const Vec2& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& seg : domain.segments) {
    if (seg.kind != BoundaryKind::Dirichlet || seg.closed) continue;
    best = std::min(best, (closest_on_segment(seg, x) - x).norm());
  }
  return best;
}

Vec2 contour_point(const DomainSpec& domain, const Projection& proj, const Vec2& x, double l) {
  switch (domain.shape) {
    case Shape::UnitSquare:
    case Shape::UnitSquareCorner:
      return x + l * proj.tangent;
    case Shape::UnitDisk: {
      const double rho = x.norm();
      const double ang = std::atan2(x.y(), x.x()) - l / rho;
      return Vec2(rho * std::cos(ang), rho * std::sin(ang));
    }
    case Shape::Ellipse:
      return ellipse_contour(domain, proj, l);
  }
  throw Error("unknown shape");
}

Vec2 contour_point(const DomainSpec& domain, const Vec2& x, double l) {
  const Projection proj = project(domain, x);
  if (domain.segments[proj.segment].kind != BoundaryKind::Neumann) {
    throw ContourLeavesNeumannRegion("point does not project onto the Neumann boundary");
  }
  const Vec2 y = contour_point(domain, proj, x, l);
  if (!in_closure(domain, y)) throw ContourLeavesNeumannRegion("contour point leaves the domain");
  if (domain.has_dirichlet()) {
    const Projection py = closest_point(domain, y);
    if (domain.segments[py.segment].kind == BoundaryKind::Dirichlet) {
      throw ContourLeavesNeumannRegion("contour point projects onto a Dirichlet edge");
    }
  }
  return y;
}

RegionTag classify(const DomainSpec& domain, const Vec2& x, double delta) {
  if (!(delta > 0)) throw InvalidHorizon("horizon must be positive");
  const bool closed_member = in_closure(domain, x);
  if (closed_member) {
    if (domain.corner && (x - domain.corner->point).norm() < delta) return RegionTag::CornerDisk;
    if (domain.has_dirichlet() && distance_to_dirichlet(domain, x) <= kTieTol) {
      return RegionTag::DirichletLayer;
    }
    const Projection p = closest_point(domain, x);
    if (p.dist < delta && domain.segments[p.segment].kind == BoundaryKind::Neumann) {
      return RegionTag::NeumannCollar;
    }
    return RegionTag::Interior;
  }
  if (domain.shape == Shape::UnitSquareCorner) {
    const double lo = -delta - kTieTol;
    if (x.x() >= lo && x.x() <= 1 + kTieTol && x.y() >= lo && x.y() <= 1 + kTieTol) {
      return RegionTag::DirichletLayer;
    }
  } else if (domain.has_dirichlet() && distance_to_dirichlet(domain, x) <= delta + kTieTol) {
    return RegionTag::DirichletLayer;
  }
  throw OutsideComputationalDomain("point is outside the domain and its Dirichlet layer");
}

}  // namespace nlflux
