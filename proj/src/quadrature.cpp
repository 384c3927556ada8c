#include "nlflux/quadrature.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "nlflux/errors.hpp"

namespace nlflux {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n starting from the Chebyshev-like guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double wrap_angle(double phi) {
  phi = std::fmod(phi, kTwoPi);
  return phi < 0 ? phi + kTwoPi : phi;
}

Vec2 direction(double phi) { return Vec2(std::cos(phi), std::sin(phi)); }

// Calls body(phi, weight) for a composite Gauss rule over [lo, hi].
template <class Body>
void angular_rule(double lo, double hi, const QuadratureConfig& cfg, Body&& body) {
  const auto& rule = gauss_legendre(cfg.gauss_order);
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / cfg.max_panel)));
  const double w = (hi - lo) / panels;
  for (int k = 0; k < panels; ++k) {
    const double c = lo + (k + 0.5) * w;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      body(c + 0.5 * w * rule.nodes[q], 0.5 * w * rule.weights[q]);
    }
  }
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw InvalidConfig("Gauss rule needs at least one point");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

void QuadratureConfig::validate() const {
  if (gauss_order < 8) throw InvalidConfig("gauss_order must be at least 8");
  if (contour_gauss_order < 16) throw InvalidConfig("contour_gauss_order must be at least 16");
  if (!(rel_tol > 0 && rel_tol <= 1e-6)) throw InvalidConfig("rel_tol must lie in (0, 1e-6]");
  if (!(max_panel > 0)) throw InvalidConfig("max_panel must be positive");
}

LocalRegion LocalRegion::from_domain(const DomainSpec& domain) {
  switch (domain.shape) {
    case Shape::UnitDisk:
      return ellipse(1.0, 1.0);
    case Shape::Ellipse:
      return ellipse(domain.a, domain.b);
    case Shape::UnitSquare:
    case Shape::UnitSquareCorner: {
      LocalRegion r;
      for (const auto& seg : domain.segments) {
        const Vec2 t = (seg.b - seg.a).normalized();
        r.lines_.push_back({seg.a, rotate_clockwise(t)});
      }
      return r;
    }
  }
  throw Error("unknown shape");
}

LocalRegion LocalRegion::half_plane(const Vec2& point, const Vec2& outward_normal) {
  LocalRegion r;
  r.lines_.push_back({point, outward_normal.normalized()});
  return r;
}

LocalRegion LocalRegion::wedge(const Vec2& corner, const Vec2& n1, const Vec2& n2) {
  LocalRegion r;
  r.lines_.push_back({corner, n1.normalized()});
  r.lines_.push_back({corner, n2.normalized()});
  return r;
}

LocalRegion LocalRegion::ellipse(double a, double b) {
  LocalRegion r;
  r.is_ellipse_ = true;
  r.a_ = a;
  r.b_ = b;
  return r;
}

double LocalRegion::exit_distance(const Vec2& x, double phi) const {
  const Vec2 d = direction(phi);
  if (is_ellipse_) {
    const double ia = 1.0 / (a_ * a_), ib = 1.0 / (b_ * b_);
    const double A = d.x() * d.x() * ia + d.y() * d.y() * ib;
    const double B = 2.0 * (x.x() * d.x() * ia + x.y() * d.y() * ib);
    const double C = std::min(0.0, x.x() * x.x() * ia + x.y() * x.y() * ib - 1.0);
    const double disc = std::sqrt(std::max(0.0, B * B - 4.0 * A * C));
    if (B >= 0) {
      const double q = -0.5 * (B + disc);
      return q == 0.0 ? 0.0 : C / q;
    }
    return -0.5 * (B - disc) / A;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines_) {
    const double dn = d.dot(line.normal);
    if (dn <= 0) continue;
    const double s = std::max(0.0, (line.point - x).dot(line.normal));
    best = std::min(best, s / dn);
  }
  return best;
}

void LocalRegion::ellipse_breakpoints(const Vec2& x, double delta, std::vector<double>& out) const {
  const double t = ellipse_detail::closest_parameter(a_, b_, x);
  const Vec2 n = ellipse_detail::normal(a_, b_, t);
  const double phi_n = std::atan2(n.y(), n.x());
  if (exit_distance(x, phi_n) >= delta) return;
  auto outside = [&](double phi) { return exit_distance(x, phi) < delta; };
  const double step = std::numbers::pi / 360.0;
  for (int sign : {1, -1}) {
    double lo = phi_n;
    int guard = 0;
    while (outside(lo + sign * step) && guard < 720) {
      lo += sign * step;
      ++guard;
    }
    double a = lo, b = lo + sign * step;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (a + b);
      if (outside(mid)) a = mid; else b = mid;
    }
    out.push_back(0.5 * (a + b));
    // The exit distance has a kink near the tangent directions; splitting
    // there keeps the Gauss panels on smooth pieces.
    out.push_back(phi_n + sign * 0.5 * std::numbers::pi);
  }
}

std::vector<std::pair<double, double>> LocalRegion::exterior_arcs(const Vec2& x, double delta) const {
  std::vector<double> cuts;
  if (is_ellipse_) {
    ellipse_breakpoints(x, delta, cuts);
  } else {
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const auto& li = lines_[i];
      const double s = std::max(0.0, (li.point - x).dot(li.normal));
      if (s >= delta) continue;
      const double alpha = std::atan2(li.normal.y(), li.normal.x());
      const double c = std::acos(std::clamp(s / delta, -1.0, 1.0));
      cuts.push_back(alpha - c);
      cuts.push_back(alpha + c);
      for (std::size_t j = i + 1; j < lines_.size(); ++j) {
        const auto& lj = lines_[j];
        Eigen::Matrix2d m;
        m << li.normal.transpose(), lj.normal.transpose();
        if (std::abs(m.determinant()) < 1e-14) continue;
        const Vec2 v = m.inverse() * Vec2(li.normal.dot(li.point), lj.normal.dot(lj.point));
        const Vec2 dv = v - x;
        if (dv.norm() < delta && dv.norm() > 1e-14) cuts.push_back(std::atan2(dv.y(), dv.x()));
      }
    }
  }
  std::vector<std::pair<double, double>> arcs;
  if (cuts.empty()) return arcs;
  for (double& c : cuts) c = wrap_angle(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double u, double v) { return std::abs(u - v) < 1e-14; }),
             cuts.end());
  const std::size_t n = cuts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < n ? cuts[i + 1] : cuts[0] + kTwoPi;
    if (hi - lo < 1e-14) continue;
    if (exit_distance(x, 0.5 * (lo + hi)) < delta) arcs.emplace_back(lo, hi);
  }
  return arcs;
}

MomentTable ball_moments(double delta) {
  MomentTable t;
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      if (a % 2 || b % 2) continue;
      const double ang = 2.0 * std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) /
                         std::tgamma((a + b + 2) / 2.0);
      t.m[a][b] = ang * std::pow(delta, a + b + 2) / (a + b + 2);
    }
  }
  return t;
}

MomentTable exterior_moments(const Vec2& x, double delta, const LocalRegion& region,
                             const Vec2& e1, const Vec2& e2, const QuadratureConfig& cfg) {
  MomentTable t;
  std::array<double, 7> dpow{};
  for (int k = 0; k <= 6; ++k) dpow[k] = std::pow(delta, k);
  for (const auto& [lo, hi] : region.exterior_arcs(x, delta)) {
    angular_rule(lo, hi, cfg, [&](double phi, double w) {
      const double rb = std::min(region.exit_distance(x, phi), delta);
      const Vec2 d = direction(phi);
      const double c = d.dot(e1), s = d.dot(e2);
      double rpow = rb * rb;
      std::array<double, 5> radial{};
      for (int k = 0; k <= 4; ++k) {
        radial[k] = (dpow[k + 2] - rpow) / (k + 2);
        rpow *= rb;
      }
      double ca = 1.0;
      for (int a = 0; a <= 4; ++a) {
        double sb = 1.0;
        for (int b = 0; a + b <= 4; ++b) {
          t.m[a][b] += w * ca * sb * radial[a + b];
          sb *= s;
        }
        ca *= c;
      }
    });
  }
  return t;
}

double integrate_ball_region(const Vec2& x, double delta, const DomainSpec& domain, BallSide side,
                             const std::function<double(const Vec2&)>& f,
                             const QuadratureConfig& cfg) {
  if (!(delta > 0)) throw InvalidHorizon("horizon must be positive");
  const LocalRegion region = LocalRegion::from_domain(domain);
  const auto arcs = region.exterior_arcs(x, delta);
  const auto& rule = gauss_legendre(cfg.gauss_order);

  auto radial = [&](double phi, double r0, double r1) {
    const Vec2 d = direction(phi);
    double acc = 0.0;
    const double half = 0.5 * (r1 - r0), mid = 0.5 * (r1 + r0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = mid + half * rule.nodes[q];
      acc += half * rule.weights[q] * r * f(x + r * d);
    }
    return acc;
  };

  double total = 0.0;
  if (side == BallSide::OutsideOmega) {
    for (const auto& [lo, hi] : arcs) {
      angular_rule(lo, hi, cfg, [&](double phi, double w) {
        const double rb = std::min(region.exit_distance(x, phi), delta);
        total += w * radial(phi, rb, delta);
      });
    }
    return total;
  }
  // Inside: sweep the full circle, split at the arc end points.
  std::vector<double> cuts;
  for (const auto& [lo, hi] : arcs) {
    cuts.push_back(lo);
    cuts.push_back(hi);
  }
  if (cuts.empty()) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + kTwoPi;
    if (hi - lo < 1e-14) continue;
    angular_rule(lo, hi, cfg, [&](double phi, double w) {
      const double rb = std::min(region.exit_distance(x, phi), delta);
      total += w * radial(phi, 0.0, rb);
    });
  }
  return total;
}

LocalRegion neumann_region(const DomainSpec& domain, const Projection& proj) {
  if (domain.is_curved()) return LocalRegion::from_domain(domain);
  return LocalRegion::half_plane(proj.xbar, proj.normal);
}

CollarCoefficients collar_coefficients(const Vec2& x, const Projection& proj, const KernelSet& k,
                                       const LocalRegion& region, const QuadratureConfig& cfg) {
  CollarCoefficients c;
  c.ext = exterior_moments(x, k.delta, region, proj.normal, proj.tangent, cfg);
  const double J = k.j_value();
  const double s = proj.dist;
  const auto& E = c.ext;
  c.m_delta = J * (E(0, 2) - E(2, 0) + 2.0 * s * E(1, 0));
  c.f_factor = J * (E(2, 0) - 2.0 * s * E(1, 0));
  c.g_first = 2.0 * J * E(1, 0);
  return c;
}

double m_delta(const Vec2& x, double delta, const DomainSpec& domain, const QuadratureConfig& cfg) {
  const Projection proj = project(domain, x);
  if (!(proj.dist < delta)) throw InvalidHorizon("point is not in the collar for this horizon");
  return collar_coefficients(x, proj, KernelSet(delta), neumann_region(domain, proj), cfg).m_delta;
}

double contour_integral(const Vec2& x, double delta, const DomainSpec& domain,
                        const std::function<double(const Vec2&)>& f,
                        const QuadratureConfig& cfg) {
  const auto& rule = gauss_legendre(cfg.contour_gauss_order);
  const double H = KernelSet::h_value(delta);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double l = delta * rule.nodes[q];
    acc += delta * rule.weights[q] * H * f(contour_point(domain, x, l));
  }
  return acc;
}

}  // namespace nlflux
