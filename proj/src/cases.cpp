#include <cmath>
#include <numbers>

#include "nlflux/errors.hpp"
#include "nlflux/harness.hpp"

namespace nlflux {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 ellipse_normal_at(double a, double b, const Vec2& xbar) {
  return Vec2(xbar.x() / (a * a), xbar.y() / (b * b)).normalized();
}

}  // namespace

std::string to_string(CaseName c) {
  switch (c) {
    case CaseName::T1_Square: return "T1_Square";
    case CaseName::T2_Disk: return "T2_Disk";
    case CaseName::T3_Ellipse: return "T3_Ellipse";
    case CaseName::PatchLinear: return "PatchLinear";
    case CaseName::CornerSquare: return "CornerSquare";
  }
  return "?";
}

std::optional<CaseName> parse_case(const std::string& s) {
  for (CaseName c : {CaseName::T1_Square, CaseName::T2_Disk, CaseName::T3_Ellipse,
                     CaseName::PatchLinear, CaseName::CornerSquare}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string to_string(PatchGeometry g) {
  switch (g) {
    case PatchGeometry::Square: return "square";
    case PatchGeometry::Disk: return "disk";
    case PatchGeometry::Ellipse: return "ellipse";
  }
  return "?";
}

std::optional<PatchGeometry> parse_geometry(const std::string& s) {
  for (PatchGeometry g : {PatchGeometry::Square, PatchGeometry::Disk, PatchGeometry::Ellipse}) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

std::string ManufacturedCase::label() const {
  if (name == CaseName::PatchLinear) return to_string(name) + "_" + to_string(geometry);
  return to_string(name);
}

ProblemData ManufacturedCase::problem() const {
  ProblemData p;
  p.f = f;
  p.g = g;
  p.g_tangential = g_tangential;
  p.dirichlet = u0;
  p.pin = pin;
  return p;
}

ManufacturedCase make_case(CaseName name, PatchGeometry geometry) {
  ManufacturedCase mc;
  mc.name = name;
  mc.geometry = geometry;
  const PinConstraint bottom_pin_template{Vec2(0.0, -1.0), 0.0};

  auto trig_u = [](const Vec2& x) { return std::sin(kPi * x.x()) * std::cos(kPi * x.y()); };
  auto trig_grad = [](const Vec2& x) {
    return Vec2(kPi * std::cos(kPi * x.x()) * std::cos(kPi * x.y()),
                -kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()));
  };
  auto trig_f = [trig_u](const Vec2& x) { return 2.0 * kPi * kPi * trig_u(x); };

  switch (name) {
    case CaseName::T1_Square:
      mc.domain = DomainSpec::unit_square_mixed();
      mc.u0 = trig_u;
      mc.grad_u0 = trig_grad;
      mc.f = trig_f;
      // Only the edge x = 1 is Neumann: du/dx = -pi cos(pi y) there.
      mc.g = [](int, const Vec2& xb) { return -kPi * std::cos(kPi * xb.y()); };
      break;
    case CaseName::T2_Disk:
      mc.domain = DomainSpec::unit_disk();
      mc.u0 = trig_u;
      mc.grad_u0 = trig_grad;
      mc.f = trig_f;
      mc.g = [](int, const Vec2& xb) {
        const double x = xb.x(), y = xb.y();
        return kPi * x * std::cos(kPi * x) * std::cos(kPi * y) -
               kPi * y * std::sin(kPi * x) * std::sin(kPi * y);
      };
      mc.pin = bottom_pin_template;
      mc.pin->value = trig_u(mc.pin->point);
      break;
    case CaseName::T3_Ellipse:
      mc.domain = DomainSpec::ellipse(2.0, 1.0);
      mc.u0 = trig_u;
      mc.grad_u0 = trig_grad;
      mc.f = trig_f;
      mc.g = [trig_grad](int, const Vec2& xb) {
        return trig_grad(xb).dot(ellipse_normal_at(2.0, 1.0, xb));
      };
      mc.pin = bottom_pin_template;
      mc.pin->value = trig_u(mc.pin->point);
      break;
    case CaseName::PatchLinear: {
      mc.u0 = [](const Vec2& x) { return x.x() + x.y(); };
      mc.grad_u0 = [](const Vec2&) { return Vec2(1.0, 1.0); };
      mc.f = [](const Vec2&) { return 0.0; };
      switch (geometry) {
        case PatchGeometry::Square:
          mc.domain = DomainSpec::unit_square_mixed();
          mc.g = [](int, const Vec2&) { return 1.0; };
          break;
        case PatchGeometry::Disk:
          mc.domain = DomainSpec::unit_disk();
          mc.g = [](int, const Vec2& xb) { return xb.normalized().sum(); };
          mc.pin = PinConstraint{Vec2(0.0, -1.0), -1.0};
          break;
        case PatchGeometry::Ellipse:
          mc.domain = DomainSpec::ellipse(2.0, 1.0);
          mc.g = [](int, const Vec2& xb) { return ellipse_normal_at(2.0, 1.0, xb).sum(); };
          mc.pin = PinConstraint{Vec2(0.0, -1.0), -1.0};
          break;
      }
      break;
    }
    case CaseName::CornerSquare: {
      mc.domain = DomainSpec::unit_square_corner();
      mc.u0 = [](const Vec2& x) { return x.x() * x.x() * x.y() * x.y(); };
      mc.grad_u0 = [](const Vec2& x) {
        return Vec2(2.0 * x.x() * x.y() * x.y(), 2.0 * x.x() * x.x() * x.y());
      };
      mc.f = [](const Vec2& x) { return -2.0 * (x.x() * x.x() + x.y() * x.y()); };
      const int right = mc.domain.corner->first;  // edge x = 1
      const int top = mc.domain.corner->second;   // edge y = 1
      mc.g = [right, top](int seg, const Vec2& xb) {
        if (seg == right) return 2.0 * xb.y() * xb.y();
        if (seg == top) return 2.0 * xb.x() * xb.x();
        throw MissingBoundaryData("no Neumann datum on segment " + std::to_string(seg));
      };
      // Tangents run clockwise: (0,-1) on x = 1 and (1,0) on y = 1.
      mc.g_tangential = [right, top](int seg, const Vec2& xb) {
        if (seg == right) return -4.0 * xb.y();
        if (seg == top) return 4.0 * xb.x();
        throw MissingBoundaryData("no Neumann datum on segment " + std::to_string(seg));
      };
      break;
    }
  }
  return mc;
}

}  // namespace nlflux
