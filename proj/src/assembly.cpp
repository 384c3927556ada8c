#include "nlflux/assembly.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "nlflux/errors.hpp"

namespace nlflux {

namespace {

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

// int_{-w}^{w} H_w(|l|) (p_k(point(l)) - p_k(x)) dl for the basis of node x.
template <class PointAt>
Basis6 contour_functional(const Vec2& x, const Frame& frame, double width, int order,
                          PointAt&& point_at) {
  const auto& rule = gauss_legendre(order);
  const double H = KernelSet::h_value(width);
  const Basis6 base = basis_eval(x, frame, x);
  Basis6 acc = Basis6::Zero();
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double l = width * rule.nodes[q];
    acc += (width * rule.weights[q] * H) * (basis_eval(x, frame, point_at(l)) - base);
  }
  return acc;
}

// Second directional derivative along dir, halved: the zero-width limit of
// the contour functional on a straight line.
Basis6 straight_contour_limit(const Frame& frame, const Vec2& dir) {
  const double u = dir.dot(frame.e1), v = dir.dot(frame.e2);
  Basis6 c;
  c << 0.0, 0.0, 0.0, u * u, v * v, u * v;
  return c;
}

}  // namespace

const char* to_string(RowKind kind) {
  switch (kind) {
    case RowKind::Interior: return "Interior";
    case RowKind::Neumann: return "Neumann";
    case RowKind::Corner: return "Corner";
    case RowKind::Dirichlet: return "Dirichlet";
    case RowKind::Pinned: return "Pinned";
  }
  return "?";
}

int resolve_thread_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NLN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

Basis6 interior_tau(const KernelSet& k) {
  const MomentTable B = ball_moments(k.delta);
  const double J = k.j_value();
  Basis6 tau;
  tau << 0.0, 0.0, 0.0, -2.0 * J * B(2, 0), -2.0 * J * B(0, 2), 0.0;
  return tau;
}

int nearest_node(const PointCloud& cloud, const Vec2& p) {
  int best = -1;
  double best_d = 0.0;
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const double d = (cloud.points[j] - p).squaredNorm();
    if (best < 0 || d < best_d) {
      best = static_cast<int>(j);
      best_d = d;
    }
  }
  return best;
}

Assembler::Assembler(const DomainSpec& domain, const PointCloud& cloud, const KernelSet& kernels,
                     const ProblemData& problem, const AssemblyConfig& config)
    : domain_(domain), cloud_(cloud), kernels_(kernels), problem_(problem), config_(config) {
  config_.quad.validate();
  if (problem_.pin && cloud_.size() > 0) pin_node_ = nearest_node(cloud_, problem_.pin->point);
}

SparseRow Assembler::gmls_row(int i, const Basis6& tau, double rhs, RowKind kind) const {
  const Stencil st = functional_row(cloud_, i, kernels_.delta, tau);
  SparseRow row;
  row.cols = st.neighbors;
  row.vals = st.row_weights;
  row.rhs = rhs;
  row.kind = kind;
  return row;
}

SparseRow Assembler::interior_row(int i) const {
  if (!problem_.f) throw MissingBoundaryData("source term f is not set");
  return gmls_row(i, interior_tau(kernels_), problem_.f(cloud_.points[i]), RowKind::Interior);
}

NeumannDetails Assembler::neumann_details(int i) const {
  if (!problem_.f || !problem_.g) throw MissingBoundaryData("Neumann rows need f and g");
  const Vec2& x = cloud_.points[i];
  NeumannDetails d;
  d.proj = project(domain_, x);
  const LocalRegion region = neumann_region(domain_, d.proj);
  d.coeff = collar_coefficients(x, d.proj, kernels_, region, config_.quad);

  Frame frame;
  frame.e1 = d.proj.normal;
  frame.e2 = d.proj.tangent;
  d.contour = contour_functional(x, frame, kernels_.delta, config_.quad.contour_gauss_order,
                                 [&](double l) { return contour_point(domain_, d.proj, x, l); });
  d.kappa_eff = -2.0 * d.contour[1];

  const double J = kernels_.j_value();
  const MomentTable B = ball_moments(kernels_.delta);
  const MomentTable& E = d.coeff.ext;
  Basis6 omega_part;
  omega_part << 0.0, -E(1, 0), -E(0, 1), B(2, 0) - E(2, 0), B(0, 2) - E(0, 2), -E(1, 1);
  omega_part *= J;
  d.tau = -2.0 * omega_part - 2.0 * d.coeff.m_delta * d.contour;

  const double fx = problem_.f(x);
  const double gx = problem_.g(d.proj.segment, d.proj.xbar);
  d.rhs = fx * (1.0 - d.coeff.f_factor) + (d.coeff.g_first + d.coeff.m_delta * d.kappa_eff) * gx;
  return d;
}

SparseRow Assembler::neumann_row(int i) const {
  const NeumannDetails d = neumann_details(i);
  return gmls_row(i, d.tau, d.rhs, RowKind::Neumann);
}

CornerDetails Assembler::corner_details(int i) const {
  if (!domain_.corner) throw DegenerateCornerFrame("domain has no corner");
  if (!problem_.f || !problem_.g || !problem_.g_tangential) {
    throw MissingBoundaryData("corner rows need f, g and the tangential derivative of g");
  }
  const CornerSpec& cs = *domain_.corner;
  int seg1 = cs.first, seg2 = cs.second;
  auto outward = [&](int s) {
    const auto& e = domain_.segments[s];
    return rotate_clockwise((e.b - e.a).normalized()).eval();
  };
  Vec2 n1 = outward(seg1), n2 = outward(seg2);
  // Label the edges so that the frame has the orientation the formula assumes.
  if (cross(n1, n2) > 0) {
    std::swap(seg1, seg2);
    std::swap(n1, n2);
  }
  const double theta = std::acos(std::clamp(-n1.dot(n2), -1.0, 1.0));
  if (!(theta > 0 && theta < M_PI)) throw DegenerateCornerFrame("corner angle must lie in (0, pi)");
  const Vec2 p1 = rotate_clockwise(n1), p2 = rotate_clockwise(n2);

  const Vec2& x = cloud_.points[i];
  const Vec2& c = cs.point;
  const double delta = kernels_.delta;
  const double s1 = (c - x).dot(n1), s2 = (c - x).dot(n2);
  const Vec2 xbar1 = x + s1 * n1, xbar2 = x + s2 * n2;

  const LocalRegion region = LocalRegion::wedge(c, n1, n2);
  const MomentTable E = exterior_moments(x, delta, region, Vec2::UnitX(), Vec2::UnitY(), config_.quad);
  Eigen::Matrix2d N;
  N.col(0) = n1;
  N.col(1) = n2;
  const Eigen::Matrix2d Ninv = N.inverse();
  const Vec2 alpha = Ninv.row(0).transpose(), beta = Ninv.row(1).transpose();
  const Vec2 m1(E(1, 0), E(0, 1));
  Eigen::Matrix2d m2;
  m2 << E(2, 0), E(1, 1), E(1, 1), E(0, 2);
  const double int_d1 = alpha.dot(m1), int_d2 = beta.dot(m1);
  const double int_d1d1 = alpha.dot(m2 * alpha), int_d2d2 = beta.dot(m2 * beta);
  const double int_d1d2 = alpha.dot(m2 * beta);

  const double J = kernels_.j_value();
  CornerDetails d;
  d.d1 = 2.0 * J * (0.5 * int_d1d1 - s1 * int_d1);
  d.d2 = 2.0 * J * (0.5 * int_d2d2 - s2 * int_d2);
  d.branch = d.d1 >= d.d2 ? 1 : 2;

  const Frame frame = cloud_.frames[i];
  const Vec2 dir = d.branch == 1 ? p1 : p2;
  const Vec2 other_n = d.branch == 1 ? n2 : n1;
  const double other_s = d.branch == 1 ? s2 : s1;
  // Distance along the contour line to the other Neumann edge.
  double reach = delta;
  const double dn = std::abs(dir.dot(other_n));
  if (dn > 1e-14) reach = std::max(0.0, other_s) / dn;
  d.width = std::min(delta, reach);
  Basis6 contour;
  if (d.width > 1e-8 * delta) {
    contour = contour_functional(x, frame, d.width, config_.quad.contour_gauss_order,
                                 [&](double l) { return (x + l * dir).eval(); });
  } else {
    contour = straight_contour_limit(frame, dir);
  }

  const MomentTable B = ball_moments(delta);
  const Vec2 e1 = frame.e1, e2 = frame.e2;
  // Omega-part moments of the node's basis, rotated from the Cartesian table.
  auto second = [&](const Vec2& u, const Vec2& v) { return u.dot(m2 * v); };
  Eigen::Matrix2d b2;
  b2 << B(2, 0), 0.0, 0.0, B(0, 2);
  Basis6 omega_part;
  omega_part << 0.0, -e1.dot(m1), -e2.dot(m1), e1.dot(b2 * e1) - second(e1, e1),
      e2.dot(b2 * e2) - second(e2, e2), e1.dot(b2 * e2) - second(e1, e2);
  omega_part *= J;
  const double dd = d.branch == 1 ? d.d1 - d.d2 : d.d2 - d.d1;
  d.tau = -2.0 * omega_part + config_.corner_contour_factor * dd * contour;

  const double fx = problem_.f(x);
  const double g1 = problem_.g(seg1, xbar1), g2 = problem_.g(seg2, xbar2);
  const double dg = problem_.g_tangential(seg1, xbar1) - problem_.g_tangential(seg2, xbar2);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double cot = ct / st;
  const double own = d.branch == 1 ? d.d1 : d.d2;
  const double cross_d = d.branch == 1 ? d.d2 : d.d1;
  d.rhs = fx - own * fx - cross_d * cot * dg +
          2.0 * J * (g1 * int_d1 + g2 * int_d2 + (dg + fx * st * ct) / (2.0 * st) * int_d1d2);
  return d;
}

SparseRow Assembler::corner_row(int i) const {
  const CornerDetails d = corner_details(i);
  return gmls_row(i, d.tau, d.rhs, RowKind::Corner);
}

SparseRow Assembler::dirichlet_row(int i) const {
  if (!problem_.dirichlet) throw MissingBoundaryData("Dirichlet data is not set");
  SparseRow row;
  row.cols = {i};
  row.vals = {1.0};
  row.rhs = problem_.dirichlet(cloud_.points[i]);
  row.kind = RowKind::Dirichlet;
  return row;
}

SparseRow Assembler::pin_row(int i) const {
  SparseRow row;
  row.cols = {i};
  row.vals = {1.0};
  row.rhs = problem_.pin ? problem_.pin->value : 0.0;
  row.kind = RowKind::Pinned;
  return row;
}

SparseRow Assembler::row_for(int i) const {
  if (pin_node_ && *pin_node_ == i) return pin_row(i);
  switch (cloud_.tags[i]) {
    case RegionTag::Interior: return interior_row(i);
    case RegionTag::NeumannCollar: return neumann_row(i);
    case RegionTag::CornerDisk: return corner_row(i);
    case RegionTag::DirichletLayer: return dirichlet_row(i);
  }
  throw Error("unknown region tag");
}

NonlocalSystem Assembler::assemble() const {
  const int n = static_cast<int>(cloud_.size());
  std::vector<SparseRow> rows(n);
  std::vector<std::string> failures(n);
  const int threads = std::min(resolve_thread_count(config_.threads), std::max(1, n));

  auto work = [&](int t) {
    for (int i = t; i < n; i += threads) {
      try {
        rows[i] = row_for(i);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  std::ostringstream msg;
  int failed = 0;
  for (int i = 0; i < n; ++i) {
    if (failures[i].empty()) continue;
    if (failed < 10) {
      msg << (failed ? "; " : "") << "node " << i << " (" << cloud_.points[i].x() << ", "
          << cloud_.points[i].y() << "): " << failures[i];
    }
    ++failed;
  }
  if (failed) throw AssemblyFailure(std::to_string(failed) + " row(s) failed: " + msg.str());

  NonlocalSystem sys;
  sys.rhs.resize(n);
  sys.row_kind.resize(n);
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.cols.size();
  trip.reserve(nnz);
  bool has_corner = false;
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rows[i].cols.size(); ++k) {
      trip.emplace_back(i, rows[i].cols[k], rows[i].vals[k]);
    }
    sys.rhs[i] = rows[i].rhs;
    sys.row_kind[i] = rows[i].kind;
    has_corner = has_corner || rows[i].kind == RowKind::Corner;
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.pinned_node = pin_node_;
  if (has_corner) {
    sys.warnings.push_back("corner rows present: the corner formulation is not known to be coercive");
  }
  return sys;
}

NonlocalSystem assemble(const DomainSpec& domain, const PointCloud& cloud, const KernelSet& kernels,
                        const ProblemData& problem, const AssemblyConfig& config) {
  return Assembler(domain, cloud, kernels, problem, config).assemble();
}

}  // namespace nlflux
