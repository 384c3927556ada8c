#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nlflux/errors.hpp"
#include "nlflux/harness.hpp"

namespace nlflux {

namespace {

struct Quadratic {
  // q(x, y) = c0 + c1 x + c2 y + c3 x^2 + c4 y^2 + c5 x y
  double c[6];
  double operator()(const Vec2& p) const {
    const double x = p.x(), y = p.y();
    return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * y * y + c[5] * x * y;
  }
  Vec2 grad(const Vec2& p) const {
    return Vec2(c[1] + 2 * c[3] * p.x() + c[5] * p.y(), c[2] + 2 * c[4] * p.y() + c[5] * p.x());
  }
  Eigen::Matrix2d hess() const {
    Eigen::Matrix2d H;
    H << 2 * c[3], c[5], c[5], 2 * c[4];
    return H;
  }
  double minus_laplacian() const { return -2.0 * (c[3] + c[4]); }
};

Vec2 segment_normal(const DomainSpec& d, int seg, const Vec2& xbar) {
  if (d.shape == Shape::UnitDisk) return xbar.normalized();
  if (d.shape == Shape::Ellipse) return Vec2(xbar.x() / (d.a * d.a), xbar.y() / (d.b * d.b)).normalized();
  const auto& e = d.segments[seg];
  return rotate_clockwise((e.b - e.a).normalized());
}

ProblemData quadratic_problem(const DomainSpec& d, const Quadratic& q) {
  ProblemData p;
  p.f = [q](const Vec2&) { return q.minus_laplacian(); };
  p.g = [q, d](int seg, const Vec2& xb) { return q.grad(xb).dot(segment_normal(d, seg, xb)); };
  p.g_tangential = [q, d](int seg, const Vec2& xb) {
    const Vec2 n = segment_normal(d, seg, xb);
    return rotate_clockwise(n).dot(q.hess() * n);
  };
  p.dirichlet = q;
  return p;
}

ManufacturedCase case_for(const std::string& domain) {
  if (domain == "square") return make_case(CaseName::T1_Square);
  if (domain == "disk") return make_case(CaseName::T2_Disk);
  if (domain == "ellipse") return make_case(CaseName::T3_Ellipse);
  if (domain == "corner") return make_case(CaseName::CornerSquare);
  throw InvalidConfig("unknown domain '" + domain + "' (expected square, disk, ellipse, corner)");
}

double apply_row(const SparseRow& row, const PointCloud& cloud, const std::function<double(const Vec2&)>& u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < row.cols.size(); ++k) acc += row.vals[k] * u(cloud.points[row.cols[k]]);
  return acc;
}

double row_scale(const SparseRow& row) {
  double s = 0.0;
  for (double v : row.vals) s += std::abs(v);
  return s;
}

Eigen::VectorXd solve_with(const DomainSpec& domain, const PointCloud& cloud, const KernelSet& k,
                           const ProblemData& p, const RunOptions& run) {
  return solve(assemble(domain, cloud, k, p, run.assembly), run.solver).solution;
}

CheckResult make(const std::string& name, const std::string& domain, bool ok, double value,
                 double threshold, const std::string& detail = "") {
  return CheckResult{name, domain, ok, value, threshold, detail};
}

}  // namespace

bool VerificationLedger::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerificationLedger run_verification_suite(const std::vector<std::string>& domains,
                                          const VerificationOptions& opts) {
  VerificationLedger ledger;
  if (domains.empty()) return ledger;
  auto add = [&](CheckResult c) { ledger.checks.push_back(std::move(c)); };
  const double h = opts.h;
  const double delta = opts.ratio * h;
  KernelSet kernels(delta);
  if (opts.seeded_fault) kernels.j_scale = 2.0;

  // Kernel moments, measured by quadrature rather than by formula.
  {
    const DomainSpec disk = DomainSpec::unit_disk();
    const double d = 0.1;
    KernelSet k(d);
    k.j_scale = kernels.j_scale;
    const double jm = integrate_ball_region(Vec2::Zero(), d, disk, BallSide::InsideOmega,
                                            [&](const Vec2& y) { return j_delta(k, y.norm()) * y.squaredNorm(); });
    add(make("kernel.j_second_moment", "all", std::abs(jm - 2.0) <= 1e-10, jm, 2.0));
    const auto& rule = gauss_legendre(8);
    double hm = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double l = d * rule.nodes[q];
      hm += d * rule.weights[q] * h_delta(k, l) * l * l;
    }
    add(make("kernel.h_second_moment", "all", std::abs(hm - 1.0) <= 1e-12, hm, 1.0));
  }

  for (const auto& name : domains) {
    const ManufacturedCase mc = case_for(name);
    const DomainSpec& dom = mc.domain;
    const PointCloud cloud = make_grid_cloud(dom, h, delta);
    const ProblemData problem = mc.problem();
    const Assembler asmb(dom, cloud, kernels, problem, opts.run.assembly);

    // GMLS reproduction of every functional on its own basis.
    {
      std::vector<int> candidates;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.tags[i] != RegionTag::DirichletLayer) candidates.push_back(static_cast<int>(i));
      }
      std::mt19937 rng(20240601);
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      double worst = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        const int i = candidates[pick(rng)];
        Basis6 tau;
        switch (cloud.tags[i]) {
          case RegionTag::NeumannCollar: tau = asmb.neumann_details(i).tau; break;
          case RegionTag::CornerDisk: tau = asmb.corner_details(i).tau; break;
          default: tau = interior_tau(kernels); break;
        }
        const Stencil st = functional_row(cloud, i, delta, tau);
        Basis6 applied = Basis6::Zero();
        for (std::size_t k = 0; k < st.neighbors.size(); ++k) {
          applied += st.row_weights[k] *
                     basis_eval(cloud.points[i], cloud.frames[i], cloud.points[st.neighbors[k]]);
        }
        // Compare in delta-scaled units so every entry has the same weight.
        Basis6 sc;
        for (int k = 0; k < 6; ++k) sc[k] = std::pow(delta, -kBasisDegree[k]);
        const double ref = std::max(tau.cwiseProduct(sc).cwiseAbs().maxCoeff(), 1e-300);
        worst = std::max(worst, (applied - tau).cwiseProduct(sc).cwiseAbs().maxCoeff() / ref);
      }
      add(make("gmls.quadratic_reproduction", name, worst <= 1e-9, worst, 1e-9));
    }

    // Collar coefficient bounds.
    {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      int count = 0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.tags[i] != RegionTag::NeumannCollar) continue;
        const double m = asmb.neumann_details(static_cast<int>(i)).coeff.m_delta / kernels.j_scale;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        ++count;
      }
      std::ostringstream os;
      os << count << " collar nodes, max " << hi;
      add(make("m_delta.nonnegative_bounded", name, count == 0 || (lo >= -1e-12 && hi <= 1.0), lo, 0.0,
               os.str()));
    }

    if (!dom.is_curved()) {
      double worst = 0.0;
      for (int k = 1; k <= 9; ++k) {
        const double s = 0.1 * k * delta;
        Projection p;
        p.xbar = Vec2(1.0, 0.5);
        p.normal = Vec2::UnitX();
        p.tangent = rotate_clockwise(p.normal);
        p.dist = s;
        const Vec2 x = p.xbar - s * p.normal;
        const double m = collar_coefficients(x, p, KernelSet(delta), LocalRegion::half_plane(p.xbar, p.normal),
                                             opts.run.assembly.quad).m_delta;
        const double exact = 8.0 * s * std::pow(delta * delta - s * s, 1.5) / (3.0 * M_PI * std::pow(delta, 4));
        worst = std::max(worst, std::abs(m - exact) / exact);
      }
      add(make("m_delta.flat_closed_form", name, worst <= 1e-9, worst, 1e-9));
    }

    const NonlocalSystem sys = asmb.assemble();
    {
      double worst = 0.0;
      for (int i = 0; i < sys.matrix.rows(); ++i) {
        const RowKind kind = sys.row_kind[i];
        if (kind == RowKind::Dirichlet || kind == RowKind::Pinned) continue;
        double sum = 0.0, scale = 0.0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.matrix, i); it; ++it) {
          sum += it.value();
          scale += std::abs(it.value());
        }
        worst = std::max(worst, std::abs(sum) / scale);
      }
      add(make("assembly.constant_annihilation", name, worst <= 1e-9, worst, 1e-9));
    }

    // Interior rows must act as -Laplacian on quadratics; a wrong kernel
    // normalization shows up here.
    {
      const Quadratic q{{0.3, 1.0, -2.0, 1.0, 1.0, 1.0}};
      double worst = 0.0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.tags[i] != RegionTag::Interior) continue;
        const SparseRow row = asmb.interior_row(static_cast<int>(i));
        worst = std::max(worst, std::abs(apply_row(row, cloud, q) - q.minus_laplacian()) / 4.0);
      }
      add(make("assembly.interior_consistency", name, worst <= 1e-8, worst, 1e-8));
    }

    // On straight boundaries the collar and corner rows are exact for quadratics.
    if (!dom.is_curved()) {
      const Quadratic q{{0.5, -1.0, 0.7, 1.3, -0.4, 0.9}};
      const ProblemData qp = quadratic_problem(dom, q);
      const Assembler qa(dom, cloud, kernels, qp, opts.run.assembly);
      double worst = 0.0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const RegionTag t = cloud.tags[i];
        if (t != RegionTag::NeumannCollar && t != RegionTag::CornerDisk) continue;
        const SparseRow row = t == RegionTag::NeumannCollar ? qa.neumann_row(static_cast<int>(i))
                                                            : qa.corner_row(static_cast<int>(i));
        worst = std::max(worst, std::abs(apply_row(row, cloud, q) - row.rhs) / row_scale(row));
      }
      add(make("assembly.boundary_rows_quadratic_exact", name, worst <= 1e-9, worst, 1e-9));
    }

    if (dom.shape == Shape::UnitSquare) {
      for (double hm : {1.0 / 16.0, 1.0 / 32.0}) {
        const double dm = opts.ratio * hm;
        KernelSet km(dm);
        km.j_scale = kernels.j_scale;
        const PointCloud cm = make_grid_cloud(dom, hm, dm);
        ProblemData mp;
        mp.f = [](const Vec2&) { return -1.0; };
        mp.g = [](int, const Vec2&) { return 0.0; };
        mp.dirichlet = [](const Vec2&) { return 0.0; };
        const Eigen::VectorXd u = solve_with(dom, cm, km, mp, opts.run);
        double umax_in = -1e300, umax_d = -1e300;
        for (std::size_t i = 0; i < cm.size(); ++i) {
          if (cm.tags[i] == RegionTag::DirichletLayer) umax_d = std::max(umax_d, u[i]);
          else umax_in = std::max(umax_in, u[i]);
        }
        std::ostringstream os;
        os << "h=" << hm;
        add(make("assembly.max_principle", name, umax_in <= umax_d + 1e-9, umax_in, umax_d + 1e-9,
                 os.str()));
      }
    }

    // Linear patch test.
    {
      Quadratic lin{{0.0, 1.0, 1.0, 0.0, 0.0, 0.0}};
      ProblemData lp = quadratic_problem(dom, lin);
      if (dom.is_curved()) lp.pin = PinConstraint{Vec2(0.0, -1.0), -1.0};
      if (dom.shape == Shape::Ellipse) {
        std::vector<double> errs;
        for (double hp : {h, 0.5 * h}) {
          KernelSet kp(opts.ratio * hp);
          kp.j_scale = kernels.j_scale;
          const PointCloud cp = make_grid_cloud(dom, hp, opts.ratio * hp);
          errs.push_back(error_norms(solve_with(dom, cp, kp, lp, opts.run), lin, cp).linf);
        }
        const double order = std::log2(errs[0] / errs[1]);
        std::ostringstream os;
        os << "errors " << errs[0] << ", " << errs[1];
        add(make("patch.linear_order", name, order >= 1.8, order, 1.8, os.str()));
      } else {
        const double e = error_norms(solve_with(dom, cloud, kernels, lp, opts.run), lin, cloud).linf;
        add(make("patch.linear_exact", name, e <= 1e-10, e, 1e-10));
      }
    }
  }
  return ledger;
}

}  // namespace nlflux
