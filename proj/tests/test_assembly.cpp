#include <gtest/gtest.h>

#include <cmath>

#include "nlflux/assembly.hpp"
#include "nlflux/errors.hpp"
#include "nlflux/harness.hpp"

using namespace nlflux;

namespace {

double apply_row(const SparseRow& r, const PointCloud& c, const std::function<double(const Vec2&)>& u) {
  double v = 0;
  for (std::size_t k = 0; k < r.cols.size(); ++k) v += r.vals[k] * u(c.points[r.cols[k]]);
  return v;
}

ProblemData zero_problem() {
  ProblemData p;
  p.f = [](const Vec2&) { return 0.0; };
  p.g = [](int, const Vec2&) { return 0.0; };
  p.g_tangential = [](int, const Vec2&) { return 0.0; };
  p.dirichlet = [](const Vec2&) { return 0.0; };
  return p;
}

}  // namespace

TEST(InteriorTau, SecondMomentsGiveMinusTwo) {
  // -2 J int x^2 over the ball = -2 (4 / (pi d^4)) (pi d^4 / 4)
  const Basis6 t = interior_tau(KernelSet(0.2));
  const Basis6 want = (Basis6() << 0, 0, 0, -2, -2, 0).finished();
  EXPECT_LT((t - want).norm(), 1e-13);
}

TEST(InteriorRow, QuadraticAndConstant) {
  const auto sq = DomainSpec::unit_square_mixed();
  const double h = 1.0 / 16, d = 4 * h;
  const auto cloud = make_grid_cloud(sq, h, d);
  const Assembler A(sq, cloud, KernelSet(d), zero_problem());
  const int i = nearest_node(cloud, Vec2(0.5, 0.5));
  const auto row = A.interior_row(i);
  EXPECT_NEAR(apply_row(row, cloud, [](const Vec2& y) { return y.squaredNorm(); }), -4.0, 1e-10);
  EXPECT_NEAR(apply_row(row, cloud, [](const Vec2&) { return 1.0; }), 0.0, 1e-10);
}

TEST(NeumannRow, FlatEdgeCoefficients) {
  const auto sq = DomainSpec::unit_square_mixed();
  const double h = 1.0 / 32, d = 4 * h;
  const auto cloud = make_grid_cloud(sq, h, d);
  const KernelSet k(d);
  const Assembler A(sq, cloud, k, zero_problem());
  const int i = nearest_node(cloud, Vec2(1 - 2 * h, 0.5));
  ASSERT_EQ(cloud.tags[i], RegionTag::NeumannCollar);
  const auto det = A.neumann_details(i);
  const double s = 2 * h;
  const double flux = 8.0 / (3 * M_PI * std::pow(d, 4)) * std::pow(d * d - s * s, 1.5);
  EXPECT_NEAR(det.coeff.g_first, 2 * flux, 1e-10);
  EXPECT_NEAR(det.coeff.m_delta, 8 * s * std::pow(d * d - s * s, 1.5) / (3 * M_PI * std::pow(d, 4)), 1e-10);
  EXPECT_NEAR(det.kappa_eff, 0.0, 1e-12);
}

TEST(NeumannRow, AnnihilatesTangentialLinear) {
  const auto sq = DomainSpec::unit_square_mixed();
  const double h = 1.0 / 32, d = 4 * h;
  const auto cloud = make_grid_cloud(sq, h, d);
  const Assembler A(sq, cloud, KernelSet(d), zero_problem());
  for (double s : {0.0, h, 3 * h}) {
    const int i = nearest_node(cloud, Vec2(1 - s, 0.5));
    const auto row = A.neumann_row(i);
    EXPECT_NEAR(apply_row(row, cloud, [](const Vec2& y) { return y.y(); }) - row.rhs, 0.0, 1e-9);
  }
}

TEST(NeumannRow, DiskTruncationShrinksWithDelta) {
  // Pointwise consistency of collar rows is first order in delta.
  const auto mc = make_case(CaseName::T2_Disk);
  std::vector<double> deltas = {0.1, 0.05, 0.025}, errs;
  for (double d : deltas) {
    const double h = d / 4;
    const auto cloud = make_grid_cloud(mc.domain, h, d);
    const Assembler A(mc.domain, cloud, KernelSet(d), mc.problem());
    double worst = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (cloud.tags[i] != RegionTag::NeumannCollar || std::abs(cloud.points[i].y()) > 1e-12) continue;
      const auto row = A.neumann_row(static_cast<int>(i));
      worst = std::max(worst, std::abs(apply_row(row, cloud, mc.u0) - row.rhs));
    }
    errs.push_back(worst);
  }
  // The fitted slope sits at 1.00 up to lattice effects.
  EXPECT_GE(fitted_slope(deltas, errs), 0.95);
}

TEST(CornerRow, BisectorIsSymmetric) {
  const auto mc = make_case(CaseName::CornerSquare);
  const double h = 1.0 / 32, d = 4 * h;
  const auto cloud = make_grid_cloud(mc.domain, h, d);
  const Assembler A(mc.domain, cloud, KernelSet(d), mc.problem());
  const int i = nearest_node(cloud, Vec2(1 - 2 * h, 1 - 2 * h));
  ASSERT_EQ(cloud.tags[i], RegionTag::CornerDisk);
  const auto det = A.corner_details(i);
  EXPECT_NEAR(det.d1, det.d2, 1e-10 * std::abs(det.d1));
}

TEST(CornerRow, ExactForQuadraticSolution) {
  // The corner row is built from second-order Taylor data, so u = x^2 + 3xy - y^2 with
  // consistent f, g and tangential derivatives of g must satisfy it exactly.
  const DomainSpec dom = DomainSpec::unit_square_corner();
  ProblemData p;
  auto u = [](const Vec2& y) { return y.x() * y.x() + 3 * y.x() * y.y() - y.y() * y.y(); };
  auto grad = [](const Vec2& y) { return Vec2(2 * y.x() + 3 * y.y(), 3 * y.x() - 2 * y.y()); };
  p.f = [](const Vec2&) { return 0.0; };
  p.dirichlet = u;
  p.g = [&dom, grad](int seg, const Vec2& xb) {
    const auto& e = dom.segments[seg];
    return grad(xb).dot(rotate_clockwise((e.b - e.a).normalized()));
  };
  p.g_tangential = [&dom](int seg, const Vec2&) {
    const auto& e = dom.segments[seg];
    const Vec2 n = rotate_clockwise((e.b - e.a).normalized());
    const Vec2 t = rotate_clockwise(n);
    Eigen::Matrix2d H;
    H << 2, 3, 3, -2;
    return n.dot(H * t);
  };
  const double h = 1.0 / 32, d = 4 * h;
  const auto cloud = make_grid_cloud(dom, h, d);
  const Assembler A(dom, cloud, KernelSet(d), p);
  int checked = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.tags[i] != RegionTag::CornerDisk) continue;
    const auto row = A.corner_row(static_cast<int>(i));
    EXPECT_NEAR(apply_row(row, cloud, u) - row.rhs, 0.0, 1e-8) << cloud.points[i].transpose();
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(DirichletRow, LayerValue) {
  const auto mc = make_case(CaseName::T1_Square);
  const auto cloud = make_cloud(mc.domain, {Vec2(-0.01, 0.3), Vec2(0.5, 0.5)}, 0.0125, 0.05);
  ASSERT_EQ(cloud.tags[0], RegionTag::DirichletLayer);
  const Assembler A(mc.domain, cloud, KernelSet(0.05), mc.problem());
  const auto row = A.dirichlet_row(0);
  EXPECT_NEAR(row.rhs, std::sin(-0.01 * M_PI) * std::cos(0.3 * M_PI), 1e-15);
  ASSERT_EQ(row.cols.size(), 1u);
  EXPECT_EQ(row.vals[0], 1.0);
}

TEST(PinRow, DiskBottomPoint) {
  const auto mc = make_case(CaseName::T2_Disk);
  const double h = 1.0 / 16;
  const auto cloud = make_grid_cloud(mc.domain, h, 4 * h);
  const auto sys = assemble(mc.domain, cloud, KernelSet(4 * h), mc.problem());
  ASSERT_TRUE(sys.pinned_node.has_value());
  const int p = *sys.pinned_node;
  EXPECT_EQ(p, nearest_node(cloud, Vec2(0, -1)));
  EXPECT_NEAR(sys.rhs[p], 0.0, 1e-15);
  EXPECT_EQ(sys.row_kind[p], RowKind::Pinned);
}

TEST(Assemble, ConstantsAnnihilatedAndThreadIndependent) {
  const auto mc = make_case(CaseName::T3_Ellipse);
  const double h = 1.0 / 8;
  const auto cloud = make_grid_cloud(mc.domain, h, 4 * h);
  AssemblyConfig one, three;
  one.threads = 1;
  three.threads = 3;
  const auto a = assemble(mc.domain, cloud, KernelSet(4 * h), mc.problem(), one);
  const auto b = assemble(mc.domain, cloud, KernelSet(4 * h), mc.problem(), three);
  EXPECT_EQ((a.matrix - b.matrix).norm(), 0.0);
  EXPECT_EQ((a.rhs - b.rhs).norm(), 0.0);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(cloud.size());
  const Eigen::VectorXd r = a.matrix * ones;
  for (int i = 0; i < r.size(); ++i) {
    if (a.row_kind[i] == RowKind::Pinned) continue;
    EXPECT_NEAR(r[i], 0.0, 1e-9 * a.matrix.row(i).norm());
  }
}

TEST(Assemble, MissingDataThrows) {
  const auto sq = DomainSpec::unit_square_mixed();
  const auto cloud = make_grid_cloud(sq, 0.125, 0.5);
  ProblemData p = zero_problem();
  p.g = nullptr;
  const Assembler A(sq, cloud, KernelSet(0.5), p);
  EXPECT_THROW(A.assemble(), Error);
}

TEST(Threads, EnvironmentCap) {
  unsetenv("NLN_THREADS");
  EXPECT_EQ(resolve_thread_count(3), 3);
  setenv("NLN_THREADS", "2", 1);
  EXPECT_LE(resolve_thread_count(0), 2);
  EXPECT_EQ(resolve_thread_count(3), 2);
  EXPECT_EQ(resolve_thread_count(1), 1);
  unsetenv("NLN_THREADS");
  EXPECT_GE(resolve_thread_count(0), 1);
}
