#include <gtest/gtest.h>

#include <cmath>

#include "nlflux/errors.hpp"
#include "nlflux/harness.hpp"

using namespace nlflux;

namespace {

ConvergenceReport synthetic(const std::string& label, std::vector<double> linf) {
  ConvergenceReport rep;
  rep.case_label = label;
  rep.ratio = 4.0;
  double h = 0.125;
  for (std::size_t k = 0; k < linf.size(); ++k, h /= 2) {
    LevelResult r;
    r.h = h;
    r.delta = 4 * h;
    r.error.linf = linf[k];
    r.error.l2 = linf[k] / 2;
    r.order_linf = k ? std::log2(linf[k - 1] / linf[k]) : NAN;
    r.order_l2 = r.order_linf;
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace

TEST(Names, RoundTrip) {
  for (auto c : {CaseName::T1_Square, CaseName::T2_Disk, CaseName::T3_Ellipse, CaseName::PatchLinear,
                 CaseName::CornerSquare}) {
    EXPECT_EQ(parse_case(to_string(c)), c);
  }
  EXPECT_FALSE(parse_case("T9").has_value());
  EXPECT_EQ(parse_geometry("disk"), PatchGeometry::Disk);
}

TEST(ErrorNorms, ExactAndSingleNode) {
  const auto mc = make_case(CaseName::T1_Square);
  const double h = 0.125;
  const auto cloud = make_grid_cloud(mc.domain, h, 0.5);
  Eigen::VectorXd u(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) u[i] = mc.u0(cloud.points[i]);
  auto e = error_norms(u, mc.u0, cloud);
  EXPECT_EQ(e.linf, 0.0);
  EXPECT_EQ(e.l2, 0.0);
  const int i = nearest_node(cloud, Vec2(0.5, 0.5));
  u[i] += 0.3;
  e = error_norms(u, mc.u0, cloud);
  EXPECT_NEAR(e.linf, 0.3, 1e-15);
  EXPECT_NEAR(e.l2, h * 0.3, 1e-15);
}

TEST(ErrorNorms, DirichletLayerExcluded) {
  const auto mc = make_case(CaseName::T1_Square);
  const auto cloud = make_grid_cloud(mc.domain, 0.125, 0.5);
  Eigen::VectorXd u(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    u[i] = mc.u0(cloud.points[i]) + (cloud.tags[i] == RegionTag::DirichletLayer ? 5.0 : 0.0);
  }
  EXPECT_EQ(error_norms(u, mc.u0, cloud).linf, 0.0);
}

TEST(Csv, HeaderBlankFirstOrdersAndFormat) {
  const auto csv = format_csv(synthetic("T1_Square", {1e-2, 2.5e-3}));
  EXPECT_EQ(csv,
            "h,delta,linf,order_linf,l2,order_l2\n"
            "1.250000e-01,5.000000e-01,1.000000e-02,,5.000000e-03,\n"
            "6.250000e-02,2.500000e-01,2.500000e-03,2.000000e+00,1.250000e-03,2.000000e+00\n");
}

TEST(Csv, RepeatedRunsAreByteIdentical) {
  const auto mc = make_case(CaseName::CornerSquare);
  const auto a = format_csv(run_convergence(mc, 4.0, {0.125, 0.0625}));
  const auto b = format_csv(run_convergence(mc, 4.0, {0.125, 0.0625}));
  EXPECT_EQ(a, b);
}

TEST(Convergence, RejectsNonHalvingLevels) {
  EXPECT_THROW(run_convergence(make_case(CaseName::T1_Square), 4.0, {0.125, 0.1}), InvalidConfig);
}

TEST(Convergence, SquareOrdersNearTwo) {
  const auto rep = run_convergence(make_case(CaseName::T1_Square), 4.0, {0.125, 0.0625, 0.03125});
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_TRUE(std::isnan(rep.rows[0].order_linf));
  for (int k = 1; k < 3; ++k) {
    EXPECT_GT(rep.rows[k].order_linf, 1.7);
    EXPECT_LT(rep.rows[k].order_linf, 2.5);
  }
}

TEST(Convergence, SquarePatchIsExact) {
  const auto r = run_level(make_case(CaseName::PatchLinear, PatchGeometry::Square), 4.0, 1.0 / 16);
  EXPECT_LT(r.error.linf, 1e-10);
}

TEST(Reference, PublishedValues) {
  const auto t1 = reference_table(make_case(CaseName::T1_Square), 4.0);
  ASSERT_FALSE(t1.empty());
  bool found = false;
  for (const auto& r : t1) {
    if (std::abs(r.h - 1.0 / 32) < 1e-15) {
      EXPECT_EQ(r.linf, 4.25e-3);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(reference_table(make_case(CaseName::PatchLinear), 4.0).empty());
}

TEST(Bands, OrderAndMagnitudeLogic) {
  const auto mc = make_case(CaseName::T1_Square);
  // Reference at h = 1/32 is 4.25e-3.
  auto good = check_bands(mc, synthetic("T1_Square", {6.8e-2, 1.6e-2, 4.0e-3, 1.0e-3}));
  EXPECT_TRUE(good.applicable);
  EXPECT_TRUE(good.passed());
  auto slow = check_bands(mc, synthetic("T1_Square", {6.8e-2, 3.4e-2, 1.7e-2, 8.5e-3}));
  EXPECT_FALSE(slow.orders_ok);
  auto big = check_bands(mc, synthetic("T1_Square", {1.2, 0.3, 0.075, 0.019}));
  EXPECT_TRUE(big.orders_ok);
  EXPECT_FALSE(big.magnitude_ok);
}

TEST(Slope, FitsPowerLaw) {
  EXPECT_NEAR(fitted_slope({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}), 2.0, 1e-12);
}

TEST(Verification, EmptyDomainList) {
  EXPECT_TRUE(run_verification_suite({}).checks.empty());
  EXPECT_TRUE(run_verification_suite({}).all_passed());
}

TEST(Verification, SeededFaultIsCaught) {
  VerificationOptions opts;
  opts.seeded_fault = true;
  const auto ledger = run_verification_suite({"disk"}, opts);
  EXPECT_FALSE(ledger.all_passed());
  bool consistency_failed = false;
  for (const auto& c : ledger.checks) {
    if (c.name == "assembly.interior_consistency" && !c.passed) consistency_failed = true;
  }
  EXPECT_TRUE(consistency_failed);
}

TEST(Verification, UnknownDomainThrows) {
  EXPECT_THROW(run_verification_suite({"torus"}), Error);
}
