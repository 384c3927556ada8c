#include <gtest/gtest.h>

#include "nlflux/errors.hpp"
#include "nlflux/harness.hpp"
#include "nlflux/solver.hpp"

using namespace nlflux;

namespace {

NonlocalSystem system_for(const ManufacturedCase& mc, const ProblemData& p, double h, PointCloud& cloud) {
  cloud = make_grid_cloud(mc.domain, h, 4 * h);
  return assemble(mc.domain, cloud, KernelSet(4 * h), p);
}

}  // namespace

TEST(Solver, IdentitySystem) {
  NonlocalSystem s;
  s.matrix.resize(5, 5);
  s.matrix.setIdentity();
  s.rhs = (Eigen::VectorXd(5) << 1, -2, 3, 0.5, 7).finished();
  const auto rep = solve(s);
  EXPECT_EQ((rep.solution - s.rhs).norm(), 0.0);
  EXPECT_EQ(rep.relative_residual, 0.0);
}

TEST(Solver, ConstantDirichletDataGivesConstantSolution) {
  const auto mc = make_case(CaseName::T1_Square);
  ProblemData p;
  p.f = [](const Vec2&) { return 0.0; };
  p.g = [](int, const Vec2&) { return 0.0; };
  p.dirichlet = [](const Vec2&) { return 1.75; };
  PointCloud cloud;
  const auto rep = solve(system_for(mc, p, 1.0 / 16, cloud));
  EXPECT_LT((rep.solution.array() - 1.75).abs().maxCoeff(), 1e-11);
}

TEST(Solver, SquareErrorInPublishedTier) {
  // Published L-infinity error at h = 1/16, delta = 4h is 2.34e-2.
  const auto mc = make_case(CaseName::T1_Square);
  const auto r = run_level(mc, 4.0, 1.0 / 16);
  EXPECT_LT(r.error.linf, 3 * 2.34e-2);
  EXPECT_GT(r.error.linf, 2.34e-2 / 3);
  EXPECT_LT(r.residual, 1e-11);
}

TEST(Solver, KrylovAgreesWithDirect) {
  const auto mc = make_case(CaseName::T1_Square);
  PointCloud cloud;
  const auto sys = system_for(mc, mc.problem(), 1.0 / 16, cloud);
  SolverConfig direct, krylov;
  direct.method = SolveMethod::SparseDirect;
  krylov.method = SolveMethod::IterativeKrylov;
  krylov.tol = 1e-12;
  const auto a = solve(sys, direct);
  const auto b = solve(sys, krylov);
  EXPECT_EQ(b.method, SolveMethod::IterativeKrylov);
  EXPECT_LT((a.solution - b.solution).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(Solver, UnpinnedPureNeumannIsDetected) {
  const auto mc = make_case(CaseName::T2_Disk);
  ProblemData p = mc.problem();
  p.pin.reset();
  PointCloud cloud;
  const auto sys = system_for(mc, p, 1.0 / 8, cloud);
  // The constant vector is a null vector of the unpinned operator.
  EXPECT_LT((sys.matrix * Eigen::VectorXd::Ones(cloud.size())).norm(), 1e-9 * sys.matrix.norm());
  try {
    solve(sys);
    FAIL() << "singular system was solved";
  } catch (const SingularMatrix&) {
  } catch (const NoConvergence&) {
  }
}
