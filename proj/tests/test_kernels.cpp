#include <gtest/gtest.h>

#include <cmath>

#include "nlflux/kernels.hpp"
#include "nlflux/quadrature.hpp"

using namespace nlflux;

TEST(Kernel, JValueInsideHorizon) {
  const KernelSet k(0.1);
  EXPECT_NEAR(j_delta(k, 0.05), 4.0 / (M_PI * 1e-4), 1e-8);
  EXPECT_NEAR(j_delta(k, 0.05), 1.27324e4, 0.1);
  EXPECT_EQ(j_delta(k, 0.2), 0.0);
}

TEST(Kernel, JSecondMomentByRadialQuadrature) {
  // Oracle: independent midpoint rule in polar coordinates.
  const KernelSet k(0.1);
  const int n = 200000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * k.delta / n;
    sum += j_delta(k, r) * r * r * 2 * M_PI * r * (k.delta / n);
  }
  EXPECT_NEAR(sum, 2.0, 1e-8);
}

TEST(Kernel, HValueAndSecondMoment) {
  const KernelSet k(0.1);
  EXPECT_NEAR(h_delta(k, 0.0), 1500.0, 1e-9);
  EXPECT_EQ(h_delta(k, 0.15), 0.0);
  const auto& g = gauss_legendre(8);
  double m2 = 0, m0 = 0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    const double l = 0.1 * g.nodes[q];
    m2 += 0.1 * g.weights[q] * h_delta(k, l) * l * l;
    m0 += 0.1 * g.weights[q] * h_delta(k, l);
  }
  EXPECT_NEAR(m2, 1.0, 1e-12);
  EXPECT_NEAR(m0 * k.delta * k.delta, kContourKernelMass, 1e-12);
}

TEST(Kernel, GmlsWeight) {
  EXPECT_EQ(gmls_weight(0.1, 0.0), 1.0);
  EXPECT_NEAR(gmls_weight(0.1, 0.05), 0.0625, 1e-15);
  EXPECT_EQ(gmls_weight(0.1, 0.1), 0.0);
  EXPECT_EQ(gmls_weight(0.1, 0.3), 0.0);
}

TEST(Kernel, ScaleHookMultipliesJ) {
  KernelSet k(0.2);
  k.j_scale = 2.0;
  EXPECT_NEAR(k.j_value(), 8.0 / (M_PI * std::pow(0.2, 4)), 1e-9);
}
