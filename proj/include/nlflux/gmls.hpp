#pragma once

#include <Eigen/Core>
#include <vector>

#include "nlflux/geometry.hpp"

namespace nlflux {

struct Frame {
  Vec2 e1 = Vec2::UnitX();
  Vec2 e2 = Vec2::UnitY();
};

using Basis6 = Eigen::Matrix<double, 6, 1>;

// Polynomial degree of each basis entry; used for the 1/delta scaling.
inline constexpr int kBasisDegree[6] = {0, 1, 1, 2, 2, 2};

// Uniform bucket grid for fixed-radius neighbor queries.
class NeighborGrid {
 public:
  NeighborGrid() = default;
  NeighborGrid(const std::vector<Vec2>& points, double cell);

  // Indices j with |points[j] - x| < radius, in increasing order. radius must
  // not exceed the cell size.
  void query(const std::vector<Vec2>& points, const Vec2& x, double radius,
             std::vector<int>& out) const;
  double cell() const { return cell_; }
  bool empty() const { return cell_ <= 0; }

 private:
  double cell_ = 0.0;
  double x0_ = 0.0, y0_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<int> start_;  // CSR layout over buckets
  std::vector<int> items_;
};

struct PointCloud {
  std::vector<Vec2> points;
  double h = 0.0;
  std::vector<RegionTag> tags;
  std::vector<Frame> frames;
  NeighborGrid grid;

  std::size_t size() const { return points.size(); }
};

// Lattice points (i h, j h) covering the domain and its Dirichlet layer.
PointCloud make_grid_cloud(const DomainSpec& domain, double h, double delta);

// Wraps arbitrary points; tags and frames are computed from the domain.
PointCloud make_cloud(const DomainSpec& domain, std::vector<Vec2> points, double h, double delta);

// Membership radius actually used: slightly below delta so lattice points at
// exactly distance delta are excluded deterministically.
double neighbor_radius(double delta, double h);

std::vector<int> build_neighbors(const PointCloud& cloud, int i, double delta);

Basis6 basis_eval(const Vec2& center, const Frame& frame, const Vec2& y);

struct Stencil {
  int center = -1;
  std::vector<int> neighbors;
  std::vector<double> row_weights;
  double cond_estimate = 0.0;
};

// Weights w with sum_j w_j p(x_j) = tau(p) for every quadratic p, where
// tau_on_basis lists tau applied to the (unscaled) basis of node i.
Stencil functional_row(const PointCloud& cloud, int i, double delta, const Basis6& tau_on_basis);
Stencil functional_row(const PointCloud& cloud, int i, double delta, const Basis6& tau_on_basis,
                       const std::vector<int>& neighbors);

}  // namespace nlflux
