#include "nlflux/gmls.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "nlflux/errors.hpp"
#include "nlflux/kernels.hpp"

namespace nlflux {

NeighborGrid::NeighborGrid(const std::vector<Vec2>& points, double cell) : cell_(cell) {
  if (points.empty() || !(cell > 0)) {
    cell_ = 0.0;
    return;
  }
  double x1 = points[0].x(), y1 = points[0].y();
  x0_ = x1;
  y0_ = y1;
  for (const auto& p : points) {
    x0_ = std::min(x0_, p.x());
    y0_ = std::min(y0_, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  }
  nx_ = static_cast<int>((x1 - x0_) / cell_) + 1;
  ny_ = static_cast<int>((y1 - y0_) / cell_) + 1;
  std::vector<int> bucket(points.size());
  std::vector<int> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const int ix = std::min(nx_ - 1, static_cast<int>((points[k].x() - x0_) / cell_));
    const int iy = std::min(ny_ - 1, static_cast<int>((points[k].y() - y0_) / cell_));
    bucket[k] = iy * nx_ + ix;
    ++count[bucket[k] + 1];
  }
  start_.assign(count.size(), 0);
  for (std::size_t b = 1; b < count.size(); ++b) start_[b] = start_[b - 1] + count[b];
  items_.resize(points.size());
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < points.size(); ++k) items_[fill[bucket[k]]++] = static_cast<int>(k);
}

void NeighborGrid::query(const std::vector<Vec2>& points, const Vec2& x, double radius,
                         std::vector<int>& out) const {
  out.clear();
  if (empty()) return;
  const int cx = static_cast<int>(std::floor((x.x() - x0_) / cell_));
  const int cy = static_cast<int>(std::floor((x.y() - y0_) / cell_));
  const double r2 = radius * radius;
  for (int iy = std::max(0, cy - 1); iy <= std::min(ny_ - 1, cy + 1); ++iy) {
    for (int ix = std::max(0, cx - 1); ix <= std::min(nx_ - 1, cx + 1); ++ix) {
      const int b = iy * nx_ + ix;
      for (int k = start_[b]; k < start_[b + 1]; ++k) {
        const int j = items_[k];
        if ((points[j] - x).squaredNorm() < r2) out.push_back(j);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

double neighbor_radius(double delta, double h) { return delta - 1e-9 * h; }

namespace {

Frame frame_for(const DomainSpec& domain, const Vec2& x, RegionTag tag) {
  Frame f;
  if (tag == RegionTag::NeumannCollar) {
    const Projection p = project(domain, x);
    f.e1 = p.normal;
    f.e2 = p.tangent;
  }
  return f;
}

}  // namespace

PointCloud make_cloud(const DomainSpec& domain, std::vector<Vec2> points, double h, double delta) {
  PointCloud cloud;
  cloud.h = h;
  cloud.points = std::move(points);
  cloud.tags.reserve(cloud.points.size());
  cloud.frames.reserve(cloud.points.size());
  for (const auto& x : cloud.points) {
    const RegionTag tag = classify(domain, x, delta);
    cloud.tags.push_back(tag);
    cloud.frames.push_back(frame_for(domain, x, tag));
  }
  cloud.grid = NeighborGrid(cloud.points, delta);
  return cloud;
}

PointCloud make_grid_cloud(const DomainSpec& domain, double h, double delta) {
  if (!(h > 0) || !(delta > 0)) throw InvalidHorizon("h and delta must be positive");
  double xlo, xhi, ylo, yhi;
  switch (domain.shape) {
    case Shape::UnitDisk:
      xlo = ylo = -1.0;
      xhi = yhi = 1.0;
      break;
    case Shape::Ellipse:
      xlo = -domain.a;
      xhi = domain.a;
      ylo = -domain.b;
      yhi = domain.b;
      break;
    default:
      xlo = ylo = -delta;
      xhi = yhi = 1.0 + delta;
      break;
  }
  const long i0 = static_cast<long>(std::ceil(xlo / h - 1e-9));
  const long i1 = static_cast<long>(std::floor(xhi / h + 1e-9));
  const long j0 = static_cast<long>(std::ceil(ylo / h - 1e-9));
  const long j1 = static_cast<long>(std::floor(yhi / h + 1e-9));
  std::vector<Vec2> pts;
  for (long j = j0; j <= j1; ++j) {
    for (long i = i0; i <= i1; ++i) {
      const Vec2 x(static_cast<double>(i) * h, static_cast<double>(j) * h);
      try {
        classify(domain, x, delta);
      } catch (const OutsideComputationalDomain&) {
        continue;
      }
      pts.push_back(x);
    }
  }
  return make_cloud(domain, std::move(pts), h, delta);
}

std::vector<int> build_neighbors(const PointCloud& cloud, int i, double delta) {
  const double radius = neighbor_radius(delta, cloud.h);
  std::vector<int> out;
  const Vec2& x = cloud.points[i];
  if (!cloud.grid.empty() && radius <= cloud.grid.cell()) {
    cloud.grid.query(cloud.points, x, radius, out);
  } else {
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if ((cloud.points[j] - x).squaredNorm() < radius * radius) out.push_back(static_cast<int>(j));
    }
  }
  if (out.size() < 6) {
    throw InsufficientNeighbors("node " + std::to_string(i) + " has " + std::to_string(out.size()) +
                                " neighbors, need at least 6");
  }
  return out;
}

Basis6 basis_eval(const Vec2& center, const Frame& frame, const Vec2& y) {
  const Vec2 d = y - center;
  const double u = d.dot(frame.e1), v = d.dot(frame.e2);
  Basis6 p;
  p << 1.0, u, v, u * u, v * v, u * v;
  return p;
}

Stencil functional_row(const PointCloud& cloud, int i, double delta, const Basis6& tau_on_basis) {
  return functional_row(cloud, i, delta, tau_on_basis, build_neighbors(cloud, i, delta));
}

Stencil functional_row(const PointCloud& cloud, int i, double delta, const Basis6& tau_on_basis,
                       const std::vector<int>& neighbors) {
  const int n = static_cast<int>(neighbors.size());
  if (n < 6) throw InsufficientNeighbors("fewer than 6 neighbors at node " + std::to_string(i));
  const Vec2& x = cloud.points[i];
  const Frame& frame = cloud.frames[i];

  Basis6 scale;
  for (int k = 0; k < 6; ++k) scale[k] = std::pow(delta, -kBasisDegree[k]);

  Eigen::MatrixXd A(n, 6);
  Eigen::VectorXd sqrtw(n);
  for (int r = 0; r < n; ++r) {
    const Vec2& y = cloud.points[neighbors[r]];
    sqrtw[r] = std::sqrt(gmls_weight(delta, (y - x).norm()));
    A.row(r) = (sqrtw[r] * basis_eval(x, frame, y).cwiseProduct(scale)).transpose();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(6, 6).triangularView<Eigen::Upper>();
  const double r0 = std::abs(R(0, 0)), r5 = std::abs(R(5, 5));
  Stencil st;
  st.center = i;
  st.neighbors = neighbors;
  st.cond_estimate = r5 > 0 ? (r0 / r5) * (r0 / r5) : std::numeric_limits<double>::infinity();
  if (!(st.cond_estimate <= 1e12)) {
    throw SingularNormalEquations("GMLS normal equations are singular at node " + std::to_string(i));
  }
  const Basis6 tau_hat = tau_on_basis.cwiseProduct(scale);
  const Eigen::VectorXd ptau = qr.colsPermutation().transpose() * tau_hat;
  const Eigen::VectorXd v = R.transpose().triangularView<Eigen::Lower>().solve(ptau);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u.head(6) = v;
  u = qr.householderQ() * u;
  st.row_weights.resize(n);
  for (int r = 0; r < n; ++r) st.row_weights[r] = sqrtw[r] * u[r];
  return st;
}

}  // namespace nlflux
