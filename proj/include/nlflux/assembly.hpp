#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlflux/gmls.hpp"
#include "nlflux/kernels.hpp"
#include "nlflux/quadrature.hpp"

namespace nlflux {

struct PinConstraint {
  Vec2 point;
  double value = 0.0;
};

struct ProblemData {
  std::function<double(const Vec2&)> f;
  // Neumann datum on boundary segment `segment`, evaluated at xbar.
  std::function<double(int segment, const Vec2& xbar)> g;
  // Derivative of g along p = (n2, -n1); only corner rows need it.
  std::function<double(int segment, const Vec2& xbar)> g_tangential;
  std::function<double(const Vec2&)> dirichlet;
  std::optional<PinConstraint> pin;
};

enum class RowKind { Interior, Neumann, Corner, Dirichlet, Pinned };

const char* to_string(RowKind kind);

struct AssemblyConfig {
  QuadratureConfig quad;
  // Multiplier in front of (D1 - D2) times the contour integral in corner rows.
  double corner_contour_factor = 2.0;
  // 0 means the hardware concurrency. NLN_THREADS, when set, caps either choice.
  int threads = 0;
};

struct SparseRow {
  std::vector<int> cols;
  std::vector<double> vals;
  double rhs = 0.0;
  RowKind kind = RowKind::Interior;
};

struct NonlocalSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd rhs;
  std::optional<int> pinned_node;
  std::vector<RowKind> row_kind;
  std::vector<std::string> warnings;
};

// Intermediate quantities of a Neumann-collar row, exposed for testing.
struct NeumannDetails {
  Projection proj;
  CollarCoefficients coeff;
  Basis6 contour;        // int H (p_k(x_l) - p_k(x)) dl
  double kappa_eff = 0;  // -2 int H (x_l - x).n dl
  Basis6 tau;
  double rhs = 0;
};

struct CornerDetails {
  double d1 = 0, d2 = 0;
  int branch = 1;
  double width = 0;  // half-width of the truncated contour
  Basis6 tau;
  double rhs = 0;
};

int resolve_thread_count(int requested);

// tau applied to the basis for an interior (full ball) row.
Basis6 interior_tau(const KernelSet& k);

int nearest_node(const PointCloud& cloud, const Vec2& p);

class Assembler {
 public:
  Assembler(const DomainSpec& domain, const PointCloud& cloud, const KernelSet& kernels,
            const ProblemData& problem, const AssemblyConfig& config = {});

  SparseRow interior_row(int i) const;
  SparseRow neumann_row(int i) const;
  SparseRow corner_row(int i) const;
  SparseRow dirichlet_row(int i) const;
  SparseRow pin_row(int i) const;

  NeumannDetails neumann_details(int i) const;
  CornerDetails corner_details(int i) const;

  NonlocalSystem assemble() const;

 private:
  SparseRow gmls_row(int i, const Basis6& tau, double rhs, RowKind kind) const;
  SparseRow row_for(int i) const;

  const DomainSpec& domain_;
  const PointCloud& cloud_;
  KernelSet kernels_;
  ProblemData problem_;
  AssemblyConfig config_;
  std::optional<int> pin_node_;
};

NonlocalSystem assemble(const DomainSpec& domain, const PointCloud& cloud, const KernelSet& kernels,
                        const ProblemData& problem, const AssemblyConfig& config = {});

}  // namespace nlflux
