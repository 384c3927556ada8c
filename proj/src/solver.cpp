#include "nlflux/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>
#include <sstream>

#include "nlflux/errors.hpp"

namespace nlflux {

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;

double relative_residual(const NonlocalSystem& sys, const Eigen::VectorXd& u) {
  const double r = (sys.matrix * u - sys.rhs).norm();
  const double b = sys.rhs.norm();
  return b > 0 ? r / b : r;
}

double one_norm(const ColMatrix& A) {
  double best = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    double col = 0.0;
    for (ColMatrix::InnerIterator it(A, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

// Power iteration on A^{-1} with the existing factorization; a lower bound for
// the inverse norm that is large whenever A has a near-null vector.
template <class Factor>
double inverse_norm_estimate(const Factor& lu, int n) {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < 6; ++it) {
    Eigen::VectorXd w = lu.solve(v);
    const double nw = w.norm();
    if (!std::isfinite(nw)) return std::numeric_limits<double>::infinity();
    est = nw;
    if (nw == 0) break;
    v = w / nw;
  }
  return est;
}

SolveReport solve_direct(const NonlocalSystem& sys, const SolverConfig& cfg) {
  const ColMatrix A = sys.matrix;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SingularMatrix("sparse LU failed: " + lu.lastErrorMessage());
  SolveReport rep;
  rep.method = SolveMethod::SparseDirect;
  rep.condition_estimate = one_norm(A) * inverse_norm_estimate(lu, static_cast<int>(A.rows()));
  if (!(rep.condition_estimate < cfg.singular_threshold)) {
    std::ostringstream os;
    os << "matrix is numerically singular (condition estimate " << rep.condition_estimate << ")";
    throw SingularMatrix(os.str());
  }
  rep.solution = lu.solve(sys.rhs);
  rep.relative_residual = relative_residual(sys, rep.solution);
  // A couple of refinement sweeps recover digits lost to pivot growth.
  for (int it = 0; it < 3 && rep.relative_residual > cfg.tol; ++it) {
    const Eigen::VectorXd r = sys.rhs - sys.matrix * rep.solution;
    rep.solution += lu.solve(r);
    rep.relative_residual = relative_residual(sys, rep.solution);
    ++rep.iterations;
  }
  if (!(rep.relative_residual <= cfg.tol)) {
    std::ostringstream os;
    os << "direct solve residual " << rep.relative_residual << " exceeds tolerance " << cfg.tol;
    throw NoConvergence(os.str());
  }
  return rep;
}

SolveReport solve_krylov(const NonlocalSystem& sys, const SolverConfig& cfg) {
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::IncompleteLUT<double>> it;
  it.preconditioner().setDroptol(1e-5);
  it.preconditioner().setFillfactor(20);
  it.setTolerance(cfg.tol * 0.1);
  it.setMaxIterations(cfg.max_iterations);
  it.compute(sys.matrix);
  if (it.info() != Eigen::Success) throw SingularMatrix("incomplete LU preconditioner failed");
  SolveReport rep;
  rep.method = SolveMethod::IterativeKrylov;
  rep.solution = it.solve(sys.rhs);
  rep.iterations = static_cast<int>(it.iterations());
  rep.relative_residual = relative_residual(sys, rep.solution);
  if (!rep.solution.allFinite() || !(rep.relative_residual <= cfg.tol)) {
    std::ostringstream os;
    os << "BiCGSTAB stopped after " << rep.iterations << " iterations with residual "
       << rep.relative_residual;
    throw NoConvergence(os.str());
  }
  return rep;
}

}  // namespace

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Auto: return "auto";
    case SolveMethod::SparseDirect: return "sparse_direct";
    case SolveMethod::IterativeKrylov: return "iterative_krylov";
  }
  return "?";
}

SolveReport solve(const NonlocalSystem& system, const SolverConfig& config) {
  if (system.matrix.rows() != system.matrix.cols() || system.matrix.rows() != system.rhs.size()) {
    throw InvalidConfig("system must be square with one right-hand side entry per row");
  }
  if (system.matrix.rows() == 0) return SolveReport{};
  SolveMethod m = config.method;
  if (m == SolveMethod::Auto) {
    m = system.matrix.rows() <= config.direct_limit ? SolveMethod::SparseDirect
                                                     : SolveMethod::IterativeKrylov;
  }
  return m == SolveMethod::SparseDirect ? solve_direct(system, config) : solve_krylov(system, config);
}

}  // namespace nlflux
