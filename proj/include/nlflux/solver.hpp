#pragma once

#include <Eigen/Core>

#include "nlflux/assembly.hpp"

namespace nlflux {

enum class SolveMethod { Auto, SparseDirect, IterativeKrylov };

const char* to_string(SolveMethod m);

struct SolverConfig {
  double tol = 1e-11;
  SolveMethod method = SolveMethod::Auto;
  // Auto switches to the Krylov path above this many unknowns.
  int direct_limit = 20000;
  int max_iterations = 2000;
  // Systems whose estimated condition number exceeds this are reported singular.
  double singular_threshold = 1e13;
};

struct SolveReport {
  Eigen::VectorXd solution;
  double relative_residual = 0.0;
  int iterations = 0;
  SolveMethod method = SolveMethod::SparseDirect;
  double condition_estimate = 0.0;
};

SolveReport solve(const NonlocalSystem& system, const SolverConfig& config = {});

}  // namespace nlflux
