#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlflux/assembly.hpp"
#include "nlflux/solver.hpp"

namespace nlflux {

enum class CaseName { T1_Square, T2_Disk, T3_Ellipse, PatchLinear, CornerSquare };
enum class PatchGeometry { Square, Disk, Ellipse };

std::string to_string(CaseName c);
std::optional<CaseName> parse_case(const std::string& s);
std::string to_string(PatchGeometry g);
std::optional<PatchGeometry> parse_geometry(const std::string& s);

using ScalarField = std::function<double(const Vec2&)>;

struct ManufacturedCase {
  CaseName name = CaseName::T1_Square;
  PatchGeometry geometry = PatchGeometry::Square;
  DomainSpec domain;
  ScalarField u0;
  ScalarField f;
  std::function<Vec2(const Vec2&)> grad_u0;
  std::function<double(int, const Vec2&)> g;
  std::function<double(int, const Vec2&)> g_tangential;  // empty unless needed
  std::optional<PinConstraint> pin;

  // Label used in file names, e.g. "T1_Square" or "PatchLinear_disk".
  std::string label() const;
  ProblemData problem() const;
};

ManufacturedCase make_case(CaseName name, PatchGeometry geometry = PatchGeometry::Square);

struct ErrorNorms {
  double linf = 0.0;
  double l2 = 0.0;
};

// Norms over all nodes that are not Dirichlet-layer nodes; the discrete L2
// norm weights each node by h^2.
ErrorNorms error_norms(const Eigen::VectorXd& solution, const ScalarField& u0,
                       const PointCloud& cloud);

struct RunOptions {
  AssemblyConfig assembly;
  SolverConfig solver;
};

struct LevelResult {
  double h = 0.0;
  double delta = 0.0;
  ErrorNorms error;
  double order_linf = 0.0;  // NaN on the first level
  double order_l2 = 0.0;
  int nodes = 0;
  double residual = 0.0;
  SolveMethod method = SolveMethod::SparseDirect;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::string case_label;
  double ratio = 4.0;
  std::vector<LevelResult> rows;
  std::vector<std::string> warnings;
};

LevelResult run_level(const ManufacturedCase& mc, double ratio, double h, const RunOptions& opts = {});

ConvergenceReport run_convergence(const ManufacturedCase& mc, double ratio,
                                  const std::vector<double>& h_list, const RunOptions& opts = {});

// CSV with header "h,delta,linf,order_linf,l2,order_l2"; first-row orders blank.
std::string format_csv(const ConvergenceReport& report);

struct ReferenceRow {
  double h;
  double linf;
  double l2;
};

// Published reference errors for a case and ratio (empty if none).
std::vector<ReferenceRow> reference_table(const ManufacturedCase& mc, double ratio);

struct BandCheck {
  bool applicable = false;
  bool orders_ok = true;
  bool magnitude_ok = true;
  std::vector<std::string> notes;
  bool passed() const { return orders_ok && magnitude_ok; }
};

// Order band [1.7, 2.5] on the two finest L-infinity transitions and a factor-3
// magnitude check at h = 1/32; patch cases use their own criteria.
BandCheck check_bands(const ManufacturedCase& mc, const ConvergenceReport& report);

std::string summary_json(const ConvergenceReport& report, const BandCheck& band,
                         const ManufacturedCase& mc);

// Max over interior nodes of |row . u0 - f| for the mixed-square geometry.
double interior_truncation_error(double delta, double ratio = 4.0);

// Least-squares slope of log(err) against log(x).
double fitted_slope(const std::vector<double>& x, const std::vector<double>& err);

struct CheckResult {
  std::string name;
  std::string domain;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerificationOptions {
  double h = 1.0 / 16.0;
  double ratio = 4.0;
  bool seeded_fault = false;  // doubles J to check that the suite notices
  RunOptions run;
};

struct VerificationLedger {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

// Domains: "square", "disk", "ellipse", "corner".
VerificationLedger run_verification_suite(const std::vector<std::string>& domains,
                                          const VerificationOptions& opts = {});

}  // namespace nlflux
