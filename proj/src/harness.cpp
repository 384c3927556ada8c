#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "nlflux/errors.hpp"
#include "nlflux/harness.hpp"

namespace nlflux {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_h(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

// Reference errors (h, Linf, L2). Two printed entries (disk at 1/128 and the
// corner case at 1/64) disagree with their own order columns; they are kept
// verbatim and never used as gates.
const std::vector<ReferenceRow> kSquareR4 = {{0.125, 1.45e-1, 3.06e-2},
                                             {0.0625, 2.34e-2, 5.80e-3},
                                             {0.03125, 4.25e-3, 1.30e-3},
                                             {0.015625, 1.00e-3, 3.02e-4},
                                             {0.0078125, 2.48e-4, 7.38e-5}};
const std::vector<ReferenceRow> kSquareR35 = {{0.125, 9.04e-2, 3.01e-2},
                                              {0.0625, 1.37e-2, 5.40e-3},
                                              {0.03125, 2.50e-3, 1.10e-3},
                                              {0.015625, 5.65e-4, 2.68e-4},
                                              {0.0078125, 1.34e-4, 6.53e-5}};
const std::vector<ReferenceRow> kDiskR4 = {{0.125, 3.74e-1, 2.13e-1},
                                           {0.0625, 1.10e-1, 6.88e-2},
                                           {0.03125, 2.68e-2, 1.68e-2},
                                           {0.015625, 6.30e-3, 3.90e-3},
                                           {0.0078125, 1.50e-4, 9.37e-4}};
const std::vector<ReferenceRow> kDiskR35 = {{0.125, 2.98e-1, 1.77e-1},
                                            {0.0625, 8.21e-2, 5.17e-2},
                                            {0.03125, 1.98e-2, 1.24e-2},
                                            {0.015625, 4.70e-3, 2.90e-3},
                                            {0.0078125, 1.10e-3, 6.91e-4}};
const std::vector<ReferenceRow> kEllipseR4 = {{0.125, 2.13e-1, 1.18e-1},
                                              {0.0625, 6.00e-2, 3.32e-2},
                                              {0.03125, 1.43e-2, 7.90e-3},
                                              {0.015625, 3.40e-3, 1.90e-3},
                                              {0.0078125, 8.22e-4, 4.49e-4}};
const std::vector<ReferenceRow> kEllipseR35 = {{0.125, 1.73e-1, 9.60e-2},
                                               {0.0625, 4.59e-2, 2.53e-2},
                                               {0.03125, 1.08e-2, 6.03e-3},
                                               {0.015625, 2.60e-3, 1.40e-3},
                                               {0.0078125, 6.25e-4, 3.41e-4}};
const std::vector<ReferenceRow> kPatchEllipseR4 = {{0.125, 1.71e-1, 7.87e-2},
                                                   {0.0625, 2.89e-2, 1.55e-2},
                                                   {0.03125, 6.01e-3, 3.20e-3},
                                                   {0.015625, 1.20e-3, 6.04e-4},
                                                   {0.0078125, 1.26e-4, 4.69e-5}};
const std::vector<ReferenceRow> kPatchEllipseR35 = {{0.125, 1.14e-1, 5.94e-2},
                                                    {0.0625, 2.16e-2, 1.16e-2},
                                                    {0.03125, 4.50e-3, 2.40e-3},
                                                    {0.015625, 8.35e-4, 4.11e-4},
                                                    {0.0078125, 1.39e-4, 6.20e-5}};
const std::vector<ReferenceRow> kCornerR4 = {{0.125, 7.43e-2, 1.91e-2},
                                             {0.0625, 1.52e-2, 4.01e-3},
                                             {0.03125, 3.30e-3, 9.12e-4},
                                             {0.015625, 7.42e-3, 2.17e-4},
                                             {0.0078125, 1.74e-4, 5.32e-5}};
const std::vector<ReferenceRow> kCornerR35 = {{0.125, 5.45e-2, 1.46e-2},
                                              {0.0625, 1.13e-2, 3.10e-3},
                                              {0.03125, 2.40e-3, 6.97e-4},
                                              {0.015625, 5.60e-4, 1.66e-4},
                                              {0.0078125, 1.31e-4, 4.04e-5}};

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

}  // namespace

ErrorNorms error_norms(const Eigen::VectorXd& solution, const ScalarField& u0,
                       const PointCloud& cloud) {
  ErrorNorms e;
  double sum = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.tags[i] == RegionTag::DirichletLayer) continue;
    const double d = std::abs(solution[static_cast<Eigen::Index>(i)] - u0(cloud.points[i]));
    e.linf = std::max(e.linf, d);
    sum += d * d;
  }
  e.l2 = std::sqrt(cloud.h * cloud.h * sum);
  return e;
}

LevelResult run_level(const ManufacturedCase& mc, double ratio, double h, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  LevelResult r;
  r.h = h;
  r.delta = ratio * h;
  const PointCloud cloud = make_grid_cloud(mc.domain, h, r.delta);
  const ProblemData problem = mc.problem();
  const NonlocalSystem sys = assemble(mc.domain, cloud, KernelSet(r.delta), problem, opts.assembly);
  const SolveReport rep = solve(sys, opts.solver);
  r.error = error_norms(rep.solution, mc.u0, cloud);
  r.nodes = static_cast<int>(cloud.size());
  r.residual = rep.relative_residual;
  r.method = rep.method;
  r.order_linf = r.order_l2 = kNaN;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

ConvergenceReport run_convergence(const ManufacturedCase& mc, double ratio,
                                  const std::vector<double>& h_list, const RunOptions& opts) {
  for (std::size_t k = 1; k < h_list.size(); ++k) {
    if (!same_h(h_list[k - 1], 2.0 * h_list[k])) {
      throw InvalidConfig("h levels must decrease by a factor of two");
    }
  }
  ConvergenceReport rep;
  rep.case_label = mc.label();
  rep.ratio = ratio;
  std::ostringstream failures;
  for (double h : h_list) {
    try {
      rep.rows.push_back(run_level(mc, ratio, h, opts));
    } catch (const Error& e) {
      failures << "h=" << h << ": " << e.what() << "; ";
    }
  }
  if (!failures.str().empty()) throw Error("convergence sweep failed: " + failures.str());
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    auto& cur = rep.rows[k];
    const auto& prev = rep.rows[k - 1];
    cur.order_linf = std::log2(prev.error.linf / cur.error.linf);
    cur.order_l2 = std::log2(prev.error.l2 / cur.error.l2);
  }
  if (mc.name == CaseName::CornerSquare) {
    rep.warnings.push_back("corner rows present: the corner formulation is not known to be coercive");
  }
  return rep;
}

std::string format_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "h,delta,linf,order_linf,l2,order_l2\n";
  for (const auto& r : report.rows) {
    os << fmt(r.h) << ',' << fmt(r.delta) << ',' << fmt(r.error.linf) << ',' << fmt(r.order_linf)
       << ',' << fmt(r.error.l2) << ',' << fmt(r.order_l2) << '\n';
  }
  return os.str();
}

std::vector<ReferenceRow> reference_table(const ManufacturedCase& mc, double ratio) {
  const bool r4 = std::abs(ratio - 4.0) < 1e-12;
  const bool r35 = std::abs(ratio - 3.5) < 1e-12;
  if (!r4 && !r35) return {};
  switch (mc.name) {
    case CaseName::T1_Square: return r4 ? kSquareR4 : kSquareR35;
    case CaseName::T2_Disk: return r4 ? kDiskR4 : kDiskR35;
    case CaseName::T3_Ellipse: return r4 ? kEllipseR4 : kEllipseR35;
    case CaseName::CornerSquare: return r4 ? kCornerR4 : kCornerR35;
    case CaseName::PatchLinear:
      if (mc.geometry == PatchGeometry::Ellipse) return r4 ? kPatchEllipseR4 : kPatchEllipseR35;
      return {};
  }
  return {};
}

BandCheck check_bands(const ManufacturedCase& mc, const ConvergenceReport& report) {
  BandCheck b;
  const auto& rows = report.rows;
  const bool exact_patch = mc.name == CaseName::PatchLinear && mc.geometry != PatchGeometry::Ellipse;
  if (exact_patch) {
    b.applicable = !rows.empty();
    for (const auto& r : rows) {
      if (!(r.error.linf <= 1e-10)) {
        b.magnitude_ok = false;
        b.notes.push_back("h=" + fmt(r.h) + ": patch error " + fmt(r.error.linf) + " > 1e-10");
      }
    }
    return b;
  }
  const bool patch = mc.name == CaseName::PatchLinear;
  const double lo = patch ? 2.0 : 1.7;
  const double hi = patch ? std::numeric_limits<double>::infinity() : 2.5;
  if (rows.size() >= 3) {
    b.applicable = true;
    for (std::size_t k = rows.size() - 2; k < rows.size(); ++k) {
      const double o = rows[k].order_linf;
      if (!(o >= lo && o <= hi)) {
        b.orders_ok = false;
        b.notes.push_back("h=" + fmt(rows[k].h) + ": Linf order " + fmt(o) + " outside band");
      }
    }
  }
  if (!patch) {
    for (const auto& ref : reference_table(mc, report.ratio)) {
      if (!same_h(ref.h, 1.0 / 32.0)) continue;
      for (const auto& r : rows) {
        if (!same_h(r.h, ref.h)) continue;
        b.applicable = true;
        const double q = r.error.linf / ref.linf;
        if (!(q <= 3.0 && q >= 1.0 / 3.0)) {
          b.magnitude_ok = false;
          b.notes.push_back("h=" + fmt(r.h) + ": Linf " + fmt(r.error.linf) + " vs reference " +
                            fmt(ref.linf));
        }
      }
    }
  }
  return b;
}

std::string summary_json(const ConvergenceReport& report, const BandCheck& band,
                         const ManufacturedCase& mc) {
  nlohmann::ordered_json j;
  j["case"] = to_string(mc.name);
  if (mc.name == CaseName::PatchLinear) j["geometry"] = to_string(mc.geometry);
  j["ratio"] = report.ratio;
  j["l2_weight"] = "h^2 per node";
  j["pass"] = {{"applicable", band.applicable},
               {"orders", band.orders_ok},
               {"magnitude", band.magnitude_ok},
               {"overall", band.passed()}};
  j["notes"] = band.notes;
  j["warnings"] = report.warnings;
  auto& levels = j["levels"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["h"] = r.h;
    row["delta"] = r.delta;
    row["nodes"] = r.nodes;
    row["linf"] = r.error.linf;
    row["l2"] = r.error.l2;
    row["order_linf"] = std::isnan(r.order_linf) ? nlohmann::ordered_json() : nlohmann::ordered_json(r.order_linf);
    row["order_l2"] = std::isnan(r.order_l2) ? nlohmann::ordered_json() : nlohmann::ordered_json(r.order_l2);
    row["residual"] = r.residual;
    row["solver"] = to_string(r.method);
    row["seconds"] = r.seconds;
    levels.push_back(row);
  }
  return j.dump(2);
}

double interior_truncation_error(double delta, double ratio) {
  const ManufacturedCase mc = make_case(CaseName::T1_Square);
  const double h = delta / ratio;
  const PointCloud cloud = make_grid_cloud(mc.domain, h, delta);
  const ProblemData problem = mc.problem();
  const Assembler asmb(mc.domain, cloud, KernelSet(delta), problem);
  double worst = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.tags[i] != RegionTag::Interior) continue;
    const SparseRow row = asmb.interior_row(static_cast<int>(i));
    double lhs = 0.0;
    for (std::size_t k = 0; k < row.cols.size(); ++k) lhs += row.vals[k] * mc.u0(cloud.points[row.cols[k]]);
    worst = std::max(worst, std::abs(lhs - row.rhs));
  }
  return worst;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& err) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lx = std::log(x[k]), ly = std::log(err[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nlflux
