// Command-line front end: convergence sweeps and the verification suite.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "nlflux/errors.hpp"
#include "nlflux/harness.hpp"

namespace fs = std::filesystem;
using nlflux::InvalidConfig;

namespace {

struct RunConfig {
  std::string case_name = "T1_Square";
  std::string geometry = "square";
  double ratio = 4.0;
  std::vector<double> h_levels = {0.125, 0.0625, 0.03125, 0.015625};
  double solver_tol = 1e-11;
  nlflux::QuadratureConfig quad;
  std::string output_dir = "out";
  int threads = 0;
  double corner_contour_factor = 2.0;
};

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidConfig(std::string("config field '") + key + "' has the wrong type (got " +
                        j.at(key).dump() + ")");
  }
}

void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(path + ":" + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  read_field(j, "case", cfg.case_name);
  read_field(j, "geometry", cfg.geometry);
  read_field(j, "ratio", cfg.ratio);
  read_field(j, "h_levels", cfg.h_levels);
  read_field(j, "solver_tol", cfg.solver_tol);
  read_field(j, "output_dir", cfg.output_dir);
  read_field(j, "threads", cfg.threads);
  read_field(j, "corner_contour_factor", cfg.corner_contour_factor);
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    if (!q.is_object()) throw InvalidConfig("config field 'quadrature' must be an object");
    read_field(q, "gauss_order", cfg.quad.gauss_order);
    read_field(q, "rel_tol", cfg.quad.rel_tol);
    read_field(q, "contour_gauss_order", cfg.quad.contour_gauss_order);
  }
}

void validate(const RunConfig& cfg) {
  if (!nlflux::parse_case(cfg.case_name)) throw InvalidConfig("unknown case '" + cfg.case_name + "'");
  if (!nlflux::parse_geometry(cfg.geometry)) throw InvalidConfig("unknown geometry '" + cfg.geometry + "'");
  if (!(cfg.ratio > 2.0 && cfg.ratio <= 8.0)) throw InvalidConfig("ratio must lie in (2, 8]");
  if (cfg.h_levels.empty()) throw InvalidConfig("h_levels must not be empty");
  for (double h : cfg.h_levels) {
    const double e = std::log2(h);
    if (!(h > 0) || std::abs(e - std::round(e)) > 1e-12) {
      throw InvalidConfig("h_levels must be powers of two");
    }
  }
  if (!(cfg.solver_tol > 0)) throw InvalidConfig("solver_tol must be positive");
  if (!(cfg.corner_contour_factor > 0)) throw InvalidConfig("corner_contour_factor must be positive");
  cfg.quad.validate();
}

std::string ratio_tag(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

int cmd_converge(RunConfig cfg) {
  validate(cfg);
  const auto mc = nlflux::make_case(*nlflux::parse_case(cfg.case_name), *nlflux::parse_geometry(cfg.geometry));
  nlflux::RunOptions opts;
  opts.assembly.quad = cfg.quad;
  opts.assembly.threads = cfg.threads;
  opts.assembly.corner_contour_factor = cfg.corner_contour_factor;
  opts.solver.tol = cfg.solver_tol;

  const fs::path dir(cfg.output_dir);
  const fs::path csv = dir / (mc.label() + "_r" + ratio_tag(cfg.ratio) + ".csv");
  const fs::path summary = dir / "summary.json";
  try {
    const auto report = nlflux::run_convergence(mc, cfg.ratio, cfg.h_levels, opts);
    const auto band = nlflux::check_bands(mc, report);
    fs::create_directories(dir);
    std::ofstream(csv) << nlflux::format_csv(report);
    std::ofstream(summary) << nlflux::summary_json(report, band, mc) << '\n';

    std::cout << mc.label() << "  delta/h = " << cfg.ratio << '\n';
    std::cout << std::setw(12) << "h" << std::setw(8) << "nodes" << std::setw(14) << "Linf" << std::setw(8)
              << "order" << std::setw(14) << "L2" << std::setw(8) << "order" << std::setw(10) << "sec\n";
    auto order = [](double o) {
      std::ostringstream os;
      if (std::isnan(o)) os << "--";
      else os << std::fixed << std::setprecision(2) << o;
      return os.str();
    };
    for (const auto& r : report.rows) {
      std::ostringstream line;
      line << std::setw(12) << r.h << std::setw(8) << r.nodes << std::scientific << std::setprecision(3)
           << std::setw(14) << r.error.linf << std::setw(8) << order(r.order_linf) << std::setw(14) << r.error.l2
           << std::setw(8) << order(r.order_l2) << std::fixed << std::setprecision(2) << std::setw(9) << r.seconds;
      std::cout << line.str() << '\n';
    }
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& n : band.notes) std::cout << "band: " << n << '\n';
    std::cout << "wrote " << csv.string() << " and " << summary.string() << '\n';
    if (band.applicable && !band.passed()) {
      std::cout << "acceptance band: FAIL\n";
      return 2;
    }
    std::cout << "acceptance band: " << (band.applicable ? "PASS" : "n/a") << '\n';
    return 0;
  } catch (...) {
    std::error_code ec;
    fs::remove(csv, ec);
    fs::remove(summary, ec);
    throw;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_verify(const std::string& domains, bool seeded_fault, double h) {
  nlflux::VerificationOptions opts;
  opts.seeded_fault = seeded_fault;
  opts.h = h;
  const auto ledger = nlflux::run_verification_suite(split_list(domains), opts);
  for (const auto& c : ledger.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(40) << c.name << std::setw(9)
              << c.domain << std::right << " value=" << std::setprecision(4) << c.value
              << " threshold=" << c.threshold;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << '\n';
  }
  std::cout << ledger.checks.size() << " checks, " << (ledger.all_passed() ? "all passed" : "FAILURES") << '\n';
  return ledger.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Neumann diffusion solver: convergence studies and verification"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, h_list;
  auto* conv = app.add_subcommand("converge", "run a manufactured-solution convergence sweep");
  conv->add_option("--config", config_path, "JSON run configuration");
  auto* o_case = conv->add_option("--case", cfg.case_name, "T1_Square, T2_Disk, T3_Ellipse, PatchLinear, CornerSquare");
  auto* o_geom = conv->add_option("--geometry", cfg.geometry, "PatchLinear geometry: square, disk, ellipse");
  auto* o_ratio = conv->add_option("--ratio", cfg.ratio, "delta/h");
  auto* o_h = conv->add_option("--h-levels", h_list, "comma-separated mesh sizes, e.g. 0.125,0.0625");
  auto* o_out = conv->add_option("--out", cfg.output_dir, "output directory");
  auto* o_tol = conv->add_option("--solver-tol", cfg.solver_tol, "relative residual tolerance");
  auto* o_threads = conv->add_option("--threads", cfg.threads, "assembly threads (0 = auto)");

  std::string domains = "square,disk,ellipse,corner";
  bool fault = false;
  double verify_h = 1.0 / 16.0;
  auto* ver = app.add_subcommand("verify", "run the property verification suite");
  ver->add_option("--domains", domains, "comma-separated list of square, disk, ellipse, corner");
  ver->add_flag("--seeded-fault", fault, "inject a kernel normalization fault (test hook)");
  ver->add_option("--mesh-h", verify_h, "mesh size used by the suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*conv) {
      // Precedence: defaults, then the config file, then explicit flags.
      RunConfig merged;
      if (!config_path.empty()) load_config(config_path, merged);
      if (o_case->count()) merged.case_name = cfg.case_name;
      if (o_geom->count()) merged.geometry = cfg.geometry;
      if (o_ratio->count()) merged.ratio = cfg.ratio;
      if (o_out->count()) merged.output_dir = cfg.output_dir;
      if (o_tol->count()) merged.solver_tol = cfg.solver_tol;
      if (o_threads->count()) merged.threads = cfg.threads;
      if (o_h->count()) {
        merged.h_levels.clear();
        for (const auto& s : split_list(h_list)) {
          try {
            merged.h_levels.push_back(std::stod(s));
          } catch (const std::exception&) {
            throw InvalidConfig("--h-levels entry '" + s + "' is not a number");
          }
        }
      }
      return cmd_converge(merged);
    }
    return cmd_verify(domains, fault, verify_h);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
