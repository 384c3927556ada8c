#pragma once

namespace nlflux {

enum class KernelProfile { Constant };

// Rescaled kernels for horizon delta. j_scale multiplies J and exists only so
// the verification suite can inject a broken moment; leave it at 1.
struct KernelSet {
  double delta = 0.1;
  KernelProfile j_profile = KernelProfile::Constant;
  KernelProfile h_profile = KernelProfile::Constant;
  double j_scale = 1.0;

  explicit KernelSet(double d = 0.1) : delta(d) {}

  // Value of J inside the horizon, 4/(pi delta^4) for the constant profile.
  double j_value() const;
  // Value of H inside [-width, width], normalized to unit second moment.
  static double h_value(double width);
};

double j_delta(const KernelSet& k, double r);
double h_delta(const KernelSet& k, double l);
double gmls_weight(double delta, double r);

// Integral of H over the real line, in units of 1/delta^2.
constexpr double kContourKernelMass = 3.0;

}  // namespace nlflux
