#include "nlflux/kernels.hpp"

#include <cmath>
#include <numbers>

#include "nlflux/errors.hpp"

namespace nlflux {

double KernelSet::j_value() const {
  if (!(delta > 0)) throw InvalidHorizon("horizon must be positive");
  return j_scale * 4.0 / (std::numbers::pi * std::pow(delta, 4));
}

double KernelSet::h_value(double width) {
  // (3/2) / width^3 gives int_{-w}^{w} H l^2 dl = 1.
  return 1.5 / (width * width * width);
}

double j_delta(const KernelSet& k, double r) { return r <= k.delta ? k.j_value() : 0.0; }

double h_delta(const KernelSet& k, double l) {
  return std::abs(l) <= k.delta ? KernelSet::h_value(k.delta) : 0.0;
}

double gmls_weight(double delta, double r) {
  if (r > delta) return 0.0;
  const double q = 1.0 - r / delta;
  return q * q * q * q;
}

}  // namespace nlflux
