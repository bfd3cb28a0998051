#include "entangle/qkd/information.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace entangle::qkd {

namespace {

void check_qber(double d) {
  if (!(d >= 0.0 && d <= 0.5)) {
    throw std::invalid_argument("error rate must lie in [0, 0.5], got " + std::to_string(d));
  }
}

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("probability must lie in [0, 1], got " + std::to_string(p));
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double mutual_info_ab(double qber) {
  check_qber(qber);
  return 1.0 - binary_entropy(qber);
}

double eve_info_optimal(double qber) {
  check_qber(qber);
  // Rounding can push 1/2 + sqrt(1/4) a hair above 1.
  const double p = std::fmin(1.0, 0.5 + std::sqrt(qber * (1.0 - qber)));
  return 1.0 - binary_entropy(p);
}

double secrecy_margin(double qber) { return mutual_info_ab(qber) - eve_info_optimal(qber); }

double security_threshold() { return 0.5 * (1.0 - 1.0 / std::numbers::sqrt2); }

}  // namespace entangle::qkd
