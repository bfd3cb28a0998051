#pragma once

#include <cmath>
#include <cstddef>

#include "entangle/photonics.hpp"
#include "entangle/qkd/session.hpp"

namespace entangle::testing {

inline photonics::DetectorModel ideal_detector() {
  photonics::DetectorModel d;
  d.efficiency = 1.0;
  d.dark_count_prob_per_gate = 0.0;
  d.dead_time_ns = 0.0;
  d.afterpulse_prob = 0.0;
  d.jitter_sigma_ps = 0.0;
  return d;
}

// Lossless channels, unit-efficiency noiseless detectors, one pair per gate.
inline qkd::SessionSetup ideal_setup(double visibility) {
  qkd::SessionSetup s;
  s.source = photonics::CentralPairSource{1.0, visibility};
  s.channel_a = {0.0, 0.25, 1.47};
  s.channel_b = {0.0, 0.25, 1.47};
  s.detector_a = ideal_detector();
  s.detector_b = ideal_detector();
  return s;
}

// |observed - p| <= 3 sigma for a binomial proportion over n trials.
inline bool within_3_sigma(double observed, double p, std::size_t n) {
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return std::abs(observed - p) <= 3.0 * sigma;
}

inline std::size_t mismatches(const qkd::SiftedKey& k) {
  std::size_t e = 0;
  for (std::size_t i = 0; i < k.size(); ++i) e += k.alice[i] != k.bob[i];
  return e;
}

}  // namespace entangle::testing
