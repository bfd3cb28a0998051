#include "entangle/relativity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace entangle::relativity {

namespace {

constexpr double kC = kSpeedOfLight;
constexpr double kC2 = kSpeedOfLight * kSpeedOfLight;

}  // namespace

InertialFrame::InertialFrame(double beta, std::string name) : beta_(beta), name_(std::move(name)) {
  if (!(std::abs(beta) < 1.0)) {
    throw std::invalid_argument("frame velocity must satisfy |beta| < 1, got " + std::to_string(beta));
  }
}

double InertialFrame::gamma() const { return lorentz_factor(beta_); }

double lorentz_factor(double beta) { return 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta)); }

SpacetimeEvent lorentz_transform(const SpacetimeEvent& e, const InertialFrame& f) {
  if (!std::isfinite(e.t) || !std::isfinite(e.x)) {
    throw std::invalid_argument("event coordinates must be finite");
  }
  const double gamma = f.gamma();
  const double beta = f.beta();
  return {gamma * (e.t - beta * e.x / kC), gamma * (e.x - beta * kC * e.t), e.label};
}

double interval(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  const double cdt = kC * (b.t - a.t);
  const double dx = b.x - a.x;
  return cdt * cdt - dx * dx;
}

double frame_delta_t(const AlignmentBudget& budget, const FrameSpec& frame) {
  if (!(frame.speed >= 0.0 && frame.speed < kC)) {
    throw std::invalid_argument("frame speed must satisfy 0 <= speed < c");
  }
  if (!(std::abs(frame.cos_theta) <= 1.0)) {
    throw std::invalid_argument("cos_theta must lie in [-1, 1]");
  }
  const double gamma = lorentz_factor(frame.speed / kC);
  return gamma * (budget.delta_t + frame.speed * frame.cos_theta * budget.separation / kC2);
}

double spooky_speed_bound(double separation, double delta_t_in_frame) {
  if (!(delta_t_in_frame > 0.0)) throw std::invalid_argument("delta_t must be positive");
  if (!(separation > 0.0)) throw std::invalid_argument("separation must be positive");
  return separation / (delta_t_in_frame * kC);
}

FrameAngleInversion invert_frame_angle(const AlignmentBudget& budget, double speed,
                                       double target_bound, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("inversion needs at least one step");
  if (!(target_bound > 0.0)) throw std::invalid_argument("target bound must be positive");

  FrameAngleInversion best;
  double best_error = INFINITY;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double theta = (std::numbers::pi / 2.0) * static_cast<double>(k) / static_cast<double>(steps);
    const double cos_theta = std::cos(theta);
    const double dt = frame_delta_t(budget, {speed, cos_theta});
    ++best.evaluations;
    if (!(dt > 0.0)) continue;
    const double bound = spooky_speed_bound(budget.separation, dt);
    const double error = std::abs(bound - target_bound) / target_bound;
    if (error < best_error) {
      best_error = error;
      best.theta = theta;
      best.cos_theta = cos_theta;
      best.bound = bound;
    }
  }
  return best;
}

double alignment_precision(const AlignmentBudget& budget, double group_index) {
  if (!(budget.fiber_length > 0.0)) throw std::invalid_argument("fiber_length must be positive");
  if (!(group_index >= 1.0)) throw std::invalid_argument("group_index must be >= 1");
  return budget.delta_t / (group_index * budget.fiber_length / kC);
}

double before_before_threshold(double delta_t, double separation) {
  if (!(delta_t >= 0.0)) throw std::invalid_argument("delta_t must be >= 0");
  if (!(separation > 0.0)) throw std::invalid_argument("separation must be positive");
  return kC2 * delta_t / separation;
}

BeforeBeforeConstruction before_before_construction(double v_rel, double cos_phi, double delta_t,
                                                    double separation) {
  if (!(v_rel >= 0.0 && v_rel < kC)) throw std::invalid_argument("v_rel must satisfy 0 <= v < c");
  if (!(std::abs(cos_phi) <= 1.0)) throw std::invalid_argument("cos_phi must lie in [-1, 1]");

  BeforeBeforeConstruction out;
  out.alice = {0.0, 0.0, "alice"};
  out.bob = {delta_t, separation, "bob"};

  const InertialFrame alice_frame(0.0, "alice analyzer");
  const InertialFrame bob_frame(v_rel * std::abs(cos_phi) / kC, "bob analyzer");

  out.gap_in_alice_frame =
      lorentz_transform(out.bob, alice_frame).t - lorentz_transform(out.alice, alice_frame).t;
  out.gap_in_bob_frame =
      lorentz_transform(out.bob, bob_frame).t - lorentz_transform(out.alice, bob_frame).t;
  out.alice_first_in_own_frame = out.gap_in_alice_frame >= 0.0;
  out.bob_first_in_own_frame = out.gap_in_bob_frame < 0.0;
  return out;
}

bool before_before_satisfied(double v_rel, double cos_phi, double delta_t, double separation) {
  if (!(v_rel >= 0.0 && v_rel < kC)) throw std::invalid_argument("v_rel must satisfy 0 <= v < c");
  const double threshold = before_before_threshold(delta_t, separation);
  const double axial = v_rel * std::abs(cos_phi);
  const bool satisfied = axial > threshold;

  if (std::abs(axial - threshold) > 1e-9 * std::max(threshold, 1e-300)) {
    const auto check = before_before_construction(v_rel, cos_phi, delta_t, separation);
    if (check.before_before() != satisfied) {
      throw std::logic_error("before-before formula disagrees with the two-frame construction");
    }
  }
  return satisfied;
}

AbsorberWindows rotating_absorber_windows(double tangential_speed, double delta_t,
                                          double separation, double angular_resolution) {
  if (!(tangential_speed >= 0.0 && tangential_speed < kC)) {
    throw std::invalid_argument("tangential speed must satisfy 0 <= v < c");
  }
  if (!(angular_resolution > 0.0 && angular_resolution <= std::numbers::pi)) {
    throw std::invalid_argument("angular resolution must lie in (0, pi]");
  }

  constexpr double two_pi = 2.0 * std::numbers::pi;
  AbsorberWindows out;
  out.threshold = before_before_threshold(delta_t, separation);
  if (!(tangential_speed > out.threshold)) return out;

  out.duty_fraction = 2.0 * std::acos(out.threshold / tangential_speed) / std::numbers::pi;

  const auto samples = static_cast<std::size_t>(std::ceil(two_pi / angular_resolution));
  std::size_t hits = 0;
  bool open = false;
  for (std::size_t k = 0; k < samples; ++k) {
    const double phase = static_cast<double>(k) * angular_resolution;
    const bool ok = before_before_satisfied(tangential_speed, std::cos(phase), delta_t, separation);
    hits += ok;
    if (ok && !open) {
      out.intervals.push_back({phase, phase});
      open = true;
    } else if (!ok && open) {
      open = false;
    }
    if (ok) out.intervals.back().end = std::min(two_pi, phase + angular_resolution);
  }
  out.swept_fraction = static_cast<double>(hits) / static_cast<double>(samples);
  return out;
}

}  // namespace entangle::relativity
