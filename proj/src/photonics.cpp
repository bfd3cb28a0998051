#include "entangle/photonics.hpp"

#include <cmath>
#include <stdexcept>

namespace entangle::photonics {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void require(std::vector<std::string>& out, bool ok, const std::string& message) {
  if (!ok) out.push_back(message);
}

}  // namespace

std::vector<std::string> WeakCoherentSource::violations() const {
  std::vector<std::string> out;
  require(out, mu >= 0.0 && std::isfinite(mu), "mu must be >= 0");
  require(out, is_probability(visibility), "visibility must lie in [0, 1]");
  return out;
}

std::vector<std::string> HeraldedPairSource::violations() const {
  std::vector<std::string> out;
  require(out, is_probability(pair_prob_per_gate), "pair_prob_per_gate must lie in [0, 1]");
  require(out, is_probability(herald_efficiency), "herald_efficiency must lie in [0, 1]");
  require(out, is_probability(visibility), "visibility must lie in [0, 1]");
  return out;
}

std::vector<std::string> CentralPairSource::violations() const {
  std::vector<std::string> out;
  require(out, is_probability(pair_prob_per_gate), "pair_prob_per_gate must lie in [0, 1]");
  require(out, is_probability(visibility), "visibility must lie in [0, 1]");
  return out;
}

double source_visibility(const SourceModel& source) {
  return std::visit([](const auto& s) { return s.visibility; }, source);
}

std::vector<std::string> violations(const SourceModel& source) {
  return std::visit([](const auto& s) { return s.violations(); }, source);
}

std::vector<std::string> FiberChannel::violations() const {
  std::vector<std::string> out;
  require(out, length_km >= 0.0 && std::isfinite(length_km), "length_km must be >= 0");
  require(out, attenuation_db_per_km >= 0.0 && std::isfinite(attenuation_db_per_km),
          "attenuation_db_per_km must be >= 0");
  require(out, group_index >= 1.0 && std::isfinite(group_index), "group_index must be >= 1");
  return out;
}

std::vector<std::string> DetectorModel::violations() const {
  std::vector<std::string> out;
  require(out, is_probability(efficiency), "efficiency must lie in [0, 1]");
  require(out, is_probability(dark_count_prob_per_gate),
          "dark_count_prob_per_gate must lie in [0, 1]");
  require(out, dead_time_ns >= 0.0 && std::isfinite(dead_time_ns), "dead_time_ns must be >= 0");
  require(out, is_probability(afterpulse_prob), "afterpulse_prob must lie in [0, 1]");
  require(out, is_probability(afterpulse_decay), "afterpulse_decay must lie in [0, 1]");
  require(out, jitter_sigma_ps >= 0.0 && std::isfinite(jitter_sigma_ps),
          "jitter_sigma_ps must be >= 0");
  require(out, gate_period_ns > 0.0 && std::isfinite(gate_period_ns),
          "gate_period_ns must be > 0");
  return out;
}

void validate(const std::vector<std::string>& violations, const char* what) {
  if (violations.empty()) return;
  std::string message = std::string("invalid ") + what + ":";
  for (const auto& v : violations) message += " " + v + ";";
  throw std::invalid_argument(message);
}

double photon_number_pmf(const WeakCoherentSource& source, unsigned n) {
  if (source.mu == 0.0) return n == 0 ? 1.0 : 0.0;
  // Log form keeps large n finite.
  return std::exp(-source.mu + n * std::log(source.mu) - std::lgamma(n + 1.0));
}

double multiphoton_probability(const WeakCoherentSource& source) {
  // -expm1 keeps precision for small mu.
  const double mu = source.mu;
  return -std::expm1(-mu) - mu * std::exp(-mu);
}

double channel_transmission(const FiberChannel& channel) {
  return std::pow(10.0, -channel.attenuation_db_per_km * channel.length_km / 10.0);
}

double propagation_delay(const FiberChannel& channel) {
  return channel.group_index * channel.length_km * 1e3 / kSpeedOfLight;
}

bool in_dead_time(const DetectorModel& detector, const DetectorState& state,
                  std::uint64_t gate_index) {
  if (!state.last_click_gate) return false;
  const auto elapsed = static_cast<double>(gate_index - *state.last_click_gate);
  return elapsed * detector.gate_period_ns < detector.dead_time_ns;
}

double afterpulse_probability(const DetectorModel& detector, const DetectorState& state,
                              std::uint64_t gate_index) {
  if (!state.last_click_gate || detector.afterpulse_prob == 0.0) return 0.0;
  const std::uint64_t since = gate_index - *state.last_click_gate;
  if (since == 0 || since > detector.afterpulse_window_gates) return 0.0;
  return detector.afterpulse_prob * std::pow(detector.afterpulse_decay, static_cast<double>(since - 1));
}

Detection detect(const DetectorModel& detector, bool photon_present, std::uint64_t gate_index,
                 DetectorState& state, Rng& rng) {
  Detection out;
  if (in_dead_time(detector, state, gate_index)) return out;

  out.signal = photon_present && rng.bernoulli(detector.efficiency);
  const bool dark = rng.bernoulli(detector.dark_count_prob_per_gate);
  const double p_after = afterpulse_probability(detector, state, gate_index);
  const bool after = p_after > 0.0 && rng.bernoulli(p_after);

  out.click = out.signal || dark || after;
  if (out.click) {
    state.last_click_gate = gate_index;
    if (detector.jitter_sigma_ps > 0.0) out.time_offset_ps = detector.jitter_sigma_ps * rng.normal();
  }
  return out;
}

}  // namespace entangle::photonics
