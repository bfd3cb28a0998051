#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "entangle/random.hpp"

namespace entangle::photonics {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

// Attenuated laser: Poissonian photon number with mean mu per pulse.
// `visibility` is the preparation/analysis contrast of the interferometers.
struct WeakCoherentSource {
  double mu = 0.1;
  double visibility = 1.0;

  std::vector<std::string> violations() const;
};

// Pair source at Alice; one photon of each pair is the trigger.
// herald_efficiency = P(signal photon enters the fiber | pair emitted).
struct HeraldedPairSource {
  double pair_prob_per_gate = 0.1;
  double herald_efficiency = 1.0;
  double visibility = 1.0;

  std::vector<std::string> violations() const;
};

// Entangled pair source; Alice's photon travels channel A, Bob's channel B.
struct CentralPairSource {
  double pair_prob_per_gate = 0.1;
  double visibility = 1.0;

  std::vector<std::string> violations() const;
};

using SourceModel = std::variant<WeakCoherentSource, HeraldedPairSource, CentralPairSource>;

double source_visibility(const SourceModel& source);
std::vector<std::string> violations(const SourceModel& source);

struct FiberChannel {
  double length_km = 0.0;
  double attenuation_db_per_km = 0.25;
  double group_index = 1.47;

  std::vector<std::string> violations() const;
};

// Gated photon counter. Time is counted in gates of gate_period_ns.
struct DetectorModel {
  double efficiency = 0.1;
  double dark_count_prob_per_gate = 1e-5;
  double dead_time_ns = 0.0;
  double afterpulse_prob = 0.0;
  double afterpulse_decay = 0.5;            // per-gate geometric factor
  std::uint32_t afterpulse_window_gates = 10;
  double jitter_sigma_ps = 0.0;
  double gate_period_ns = 100.0;

  std::vector<std::string> violations() const;
};

struct DetectorState {
  std::optional<std::uint64_t> last_click_gate;
};

struct Detection {
  bool click = false;
  bool signal = false;  // the incident photon fired (as opposed to dark/afterpulse only)
  double time_offset_ps = 0.0;
};

// Throws std::invalid_argument listing every violated bound.
void validate(const std::vector<std::string>& violations, const char* what);

double photon_number_pmf(const WeakCoherentSource& source, unsigned n);

// P(n >= 2) = 1 - e^{-mu}(1 + mu)
double multiphoton_probability(const WeakCoherentSource& source);

double channel_transmission(const FiberChannel& channel);

// Group delay in seconds.
double propagation_delay(const FiberChannel& channel);

// True while a click at an earlier gate keeps the detector blind.
bool in_dead_time(const DetectorModel& detector, const DetectorState& state,
                  std::uint64_t gate_index);

// Afterpulse probability contributed at gate_index by the last click.
double afterpulse_probability(const DetectorModel& detector, const DetectorState& state,
                              std::uint64_t gate_index);

// One gate of the counter. Photon, dark and afterpulse causes are independent
// and OR-combined; a dead detector never clicks and consumes no randomness.
Detection detect(const DetectorModel& detector, bool photon_present, std::uint64_t gate_index,
                 DetectorState& state, Rng& rng);

}  // namespace entangle::photonics
