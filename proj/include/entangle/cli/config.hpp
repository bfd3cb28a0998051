#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "entangle/qkd/pipeline.hpp"
#include "entangle/qkd/session.hpp"
#include "entangle/relativity.hpp"

namespace entangle::cli {

// Invalid configuration: every problem found, one message each.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct FrameEntry {
  std::string name;
  double speed_m_s = 0.0;
  double cos_theta = 0.0;
  bool operator==(const FrameEntry&) const = default;
};

struct ScenarioConfig {
  struct Source {
    std::string type = "central";  // central | heralded | weak
    double mu = 0.1;
    double pair_prob_per_gate = 0.1;
    double herald_efficiency = 0.9;
    double visibility = 0.95;
    bool operator==(const Source&) const = default;
  } source;

  struct Channel {
    double length_a_km = 5.0;
    double length_b_km = 5.0;
    double attenuation_db_per_km = 0.25;
    double group_index = 1.47;
    bool operator==(const Channel&) const = default;
  } channel;

  struct Detector {
    double efficiency = 0.1;
    double dark_count_prob_per_gate = 1e-5;
    double dead_time_ns = 1000.0;
    double afterpulse_prob = 0.01;
    double afterpulse_decay = 0.5;
    std::uint64_t afterpulse_window_gates = 10;
    double jitter_sigma_ps = 100.0;
    double gate_period_ns = 100.0;
    bool operator==(const Detector&) const = default;
  } detector;

  struct Protocol {
    std::uint64_t n_gates = 10'000'000;
    double sample_fraction = 0.1;
    std::uint64_t epsilon_margin = 0;
    double key_basis_prob = 0.5;
    double key_angle_deg = 0.0;
    double check_angle_deg = 90.0;
    bool operator==(const Protocol&) const = default;
  } protocol;

  struct Relativity {
    double delta_t_ps = 5.0;
    double separation_km = 10.0;
    double fiber_length_km = 19.0;
    std::vector<FrameEntry> frames{{"lab", 0.0, 0.0}, {"cmb", 369'000.0, 0.054}};
    double wheel_speed_m_s = 100.0;
    double angular_resolution_deg = 0.01;
    bool operator==(const Relativity&) const = default;
  } relativity;

  struct Run {
    std::optional<std::uint64_t> seed;  // unset: environment or built-in default
    std::uint64_t threads = 1;
    std::uint64_t sessions = 1;
    bool operator==(const Run&) const = default;
  } run;

  bool operator==(const ScenarioConfig&) const = default;
};

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr const char* kSeedEnvVar = "ENTANGLE_SEED";

// Separation 10 km, fiber 19 km (two 9.5 km arms), 5 ps, wheel 100 m/s, mu 0.1.
ScenarioConfig geneva_preset();

// Every invariant violation, as "section.key: ..." messages.
std::vector<std::string> violations(const ScenarioConfig& config);

// Parses INI-style text (sections [source] [channel] [detector] [protocol]
// [relativity] [run]) on top of `base`. Unknown sections/keys, malformed
// lines and invariant breaches are all collected into one ConfigError.
ScenarioConfig parse_ini(std::string_view text, const ScenarioConfig& base = {});

// JSON object of section objects, same keys as the INI form.
ScenarioConfig parse_json(std::string_view text, const ScenarioConfig& base = {});

// Dispatches on content: a leading '{' selects JSON. Throws std::runtime_error
// when the file cannot be read, ConfigError when it is invalid.
ScenarioConfig load_config(const std::filesystem::path& path, const ScenarioConfig& base = {});

// Canonical INI text: every key, fixed order, shortest round-trip numbers.
std::string to_ini(const ScenarioConfig& config);

void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

// Explicit value, else the config's [run] seed, else $ENTANGLE_SEED, else 1.
// Throws ConfigError when the environment value is not an unsigned integer.
std::uint64_t resolve_seed(const ScenarioConfig& config, std::optional<std::uint64_t> explicit_seed);

qkd::SessionSetup to_session_setup(const ScenarioConfig& config);
qkd::SchemeLadder to_scheme_ladder(const ScenarioConfig& config);
relativity::AlignmentBudget to_budget(const ScenarioConfig& config);

}  // namespace entangle::cli
