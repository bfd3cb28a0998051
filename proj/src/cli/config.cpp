#include "entangle/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <type_traits>
#include <utility>

#include <json.hpp>

namespace entangle::cli {

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// ---- value codecs -------------------------------------------------------

std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_value(std::uint64_t v) { return std::to_string(v); }

std::string format_value(const std::string& v) { return v; }

std::string format_value(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string{};
}

std::string format_value(const std::vector<FrameEntry>& frames) {
  std::vector<std::string> parts;
  for (const auto& f : frames) {
    parts.push_back(f.name + ":" + format_value(f.speed_m_s) + ":" + format_value(f.cos_theta));
  }
  return join(parts, ",");
}

// Each parser returns an error message, empty on success.
std::string parse_value(std::string_view text, double& out) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) return "not a number: '" + std::string(text) + "'";
  if (!std::isfinite(v)) return "must be finite";
  out = v;
  return {};
}

std::string parse_value(std::string_view text, std::uint64_t& out) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec == std::errc{} && res.ptr == end) {
    out = v;
    return {};
  }
  // Accept integral values written in floating-point form, e.g. 1e6.
  double d = 0.0;
  if (parse_value(text, d).empty() && d >= 0.0 && d < 0x1.0p64 && std::floor(d) == d) {
    out = static_cast<std::uint64_t>(d);
    return {};
  }
  return "not a non-negative integer: '" + std::string(text) + "'";
}

std::string parse_value(std::string_view text, std::string& out) {
  out = std::string(text);
  return {};
}

std::string parse_value(std::string_view text, std::optional<std::uint64_t>& out) {
  std::uint64_t v = 0;
  auto err = parse_value(text, v);
  if (err.empty()) out = v;
  return err;
}

std::string parse_value(std::string_view text, std::vector<FrameEntry>& out) {
  std::vector<FrameEntry> frames;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start));
    start = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
    if (item.empty()) {
      if (text.empty()) break;
      return "empty frame entry";
    }
    const auto c1 = item.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : item.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
      return "frame entry '" + std::string(item) + "' is not name:speed_m_s:cos_theta";
    }
    FrameEntry f;
    f.name = std::string(trim(item.substr(0, c1)));
    if (auto e = parse_value(trim(item.substr(c1 + 1, c2 - c1 - 1)), f.speed_m_s); !e.empty()) {
      return "frame '" + f.name + "' speed: " + e;
    }
    if (auto e = parse_value(trim(item.substr(c2 + 1)), f.cos_theta); !e.empty()) {
      return "frame '" + f.name + "' cos_theta: " + e;
    }
    frames.push_back(std::move(f));
  }
  out = std::move(frames);
  return {};
}

// ---- field registry -----------------------------------------------------

struct Field {
  std::string_view section;
  std::string_view key;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<std::string(ScenarioConfig&, std::string_view)> set;
};

template <class Access>
Field make_field(std::string_view section, std::string_view key, Access access) {
  return {section, key, [access](const ScenarioConfig& c) { return format_value(access(c)); },
          [access](ScenarioConfig& c, std::string_view text) { return parse_value(text, access(c)); }};
}

#define ENTANGLE_FIELD(sec, name) \
  make_field(#sec, #name, [](auto& c) -> auto& { return c.sec.name; })

const std::vector<Field>& fields() {
  static const std::vector<Field> registry = {
      ENTANGLE_FIELD(source, type),
      ENTANGLE_FIELD(source, mu),
      ENTANGLE_FIELD(source, pair_prob_per_gate),
      ENTANGLE_FIELD(source, herald_efficiency),
      ENTANGLE_FIELD(source, visibility),
      ENTANGLE_FIELD(channel, length_a_km),
      ENTANGLE_FIELD(channel, length_b_km),
      ENTANGLE_FIELD(channel, attenuation_db_per_km),
      ENTANGLE_FIELD(channel, group_index),
      ENTANGLE_FIELD(detector, efficiency),
      ENTANGLE_FIELD(detector, dark_count_prob_per_gate),
      ENTANGLE_FIELD(detector, dead_time_ns),
      ENTANGLE_FIELD(detector, afterpulse_prob),
      ENTANGLE_FIELD(detector, afterpulse_decay),
      ENTANGLE_FIELD(detector, afterpulse_window_gates),
      ENTANGLE_FIELD(detector, jitter_sigma_ps),
      ENTANGLE_FIELD(detector, gate_period_ns),
      ENTANGLE_FIELD(protocol, n_gates),
      ENTANGLE_FIELD(protocol, sample_fraction),
      ENTANGLE_FIELD(protocol, epsilon_margin),
      ENTANGLE_FIELD(protocol, key_basis_prob),
      ENTANGLE_FIELD(protocol, key_angle_deg),
      ENTANGLE_FIELD(protocol, check_angle_deg),
      ENTANGLE_FIELD(relativity, delta_t_ps),
      ENTANGLE_FIELD(relativity, separation_km),
      ENTANGLE_FIELD(relativity, fiber_length_km),
      ENTANGLE_FIELD(relativity, frames),
      ENTANGLE_FIELD(relativity, wheel_speed_m_s),
      ENTANGLE_FIELD(relativity, angular_resolution_deg),
      ENTANGLE_FIELD(run, seed),
      ENTANGLE_FIELD(run, threads),
      ENTANGLE_FIELD(run, sessions),
  };
  return registry;
}

#undef ENTANGLE_FIELD

constexpr std::string_view kSections[] = {"source", "channel", "detector", "protocol", "relativity", "run"};

bool known_section(std::string_view s) {
  return std::find(std::begin(kSections), std::end(kSections), s) != std::end(kSections);
}

const Field* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

void prefix_all(std::vector<std::string>& out, const std::vector<std::string>& messages,
                std::string_view section) {
  for (const auto& m : messages) out.push_back(std::string(section) + "." + m);
}

void finish(const ScenarioConfig& config, std::vector<std::string>& problems) {
  auto v = violations(config);
  problems.insert(problems.end(), v.begin(), v.end());
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems, "; ")),
      problems_(std::move(problems)) {}

ScenarioConfig geneva_preset() {
  ScenarioConfig c;
  c.source.type = "central";
  c.source.mu = 0.1;
  c.channel.length_a_km = 9.5;
  c.channel.length_b_km = 9.5;
  c.relativity.delta_t_ps = 5.0;
  c.relativity.separation_km = 10.0;
  c.relativity.fiber_length_km = 19.0;
  c.relativity.wheel_speed_m_s = 100.0;
  return c;
}

std::vector<std::string> violations(const ScenarioConfig& c) {
  std::vector<std::string> out;
  auto require = [&out](bool ok, std::string message) {
    if (!ok) out.push_back(std::move(message));
  };

  require(c.source.type == "central" || c.source.type == "heralded" || c.source.type == "weak",
          "source.type must be one of central, heralded, weak (got '" + c.source.type + "')");
  {
    std::vector<std::string> src = photonics::WeakCoherentSource{c.source.mu, c.source.visibility}.violations();
    for (auto& m : photonics::HeraldedPairSource{c.source.pair_prob_per_gate, c.source.herald_efficiency,
                                                 c.source.visibility}
                       .violations()) {
      if (std::find(src.begin(), src.end(), m) == src.end()) src.push_back(m);
    }
    prefix_all(out, src, "source");
  }

  require(c.channel.length_a_km >= 0.0, "channel.length_a_km must be >= 0");
  require(c.channel.length_b_km >= 0.0, "channel.length_b_km must be >= 0");
  require(c.channel.attenuation_db_per_km >= 0.0, "channel.attenuation_db_per_km must be >= 0");
  require(c.channel.group_index >= 1.0, "channel.group_index must be >= 1");

  prefix_all(out, to_session_setup(c).detector_a.violations(), "detector");
  require(c.detector.afterpulse_window_gates <= std::numeric_limits<std::uint32_t>::max(),
          "detector.afterpulse_window_gates must fit in 32 bits");

  require(c.protocol.n_gates >= 1, "protocol.n_gates must be >= 1");
  require(c.protocol.sample_fraction > 0.0 && c.protocol.sample_fraction <= 1.0,
          "protocol.sample_fraction must lie in (0, 1]");
  require(c.protocol.key_basis_prob >= 0.0 && c.protocol.key_basis_prob <= 1.0,
          "protocol.key_basis_prob must lie in [0, 1]");

  require(c.relativity.delta_t_ps > 0.0, "relativity.delta_t_ps must be > 0");
  require(c.relativity.separation_km > 0.0, "relativity.separation_km must be > 0");
  require(c.relativity.fiber_length_km > 0.0, "relativity.fiber_length_km must be > 0");
  std::set<std::string> names;
  for (const auto& f : c.relativity.frames) {
    require(!f.name.empty(), "relativity.frames entries need a name");
    require(names.insert(f.name).second, "relativity.frames name '" + f.name + "' is repeated");
    require(f.speed_m_s >= 0.0 && f.speed_m_s < relativity::kSpeedOfLight,
            "relativity.frames '" + f.name + "' speed must satisfy 0 <= speed < c");
    require(std::abs(f.cos_theta) <= 1.0,
            "relativity.frames '" + f.name + "' cos_theta must lie in [-1, 1]");
  }
  require(c.relativity.wheel_speed_m_s >= 0.0 && c.relativity.wheel_speed_m_s < relativity::kSpeedOfLight,
          "relativity.wheel_speed_m_s must satisfy 0 <= v < c");
  require(c.relativity.angular_resolution_deg > 0.0 && c.relativity.angular_resolution_deg <= 180.0,
          "relativity.angular_resolution_deg must lie in (0, 180]");

  require(c.run.threads >= 1, "run.threads must be >= 1");
  require(c.run.sessions >= 1, "run.sessions must be >= 1");
  return out;
}

namespace {

// Drops a comment that starts the line or follows whitespace.
std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

ScenarioConfig parse_ini(std::string_view text, const ScenarioConfig& base) {
  ScenarioConfig config = base;
  std::vector<std::string> problems;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  bool section_ok = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    const auto where = "line " + std::to_string(line_no) + ": ";

    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(where + "unterminated section header");
        section_ok = false;
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      section_ok = known_section(section);
      if (!section_ok) problems.push_back(where + "unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (section.empty()) {
      problems.push_back(where + "key '" + key + "' outside of any section");
      continue;
    }
    if (!section_ok) continue;  // already reported

    const Field* field = find_field(section, key);
    if (!field) {
      problems.push_back(where + "unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    if (!seen.emplace(section, key).second) {
      problems.push_back(where + "duplicate key " + section + "." + key);
      continue;
    }
    if (auto err = field->set(config, value); !err.empty()) {
      problems.push_back(where + section + "." + key + ": " + err);
    }
  }

  finish(config, problems);
  return config;
}

ScenarioConfig parse_json(std::string_view text, const ScenarioConfig& base) {
  ScenarioConfig config = base;
  std::vector<std::string> problems;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("json: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"json: top level must be an object of sections"});

  for (const auto& [section, body] : doc.items()) {
    if (!known_section(section)) {
      problems.push_back("json: unknown section '" + section + "'");
      continue;
    }
    if (!body.is_object()) {
      problems.push_back("json: section '" + section + "' must be an object");
      continue;
    }
    for (const auto& [key, value] : body.items()) {
      const Field* field = find_field(section, key);
      if (!field) {
        problems.push_back("json: unknown key '" + key + "' in '" + section + "'");
        continue;
      }
      std::string textual;
      if (value.is_string()) {
        textual = value.get<std::string>();
      } else if (value.is_number_unsigned()) {
        textual = std::to_string(value.get<std::uint64_t>());
      } else if (value.is_number_integer()) {
        textual = std::to_string(value.get<std::int64_t>());
      } else if (value.is_number_float()) {
        textual = format_value(value.get<double>());
      } else {
        problems.push_back("json: " + section + "." + key + ": unsupported value type");
        continue;
      }
      if (auto err = field->set(config, textual); !err.empty()) {
        problems.push_back("json: " + section + "." + key + ": " + err);
      }
    }
  }

  finish(config, problems);
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path, const ScenarioConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') return parse_json(text, base);
  return parse_ini(text, base);
}

std::string to_ini(const ScenarioConfig& config) {
  std::string out = "# entangle scenario configuration\n";
  for (std::string_view section : kSections) {
    out += "\n[" + std::string(section) + "]\n";
    for (const auto& f : fields()) {
      if (f.section != section) continue;
      const std::string value = f.get(config);
      if (value.empty() && f.key == "seed") continue;
      out += std::string(f.key) + " = " + value + "\n";
    }
  }
  return out;
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_ini(config);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::uint64_t resolve_seed(const ScenarioConfig& config, std::optional<std::uint64_t> explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (config.run.seed) return *config.run.seed;
  if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
    std::uint64_t seed = 0;
    if (auto err = parse_value(trim(env), seed); !err.empty()) {
      throw ConfigError({std::string(kSeedEnvVar) + ": " + err});
    }
    return seed;
  }
  return kDefaultSeed;
}

qkd::SessionSetup to_session_setup(const ScenarioConfig& c) {
  qkd::SessionSetup setup;
  if (c.source.type == "weak") {
    setup.source = photonics::WeakCoherentSource{c.source.mu, c.source.visibility};
  } else if (c.source.type == "heralded") {
    setup.source = photonics::HeraldedPairSource{c.source.pair_prob_per_gate,
                                                 c.source.herald_efficiency, c.source.visibility};
  } else {
    setup.source = photonics::CentralPairSource{c.source.pair_prob_per_gate, c.source.visibility};
  }
  setup.channel_a = {c.channel.length_a_km, c.channel.attenuation_db_per_km, c.channel.group_index};
  setup.channel_b = {c.channel.length_b_km, c.channel.attenuation_db_per_km, c.channel.group_index};

  photonics::DetectorModel d;
  d.efficiency = c.detector.efficiency;
  d.dark_count_prob_per_gate = c.detector.dark_count_prob_per_gate;
  d.dead_time_ns = c.detector.dead_time_ns;
  d.afterpulse_prob = c.detector.afterpulse_prob;
  d.afterpulse_decay = c.detector.afterpulse_decay;
  d.afterpulse_window_gates = static_cast<std::uint32_t>(
      std::min<std::uint64_t>(c.detector.afterpulse_window_gates, std::numeric_limits<std::uint32_t>::max()));
  d.jitter_sigma_ps = c.detector.jitter_sigma_ps;
  d.gate_period_ns = c.detector.gate_period_ns;
  setup.detector_a = d;
  setup.detector_b = d;

  constexpr double deg = std::numbers::pi / 180.0;
  setup.protocol.key_basis_prob = c.protocol.key_basis_prob;
  setup.protocol.angles = {c.protocol.key_angle_deg * deg, c.protocol.check_angle_deg * deg};
  return setup;
}

qkd::SchemeLadder to_scheme_ladder(const ScenarioConfig& c) {
  const qkd::SessionSetup setup = to_session_setup(c);
  qkd::SchemeLadder ladder;
  ladder.mu = c.source.mu;
  ladder.pair_prob_per_gate = c.source.pair_prob_per_gate;
  ladder.herald_efficiency = c.source.herald_efficiency;
  ladder.visibility = c.source.visibility;
  ladder.channel_a = setup.channel_a;
  ladder.channel_b = setup.channel_b;
  ladder.detector_a = setup.detector_a;
  ladder.detector_b = setup.detector_b;
  ladder.protocol = setup.protocol;
  ladder.n_gates = c.protocol.n_gates;
  return ladder;
}

relativity::AlignmentBudget to_budget(const ScenarioConfig& c) {
  return {c.relativity.delta_t_ps * 1e-12, c.relativity.separation_km * 1e3,
          c.relativity.fiber_length_km * 1e3};
}

}  // namespace entangle::cli
