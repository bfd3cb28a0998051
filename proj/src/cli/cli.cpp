#include "entangle/cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "entangle/cli/config.hpp"
#include "entangle/cli/table.hpp"
#include "entangle/photonics.hpp"
#include "entangle/qkd/information.hpp"
#include "entangle/qkd/pipeline.hpp"
#include "entangle/quantum_core.hpp"
#include "entangle/relativity.hpp"

namespace entangle::cli {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("-c,--config", common.config_path, "INI or JSON scenario file");
  cmd->add_option("--seed", common.seed, "RNG seed (overrides config and $ENTANGLE_SEED)");
  cmd->add_option("-o,--out", common.out_path, "write the result table as CSV");
  cmd->add_flag("--strict", common.strict, "exit with code 3 on an INSECURE verdict");
}

ScenarioConfig resolve_config(const CommonOptions& common, const ScenarioConfig& base) {
  if (common.config_path.empty()) return base;
  try {
    return load_config(common.config_path, base);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw ConfigError({e.what()});
  }
}

void maybe_emit(const Table& table, const CommonOptions& common, std::ostream& out) {
  if (common.out_path.empty()) return;
  emit_table(table, common.out_path);
  out << "wrote " << common.out_path << "\n";
}

// ---- bell ---------------------------------------------------------------

struct BellOptions {
  std::optional<double> visibility;
  double a_deg = 0.0;
  double a_prime_deg = 90.0;
  double b_deg = 45.0;
  double b_prime_deg = 135.0;
  std::size_t sweep = 0;
  std::size_t unitary_pairs = 100;
};

int run_bell(const BellOptions& opt, const CommonOptions& common, const ScenarioConfig& base,
             std::ostream& out) {
  using namespace quantum;
  const ScenarioConfig cfg = resolve_config(common, base);
  const double v = opt.visibility.value_or(cfg.source.visibility);
  const CorrelationModel model(v);
  const ChshSettings settings{MeasurementSetting(opt.a_deg * kDeg), MeasurementSetting(opt.a_prime_deg * kDeg),
                              MeasurementSetting(opt.b_deg * kDeg), MeasurementSetting(opt.b_prime_deg * kDeg)};
  const double s = chsh_value(model, settings);

  Rng rng(resolve_seed(cfg, common.seed));
  double worst_residual = 0.0;
  for (std::size_t i = 0; i < opt.unitary_pairs; ++i) {
    const auto u1 = Unitary2::haar_random(rng);
    const auto u2 = Unitary2::haar_random(rng);
    worst_residual = std::max(worst_residual, transpose_identity_residual(u1, u2));
  }

  out << std::setprecision(7);
  out << "Bell-CHSH analysis\n";
  out << "  visibility V = " << v << "\n";
  out << "  settings (deg): a=" << opt.a_deg << " a'=" << opt.a_prime_deg << " b=" << opt.b_deg
      << " b'=" << opt.b_prime_deg << "\n";
  out << "  E(a,b)=" << correlation(model, settings.a, settings.b)
      << " E(a,b')=" << correlation(model, settings.a, settings.b_prime)
      << " E(a',b)=" << correlation(model, settings.a_prime, settings.b)
      << " E(a',b')=" << correlation(model, settings.a_prime, settings.b_prime) << "\n";
  out << "  S=" << s << "  (local bound 2: " << (std::abs(s) > 2.0 ? "violated" : "not violated")
      << ", quantum bound 2*sqrt2*V = " << 2.0 * std::numbers::sqrt2 * v << ")\n";
  out << "  QBER=(1-V)/2 = " << qber_from_visibility(v) << "\n";
  out << "  violation threshold V = 1/sqrt2 <-> QBER " << qber_from_visibility(1.0 / std::numbers::sqrt2)
      << ", information-crossing threshold " << qkd::security_threshold() << "\n";
  out << "  |Phi+> local-unitary transpose identity, max residual over " << opt.unitary_pairs
      << " random pairs: " << worst_residual << "\n";

  Table table{{"V", "S", "QBER"}, {}};
  if (opt.sweep > 0) {
    for (std::size_t i = 0; i <= opt.sweep; ++i) {
      const double vi = static_cast<double>(i) / static_cast<double>(opt.sweep);
      table.rows.push_back({vi, chsh_value(CorrelationModel(vi), settings), qber_from_visibility(vi)});
    }
  } else {
    table.rows.push_back({v, s, qber_from_visibility(v)});
  }
  maybe_emit(table, common, out);
  return kExitOk;
}

// ---- qkd ----------------------------------------------------------------

struct QkdOptions {
  std::optional<std::uint64_t> sessions;
  std::optional<std::uint64_t> threads;
  std::optional<std::uint64_t> gates;
  std::string transcript_path;
  std::string replay_path;
};

int run_qkd_command(const QkdOptions& opt, const CommonOptions& common, const ScenarioConfig& base,
                    std::ostream& out) {
  ScenarioConfig cfg = resolve_config(common, base);
  if (opt.gates) cfg.protocol.n_gates = *opt.gates;
  if (opt.sessions) cfg.run.sessions = *opt.sessions;
  if (opt.threads) cfg.run.threads = *opt.threads;
  if (auto v = violations(cfg); !v.empty()) throw ConfigError(std::move(v));

  const std::uint64_t seed = resolve_seed(cfg, common.seed);
  const qkd::SessionSetup setup = to_session_setup(cfg);
  const qkd::PipelineParams params{cfg.protocol.sample_fraction, cfg.protocol.epsilon_margin};
  const std::size_t sessions = cfg.run.sessions;

  std::vector<qkd::QkdSessionResult> results(sessions);
  std::vector<qkd::RawRecord> transcript;
  if (!opt.replay_path.empty()) {
    // Post-processing only, with the seed session 0 would have used.
    std::ifstream in(opt.replay_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + opt.replay_path + "'");
    transcript = qkd::read_transcript(in);
    results.assign(1, qkd::process_records(transcript, params, derive_seed(seed, 0)));
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < sessions; i = next++) {
        auto* records = (i == 0 && !opt.transcript_path.empty()) ? &transcript : nullptr;
        results[i] = qkd::run_qkd(setup, cfg.protocol.n_gates, params, derive_seed(seed, i), records);
      }
    };
    const std::size_t n_threads = std::min<std::size_t>(cfg.run.threads, sessions);
    if (n_threads <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
  }

  if (!opt.transcript_path.empty()) {
    std::ofstream tf(opt.transcript_path, std::ios::binary | std::ios::trunc);
    if (!tf) throw std::runtime_error("cannot open '" + opt.transcript_path + "' for writing");
    qkd::write_transcript(tf, transcript);
    out << "wrote transcript " << opt.transcript_path << "\n";
  }

  out << std::setprecision(6);
  if (!opt.replay_path.empty()) {
    out << "QKD post-processing of " << opt.replay_path << " (" << transcript.size() << " gates, seed " << seed
        << ")\n";
  } else {
    out << "QKD session (" << cfg.source.type << " source, V=" << cfg.source.visibility << ", "
        << cfg.protocol.n_gates << " gates, seed " << seed << ")\n";
  }
  out << "  arm A: " << setup.channel_a.length_km << " km, T=" << photonics::channel_transmission(setup.channel_a)
      << ", delay " << photonics::propagation_delay(setup.channel_a) << " s\n";
  out << "  arm B: " << setup.channel_b.length_km << " km, T=" << photonics::channel_transmission(setup.channel_b)
      << ", delay " << photonics::propagation_delay(setup.channel_b) << " s\n";
  if (cfg.source.type == "weak") {
    out << "  multi-photon pulse probability P(n>=2) = "
        << photonics::multiphoton_probability({cfg.source.mu, cfg.source.visibility}) << "\n";
  }
  out << "  security threshold (I_AB = I_E) QBER = " << qkd::security_threshold() << "\n";

  Table table{{"session", "seed", "double_clicks", "sifted", "qber", "qber_half_width", "leaked_bits",
               "final_length", "keys_agree", "verdict"},
              {}};
  bool any_insecure = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    any_insecure = any_insecure || r.verdict == qkd::SecurityVerdict::insecure;
    const double d = r.qber.estimate;
    out << "  [" << i << "] sifted " << r.sifted_length << ", QBER " << d << " +/- " << r.qber.half_width
        << " (V " << quantum::visibility_from_qber(std::min(d, 0.5)) << ", I_AB "
        << qkd::mutual_info_ab(std::min(d, 0.5)) << ", I_E "
        << qkd::eve_info_optimal(std::min(d, 0.5)) << "), leaked " << r.leaked_bits << ", final key "
        << r.final_key_a.size() << " bits, " << qkd::to_string(r.verdict) << "\n";
    table.rows.push_back({static_cast<std::int64_t>(i),
                          std::to_string(derive_seed(seed, i)),
                          static_cast<std::int64_t>(r.double_clicks),
                          static_cast<std::int64_t>(r.sifted_length),
                          r.qber.estimate,
                          r.qber.half_width,
                          static_cast<std::int64_t>(r.leaked_bits),
                          static_cast<std::int64_t>(r.final_key_a.size()),
                          std::string(r.keys_agree() ? "yes" : "no"),
                          std::string(qkd::to_string(r.verdict))});
  }
  maybe_emit(table, common, out);
  return (common.strict && any_insecure) ? kExitInsecure : kExitOk;
}

// ---- schemes ------------------------------------------------------------

int run_schemes(std::optional<std::uint64_t> gates, const CommonOptions& common,
                const ScenarioConfig& base, std::ostream& out) {
  ScenarioConfig cfg = resolve_config(common, base);
  if (gates) cfg.protocol.n_gates = *gates;
  if (auto v = violations(cfg); !v.empty()) throw ConfigError(std::move(v));

  const auto ladder = to_scheme_ladder(cfg);
  const auto rows = qkd::scheme_equivalence_report(ladder, resolve_seed(cfg, common.seed));

  const photonics::WeakCoherentSource weak{cfg.source.mu, cfg.source.visibility};
  out << std::setprecision(6);
  out << "Source ladder at V=" << cfg.source.visibility << ", " << ladder.n_gates << " gates per scheme\n";
  out << "  weak pulses mu=" << weak.mu << ": P(0)=" << photonics::photon_number_pmf(weak, 0)
      << " P(1)=" << photonics::photon_number_pmf(weak, 1) << " P(2)=" << photonics::photon_number_pmf(weak, 2)
      << " P(n>=2)=" << photonics::multiphoton_probability(weak) << "\n";
  Table table{{"scheme", "sifted", "sifted_rate", "qber", "qber_half_width", "multiphoton_exposure",
               "multiphoton_fraction"},
              {}};
  for (const auto& r : rows) {
    out << "  " << std::left << std::setw(20) << qkd::to_string(r.scheme) << std::right << " sifted "
        << r.sifted << " (" << r.sifted_rate << "/gate), QBER " << r.qber << " +/- " << r.half_width << "\n";
    table.rows.push_back({std::string(qkd::to_string(r.scheme)), static_cast<std::int64_t>(r.sifted),
                          r.sifted_rate, r.qber, r.half_width, r.multiphoton_exposure, r.multiphoton_fraction});
  }
  maybe_emit(table, common, out);
  return kExitOk;
}

// ---- spooky-speed -------------------------------------------------------

int run_spooky(std::optional<double> target, const CommonOptions& common, const ScenarioConfig& base,
               std::ostream& out) {
  using namespace relativity;
  const ScenarioConfig cfg = resolve_config(common, base);
  const AlignmentBudget budget = to_budget(cfg);

  out << std::setprecision(6);
  out << "Speed of the nonlocal influence: delta_t " << cfg.relativity.delta_t_ps << " ps, separation "
      << cfg.relativity.separation_km << " km, fiber " << cfg.relativity.fiber_length_km << " km\n";
  out << "  alignment precision delta_t / fiber delay = " << alignment_precision(budget, cfg.channel.group_index)
      << "\n";

  Table table{{"frame", "speed_m_s", "cos_theta", "delta_t_s", "bound_c"}, {}};
  for (const auto& f : cfg.relativity.frames) {
    const double dt = frame_delta_t(budget, {f.speed_m_s, f.cos_theta});
    const double bound = dt > 0.0 ? spooky_speed_bound(budget.separation, dt) : INFINITY;
    out << "  " << std::left << std::setw(8) << f.name << std::right << " v=" << f.speed_m_s
        << " m/s cos_theta=" << f.cos_theta << "  delta_t'=" << dt << " s  bound=" << format_number(bound)
        << " c\n";
    table.rows.push_back({f.name, f.speed_m_s, f.cos_theta, dt, bound});

    if (target && f.speed_m_s > 0.0) {
      const auto inv = invert_frame_angle(budget, f.speed_m_s, *target);
      out << "    orientation for bound " << format_number(*target) << " c: theta=" << inv.theta / kDeg
          << " deg, cos_theta=" << inv.cos_theta << " (bound " << format_number(inv.bound) << " c)\n";
    }
  }
  maybe_emit(table, common, out);
  return kExitOk;
}

// ---- before-before ------------------------------------------------------

struct BeforeBeforeOptions {
  std::optional<double> delta_t_ps;
  std::optional<double> separation_km;
  std::optional<double> speed;
  std::optional<double> resolution_deg;
};

int run_before_before(const BeforeBeforeOptions& opt, const CommonOptions& common,
                      const ScenarioConfig& base, std::ostream& out) {
  using namespace relativity;
  ScenarioConfig cfg = resolve_config(common, base);
  if (opt.delta_t_ps) cfg.relativity.delta_t_ps = *opt.delta_t_ps;
  if (opt.separation_km) cfg.relativity.separation_km = *opt.separation_km;
  if (opt.speed) cfg.relativity.wheel_speed_m_s = *opt.speed;
  if (opt.resolution_deg) cfg.relativity.angular_resolution_deg = *opt.resolution_deg;
  if (auto v = violations(cfg); !v.empty()) throw ConfigError(std::move(v));

  const double dt = cfg.relativity.delta_t_ps * 1e-12;
  const double l = cfg.relativity.separation_km * 1e3;
  const double v = cfg.relativity.wheel_speed_m_s;
  const double threshold = before_before_threshold(dt, l);
  const bool head_on = before_before_satisfied(v, 1.0, dt, l);
  const auto construction = before_before_construction(v, 1.0, dt, l);
  const auto windows = rotating_absorber_windows(v, dt, l, cfg.relativity.angular_resolution_deg * kDeg);

  out << std::setprecision(6);
  out << "Before-before feasibility: delta_t " << cfg.relativity.delta_t_ps << " ps, separation "
      << cfg.relativity.separation_km << " km\n";
  out << "  threshold v > c^2 delta_t / l = " << threshold << " m/s\n";
  out << "  analyzer speed " << v << " m/s along the axis: " << (head_on ? "satisfied" : "not satisfied")
      << " (t_bob - t_alice: " << construction.gap_in_alice_frame << " s in Alice's frame, "
      << construction.gap_in_bob_frame << " s in Bob's frame)\n";
  out << "  rotating absorber: duty fraction " << windows.duty_fraction << " (sweep "
      << windows.swept_fraction << ", " << windows.intervals.size() << " windows)\n";

  Table table{{"begin_deg", "end_deg"}, {}};
  for (const auto& w : windows.intervals) table.rows.push_back({w.begin / kDeg, w.end / kDeg});
  maybe_emit(table, common, out);
  return kExitOk;
}

int run_preset_only(const std::vector<std::string>& args, const ScenarioConfig& preset, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"Print or save the preset configuration", "preset geneva"};
  std::string save_path;
  app.add_option("--save", save_path, "write the preset as an INI file");
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfigError;
  }
  if (save_path.empty()) {
    out << to_ini(preset);
  } else {
    save_config(preset, save_path);
    out << "wrote " << save_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_command(std::span<const std::string> args_in, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(args_in.begin(), args_in.end());
  ScenarioConfig base;
  std::string program = "entangle";

  if (!args.empty() && args[0] == "preset") {
    if (args.size() < 2 || args[1] != "geneva") {
      err << "error: unknown preset (available: geneva)\n";
      return kExitConfigError;
    }
    base = geneva_preset();
    program = "entangle preset geneva";
    args.erase(args.begin(), args.begin() + 2);
    if (args.empty() || args[0].starts_with("-")) {
      try {
        return run_preset_only(args, base, out, err);
      } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
      }
    }
  }

  CLI::App app{"Entanglement-based QKD, Bell-CHSH and relativistic timing toolkit", program};
  app.require_subcommand(1);
  if (program == "entangle") {
    app.footer("Presets:\n  preset geneva [--save PATH]   print or save the Geneva scenario\n"
               "  preset geneva <subcommand>    run a subcommand on top of it");
  }

  CommonOptions common;
  BellOptions bell;
  QkdOptions qkd_opt;
  std::optional<std::uint64_t> scheme_gates;
  std::optional<double> invert_target;
  BeforeBeforeOptions bb;

  auto* bell_cmd = app.add_subcommand("bell", "CHSH value, correlations and the QBER-visibility bridge");
  add_common(bell_cmd, common);
  bell_cmd->add_option("--visibility", bell.visibility, "two-photon visibility V in [0, 1]");
  bell_cmd->add_option("--a-deg", bell.a_deg, "Alice setting a (degrees)");
  bell_cmd->add_option("--a-prime-deg", bell.a_prime_deg, "Alice setting a' (degrees)");
  bell_cmd->add_option("--b-deg", bell.b_deg, "Bob setting b (degrees)");
  bell_cmd->add_option("--b-prime-deg", bell.b_prime_deg, "Bob setting b' (degrees)");
  bell_cmd->add_option("--sweep", bell.sweep, "tabulate S and QBER over N+1 visibilities in [0, 1]");
  bell_cmd->add_option("--unitary-pairs", bell.unitary_pairs, "random pairs for the transpose-identity check");

  auto* qkd_cmd = app.add_subcommand("qkd", "simulate, sift, reconcile and amplify a key");
  add_common(qkd_cmd, common);
  qkd_cmd->add_option("--sessions", qkd_opt.sessions, "independent sessions (seeds derived per index)");
  qkd_cmd->add_option("--threads", qkd_opt.threads, "worker threads for multiple sessions");
  qkd_cmd->add_option("--gates", qkd_opt.gates, "gates per session");
  qkd_cmd->add_option("--transcript", qkd_opt.transcript_path, "write session 0 as a tab-separated transcript");
  qkd_cmd->add_option("--replay", qkd_opt.replay_path, "post-process a saved transcript instead of simulating")
      ->excludes("--transcript");

  auto* schemes_cmd = app.add_subcommand("schemes", "QBER and sifted rate across the source ladder");
  add_common(schemes_cmd, common);
  schemes_cmd->add_option("--gates", scheme_gates, "gates per scheme");

  auto* spooky_cmd = app.add_subcommand("spooky-speed", "lower bounds on the speed of the nonlocal influence");
  add_common(spooky_cmd, common);
  spooky_cmd->add_option("--invert", invert_target, "report the frame orientation giving this bound (units of c)");

  auto* bb_cmd = app.add_subcommand("before-before", "moving-analyzer feasibility and absorber windows");
  add_common(bb_cmd, common);
  bb_cmd->add_option("--delta-t-ps", bb.delta_t_ps, "timing alignment (ps)");
  bb_cmd->add_option("--separation-km", bb.separation_km, "Alice-Bob distance (km)");
  bb_cmd->add_option("--speed", bb.speed, "analyzer / wheel tangential speed (m/s)");
  bb_cmd->add_option("--resolution-deg", bb.resolution_deg, "wheel phase sweep step (degrees)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (bell_cmd->parsed()) return run_bell(bell, common, base, out);
    if (qkd_cmd->parsed()) return run_qkd_command(qkd_opt, common, base, out);
    if (schemes_cmd->parsed()) return run_schemes(scheme_gates, common, base, out);
    if (spooky_cmd->parsed()) return run_spooky(invert_target, common, base, out);
    if (bb_cmd->parsed()) return run_before_before(bb, common, base, out);
  } catch (const ConfigError& e) {
    err << "configuration error:\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfigError;
}

}  // namespace entangle::cli
