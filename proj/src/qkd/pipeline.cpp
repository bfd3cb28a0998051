#include "entangle/qkd/pipeline.hpp"

#include <cmath>

#include "entangle/qkd/cascade.hpp"
#include "entangle/qkd/information.hpp"
#include "entangle/qkd/privacy.hpp"
#include "entangle/random.hpp"

namespace entangle::qkd {

namespace {

enum Stream : std::uint64_t { kSession = 0, kSample = 1, kCascade = 2, kHash = 3 };

}  // namespace

QkdSessionResult process_records(std::span<const RawRecord> records, const PipelineParams& params,
                                 std::uint64_t seed) {
  QkdSessionResult result;
  result.n_gates = records.size();
  for (const auto& r : records) {
    if (r.alice_click() && r.bob_click()) ++result.double_clicks;
  }

  const SiftedKey sifted = sift(records);
  result.sifted_length = sifted.size();
  result.qber = estimate_qber(sifted, params.sample_fraction, derive_seed(seed, kSample));

  const SiftedKey remaining = discard_positions(sifted, result.qber.disclosed);
  result.reconciled_key_a = remaining.alice;
  result.reconciled_key_b = remaining.bob;

  const double threshold = security_threshold();
  if (!result.qber.conclusive) {
    result.verdict = SecurityVerdict::inconclusive;
    return result;
  }
  if (result.qber.estimate >= threshold) {
    result.verdict = SecurityVerdict::insecure;
    return result;
  }

  const CascadeResult cascade = cascade_correct(remaining.alice, remaining.bob,
                                                result.qber.estimate, derive_seed(seed, kCascade));
  result.reconciled_key_b = cascade.corrected;
  result.leaked_bits = cascade.leaked_bits;
  result.cascade_passes = cascade.passes_used;
  result.secure_length = secure_key_length(remaining.size(), result.qber.estimate,
                                           result.leaked_bits, params.epsilon_margin);

  if (result.secure_length <= 0) {
    result.verdict = SecurityVerdict::insecure;
    return result;
  }
  if (result.qber.estimate + result.qber.half_width >= threshold) {
    result.verdict = SecurityVerdict::inconclusive;
    return result;
  }

  const std::uint64_t hash_seed = derive_seed(seed, kHash);
  result.final_key_a = privacy_amplify(result.reconciled_key_a, result.leaked_bits,
                                       result.qber.estimate, params.epsilon_margin, hash_seed);
  result.final_key_b = privacy_amplify(result.reconciled_key_b, result.leaked_bits,
                                       result.qber.estimate, params.epsilon_margin, hash_seed);
  result.verdict = SecurityVerdict::secure;
  return result;
}

QkdSessionResult run_qkd(const SessionSetup& setup, std::uint64_t n_gates,
                         const PipelineParams& params, std::uint64_t seed,
                         std::vector<RawRecord>* records_out) {
  std::vector<RawRecord> records = run_session(setup, n_gates, derive_seed(seed, kSession));
  QkdSessionResult result = process_records(records, params, seed);
  if (records_out) *records_out = std::move(records);
  return result;
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::weak_pulse: return "weak-pulse";
    case Scheme::heralded: return "heralded";
    case Scheme::remote_preparation: return "remote-preparation";
    case Scheme::central: return "central";
  }
  return "?";
}

SessionSetup scheme_setup(const SchemeLadder& ladder, Scheme scheme) {
  SessionSetup setup;
  setup.channel_a = ladder.channel_a;
  setup.channel_b = ladder.channel_b;
  setup.detector_a = ladder.detector_a;
  setup.detector_b = ladder.detector_b;
  setup.protocol = ladder.protocol;
  switch (scheme) {
    case Scheme::weak_pulse:
      setup.source = photonics::WeakCoherentSource{ladder.mu, ladder.visibility};
      setup.channel_a.length_km = 0.0;
      break;
    case Scheme::heralded:
      setup.source = photonics::HeraldedPairSource{ladder.pair_prob_per_gate,
                                                   ladder.herald_efficiency, ladder.visibility};
      setup.channel_a.length_km = 0.0;
      break;
    case Scheme::remote_preparation:
      setup.source = photonics::CentralPairSource{ladder.pair_prob_per_gate, ladder.visibility};
      setup.channel_a.length_km = 0.0;
      break;
    case Scheme::central:
      setup.source = photonics::CentralPairSource{ladder.pair_prob_per_gate, ladder.visibility};
      break;
  }
  return setup;
}

std::vector<SchemeRow> scheme_equivalence_report(const SchemeLadder& ladder, std::uint64_t seed) {
  constexpr Scheme kLadder[] = {Scheme::weak_pulse, Scheme::heralded, Scheme::remote_preparation,
                                Scheme::central};
  std::vector<SchemeRow> rows;
  for (std::size_t i = 0; i < std::size(kLadder); ++i) {
    const Scheme scheme = kLadder[i];
    const auto records = run_session(scheme_setup(ladder, scheme), ladder.n_gates,
                                     derive_seed(seed, i));
    const SiftedKey sifted = sift(records);

    SchemeRow row;
    row.scheme = scheme;
    row.sifted = sifted.size();
    row.sifted_rate = static_cast<double>(row.sifted) / static_cast<double>(ladder.n_gates);
    std::size_t errors = 0;
    for (std::size_t k = 0; k < sifted.size(); ++k) errors += sifted.alice[k] != sifted.bob[k];
    if (row.sifted > 0) {
      const double n = static_cast<double>(row.sifted);
      row.qber = static_cast<double>(errors) / n;
      row.half_width = 1.96 * std::sqrt(row.qber * (1.0 - row.qber) / n);
    }
    std::size_t multi = 0;
    for (const auto& r : records) multi += r.multiphoton;
    row.multiphoton_fraction = static_cast<double>(multi) / static_cast<double>(ladder.n_gates);
    if (scheme == Scheme::weak_pulse) {
      row.multiphoton_exposure = photonics::multiphoton_probability({ladder.mu, ladder.visibility});
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace entangle::qkd
