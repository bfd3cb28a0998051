#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "entangle/qkd/session.hpp"
#include "entangle/qkd/types.hpp"

namespace entangle::qkd {

struct PipelineParams {
  double sample_fraction = 0.1;
  std::size_t epsilon_margin = 0;
};

struct QkdSessionResult {
  std::uint64_t n_gates = 0;
  std::size_t double_clicks = 0;
  std::size_t sifted_length = 0;
  QberEstimate qber;
  BitString reconciled_key_a;
  BitString reconciled_key_b;
  std::size_t leaked_bits = 0;
  int cascade_passes = 0;
  std::int64_t secure_length = 0;
  BitString final_key_a;
  BitString final_key_b;
  SecurityVerdict verdict = SecurityVerdict::inconclusive;

  // Simulation-side check; the real parties would compare hashes.
  bool keys_agree() const { return final_key_a == final_key_b; }
};

// Post-processing of one session's records: sift, disclose a QBER sample,
// reconcile, amplify. The verdict is
//   INCONCLUSIVE  empty sample, or estimate below the threshold while its
//                 confidence interval reaches it (no key is released);
//   INSECURE      estimate at or above the threshold, or no secure length left;
//   SECURE        otherwise.
QkdSessionResult process_records(std::span<const RawRecord> records, const PipelineParams& params,
                                 std::uint64_t seed);

// run_session followed by process_records with independent derived seeds.
// When `records_out` is non-null the raw records are moved into it.
QkdSessionResult run_qkd(const SessionSetup& setup, std::uint64_t n_gates,
                         const PipelineParams& params, std::uint64_t seed,
                         std::vector<RawRecord>* records_out = nullptr);

enum class Scheme : std::uint8_t { weak_pulse, heralded, remote_preparation, central };

std::string_view to_string(Scheme s);

// One physical parameter set shared by every rung of the source ladder.
struct SchemeLadder {
  double mu = 0.1;
  double pair_prob_per_gate = 0.1;
  double herald_efficiency = 1.0;
  double visibility = 1.0;
  photonics::FiberChannel channel_a;
  photonics::FiberChannel channel_b;
  photonics::DetectorModel detector_a;
  photonics::DetectorModel detector_b;
  ProtocolParams protocol;
  std::uint64_t n_gates = 100'000;
};

struct SchemeRow {
  Scheme scheme = Scheme::central;
  std::size_t sifted = 0;
  double sifted_rate = 0.0;  // sifted bits per gate
  double qber = 0.0;         // census over the whole sifted key
  double half_width = 0.0;
  double multiphoton_exposure = 0.0;  // analytic P(n >= 2), weak pulses only
  double multiphoton_fraction = 0.0;  // observed fraction of multi-photon gates
};

// Session setup for one rung. Sources at Alice (all but `central`) use a
// zero-length Alice arm; Bob's arm is channel_b throughout.
SessionSetup scheme_setup(const SchemeLadder& ladder, Scheme scheme);

std::vector<SchemeRow> scheme_equivalence_report(const SchemeLadder& ladder, std::uint64_t seed);

}  // namespace entangle::qkd
