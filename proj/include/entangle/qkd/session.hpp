#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "entangle/photonics.hpp"
#include "entangle/qkd/types.hpp"

namespace entangle::qkd {

// Analyzer angles (Bloch x-z great circle) for the two bases.
struct BasisAngles {
  double key = 0.0;
  double check = std::numbers::pi / 2.0;

  double angle(Basis b) const { return b == Basis::key ? key : check; }
};

struct ProtocolParams {
  double key_basis_prob = 0.5;
  BasisAngles angles;
};

struct SessionSetup {
  photonics::SourceModel source = photonics::CentralPairSource{};
  photonics::FiberChannel channel_a;
  photonics::FiberChannel channel_b;
  photonics::DetectorModel detector_a;
  photonics::DetectorModel detector_b;
  ProtocolParams protocol;
};

// Bits are present only when the corresponding detector clicked. For the
// weak-pulse scheme Alice has no detector: her prepared bit is always present.
struct RawRecord {
  std::uint64_t gate_index = 0;
  Basis alice_basis = Basis::key;
  Basis bob_basis = Basis::key;
  std::optional<std::uint8_t> alice_bit;
  std::optional<std::uint8_t> bob_bit;
  bool multiphoton = false;

  bool alice_click() const { return alice_bit.has_value(); }
  bool bob_click() const { return bob_bit.has_value(); }
  bool operator==(const RawRecord&) const = default;
};

struct SiftedKey {
  BitString alice;
  BitString bob;
  std::vector<std::uint64_t> gates;

  std::size_t size() const { return alice.size(); }
};

struct QberEstimate {
  bool conclusive = false;  // false when the disclosed sample is empty
  double estimate = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half-width
  std::size_t sample_size = 0;
  std::size_t mismatches = 0;
  std::vector<std::size_t> disclosed;  // sorted positions into the sifted key
};

// Throws std::invalid_argument on invalid models or n_gates == 0.
std::vector<RawRecord> run_session(const SessionSetup& setup, std::uint64_t n_gates,
                                   std::uint64_t seed);

// Keeps records where both sides clicked in the same basis, in gate order.
SiftedKey sift(std::span<const RawRecord> records);

// Discloses a random subset of round(sample_fraction * n) positions (at least
// one when the key is non-empty). Throws std::invalid_argument unless
// 0 < sample_fraction <= 1.
QberEstimate estimate_qber(const SiftedKey& sifted, double sample_fraction, std::uint64_t seed);

// Copy of the sifted key with the given sorted positions removed.
SiftedKey discard_positions(const SiftedKey& sifted, std::span<const std::size_t> positions);

// Tab-separated transcript, one gate per line:
//   gate_index  alice_basis  bob_basis  alice_bit  bob_bit  clicks
// bases are K or C, absent bits are '-', clicks is two 0/1 flags (Alice, Bob).
// A single header line starting with '#' precedes the records.
void write_transcript(std::ostream& out, std::span<const RawRecord> records);

// Parses a transcript written by write_transcript. Throws std::runtime_error
// with the offending line number on malformed input.
std::vector<RawRecord> read_transcript(std::istream& in);

}  // namespace entangle::qkd
