#include "entangle/qkd/session.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "entangle/quantum_core.hpp"

namespace entangle::qkd {

namespace {

using photonics::Detection;
using photonics::DetectorState;

struct Outcomes {
  std::uint8_t alice;
  std::uint8_t bob;
};

// Samples (x, y) from the joint distribution; outcome +1 maps to bit 0.
Outcomes sample_outcomes(const quantum::JointProbabilities& p, Rng& rng) {
  const double u = rng.uniform();
  if (u < p.plus_plus) return {0, 0};
  if (u < p.plus_plus + p.plus_minus) return {0, 1};
  if (u < p.plus_plus + p.plus_minus + p.minus_plus) return {1, 0};
  return {1, 1};
}

// Photon reaching the far end of a channel.
bool survives(double transmission, Rng& rng) { return rng.bernoulli(transmission); }

// A click caused by noise alone carries a uniformly random bit.
std::uint8_t recorded_bit(const Detection& d, std::uint8_t quantum_bit, Rng& rng) {
  return d.signal ? quantum_bit : rng.bit();
}

class GateSimulator {
 public:
  GateSimulator(const SessionSetup& setup, std::uint64_t seed)
      : setup_(setup),
        rng_(seed),
        model_(photonics::source_visibility(setup.source)),
        t_a_(photonics::channel_transmission(setup.channel_a)),
        t_b_(photonics::channel_transmission(setup.channel_b)) {}

  RawRecord run_gate(std::uint64_t gate) {
    RawRecord rec;
    rec.gate_index = gate;
    const double p_key = setup_.protocol.key_basis_prob;
    rec.alice_basis = rng_.bernoulli(p_key) ? Basis::key : Basis::check;
    rec.bob_basis = rng_.bernoulli(p_key) ? Basis::key : Basis::check;

    const quantum::MeasurementSetting a(setup_.protocol.angles.angle(rec.alice_basis));
    const quantum::MeasurementSetting b(setup_.protocol.angles.angle(rec.bob_basis));
    const Outcomes outcome = sample_outcomes(quantum::joint_probabilities(model_, a, b), rng_);

    std::visit([&](const auto& source) { emit(source, rec, outcome); }, setup_.source);
    return rec;
  }

 private:
  // Prepare-and-measure: Alice always knows her prepared bit.
  void emit(const photonics::WeakCoherentSource& source, RawRecord& rec, const Outcomes& outcome) {
    const std::uint64_t photons = rng_.poisson(source.mu);
    rec.multiphoton = photons >= 2;
    bool arrived = false;
    for (std::uint64_t i = 0; i < photons; ++i) arrived = survives(t_b_, rng_) || arrived;

    rec.alice_bit = outcome.alice;
    const Detection d_b = photonics::detect(setup_.detector_b, arrived, rec.gate_index, bob_, rng_);
    if (d_b.click) rec.bob_bit = recorded_bit(d_b, outcome.bob, rng_);
  }

  // Trigger photon detected at Alice, partner prepared and sent to Bob.
  void emit(const photonics::HeraldedPairSource& source, RawRecord& rec, const Outcomes& outcome) {
    const bool pair = rng_.bernoulli(source.pair_prob_per_gate);
    const bool emitted = pair && rng_.bernoulli(source.herald_efficiency);
    const bool arrived = emitted && survives(t_b_, rng_);

    const Detection herald = photonics::detect(setup_.detector_a, pair, rec.gate_index, alice_, rng_);
    const Detection d_b = photonics::detect(setup_.detector_b, arrived, rec.gate_index, bob_, rng_);
    // The partner photon is prepared whether or not the trigger fired; Alice
    // only learns of it (and records her setting) through a trigger click.
    if (herald.click) rec.alice_bit = outcome.alice;
    if (d_b.click) rec.bob_bit = recorded_bit(d_b, outcome.bob, rng_);
  }

  void emit(const photonics::CentralPairSource& source, RawRecord& rec, const Outcomes& outcome) {
    const bool pair = rng_.bernoulli(source.pair_prob_per_gate);
    const bool at_alice = pair && survives(t_a_, rng_);
    const bool at_bob = pair && survives(t_b_, rng_);

    const Detection d_a = photonics::detect(setup_.detector_a, at_alice, rec.gate_index, alice_, rng_);
    const Detection d_b = photonics::detect(setup_.detector_b, at_bob, rec.gate_index, bob_, rng_);
    if (d_a.click) rec.alice_bit = recorded_bit(d_a, outcome.alice, rng_);
    if (d_b.click) rec.bob_bit = recorded_bit(d_b, outcome.bob, rng_);
  }

  const SessionSetup& setup_;
  Rng rng_;
  quantum::CorrelationModel model_;
  double t_a_;
  double t_b_;
  DetectorState alice_;
  DetectorState bob_;
};

void validate_setup(const SessionSetup& setup) {
  photonics::validate(photonics::violations(setup.source), "source");
  photonics::validate(setup.channel_a.violations(), "channel A");
  photonics::validate(setup.channel_b.violations(), "channel B");
  photonics::validate(setup.detector_a.violations(), "detector A");
  photonics::validate(setup.detector_b.violations(), "detector B");
  const double p = setup.protocol.key_basis_prob;
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("key_basis_prob must lie in [0, 1]");
  if (!std::isfinite(setup.protocol.angles.key) || !std::isfinite(setup.protocol.angles.check)) {
    throw std::invalid_argument("basis angles must be finite");
  }
}

char basis_char(Basis b) { return b == Basis::key ? 'K' : 'C'; }

char bit_char(const std::optional<std::uint8_t>& bit) {
  if (!bit) return '-';
  return *bit ? '1' : '0';
}

}  // namespace

std::vector<RawRecord> run_session(const SessionSetup& setup, std::uint64_t n_gates,
                                   std::uint64_t seed) {
  if (n_gates == 0) throw std::invalid_argument("n_gates must be >= 1");
  validate_setup(setup);

  GateSimulator sim(setup, seed);
  std::vector<RawRecord> records;
  records.reserve(n_gates);
  for (std::uint64_t g = 0; g < n_gates; ++g) records.push_back(sim.run_gate(g));
  return records;
}

SiftedKey sift(std::span<const RawRecord> records) {
  SiftedKey out;
  for (const auto& r : records) {
    if (!r.alice_click() || !r.bob_click() || r.alice_basis != r.bob_basis) continue;
    out.alice.push_back(*r.alice_bit);
    out.bob.push_back(*r.bob_bit);
    out.gates.push_back(r.gate_index);
  }
  return out;
}

QberEstimate estimate_qber(const SiftedKey& sifted, double sample_fraction, std::uint64_t seed) {
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw std::invalid_argument("sample_fraction must lie in (0, 1]");
  }
  QberEstimate est;
  const std::size_t n = sifted.size();
  if (n == 0) return est;

  auto m = static_cast<std::size_t>(std::llround(sample_fraction * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n);

  // Partial Fisher-Yates over the index set.
  std::vector<std::size_t> index(n);
  for (std::size_t i = 0; i < n; ++i) index[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(index[i], index[j]);
  }
  est.disclosed.assign(index.begin(), index.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(est.disclosed.begin(), est.disclosed.end());

  for (std::size_t pos : est.disclosed) {
    if (sifted.alice[pos] != sifted.bob[pos]) ++est.mismatches;
  }
  est.conclusive = true;
  est.sample_size = m;
  est.estimate = static_cast<double>(est.mismatches) / static_cast<double>(m);
  est.half_width = 1.96 * std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(m));
  return est;
}

SiftedKey discard_positions(const SiftedKey& sifted, std::span<const std::size_t> positions) {
  SiftedKey out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < sifted.size(); ++i) {
    if (next < positions.size() && positions[next] == i) {
      ++next;
      continue;
    }
    out.alice.push_back(sifted.alice[i]);
    out.bob.push_back(sifted.bob[i]);
    out.gates.push_back(sifted.gates[i]);
  }
  return out;
}

void write_transcript(std::ostream& out, std::span<const RawRecord> records) {
  out << "#gate_index\talice_basis\tbob_basis\talice_bit\tbob_bit\tclicks\n";
  for (const auto& r : records) {
    out << r.gate_index << '\t' << basis_char(r.alice_basis) << '\t' << basis_char(r.bob_basis)
        << '\t' << bit_char(r.alice_bit) << '\t' << bit_char(r.bob_bit) << '\t'
        << (r.alice_click() ? '1' : '0') << (r.bob_click() ? '1' : '0') << '\n';
  }
}

std::vector<RawRecord> read_transcript(std::istream& in) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& why) {
    throw std::runtime_error("transcript line " + std::to_string(line_no) + ": " + why);
  };
  auto parse_basis = [&](const std::string& s) {
    if (s == "K") return Basis::key;
    if (s == "C") return Basis::check;
    fail("bad basis '" + s + "'");
    return Basis::key;
  };
  auto parse_bit = [&](const std::string& s) -> std::optional<std::uint8_t> {
    if (s == "-") return std::nullopt;
    if (s == "0" || s == "1") return static_cast<std::uint8_t>(s[0] - '0');
    fail("bad bit '" + s + "'");
    return std::nullopt;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string gate, ab, bb, abit, bbit, clicks, extra;
    if (!std::getline(fields, gate, '\t') || !std::getline(fields, ab, '\t') ||
        !std::getline(fields, bb, '\t') || !std::getline(fields, abit, '\t') ||
        !std::getline(fields, bbit, '\t') || !std::getline(fields, clicks, '\t')) {
      fail("expected 6 tab-separated fields");
    }
    if (std::getline(fields, extra, '\t')) fail("unexpected extra field");

    RawRecord r;
    try {
      std::size_t used = 0;
      r.gate_index = std::stoull(gate, &used);
      if (used != gate.size()) fail("bad gate index '" + gate + "'");
    } catch (const std::logic_error&) {
      fail("bad gate index '" + gate + "'");
    }
    r.alice_basis = parse_basis(ab);
    r.bob_basis = parse_basis(bb);
    r.alice_bit = parse_bit(abit);
    r.bob_bit = parse_bit(bbit);
    const std::string expected{r.alice_click() ? '1' : '0', r.bob_click() ? '1' : '0'};
    if (clicks != expected) fail("clicks field '" + clicks + "' disagrees with bits");
    records.push_back(r);
  }
  return records;
}

}  // namespace entangle::qkd
