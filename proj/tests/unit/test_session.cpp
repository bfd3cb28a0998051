#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "entangle/qkd/session.hpp"
#include "support.hpp"

using namespace entangle;
using namespace entangle::qkd;
using entangle::testing::ideal_setup;
using entangle::testing::mismatches;
using entangle::testing::within_3_sigma;

TEST_CASE("perfect visibility gives identical sifted keys") {
  const auto records = run_session(ideal_setup(1.0), 20'000, 1);
  const auto key = sift(records);
  CHECK(key.size() > 9'000);
  CHECK(mismatches(key) == 0);
}

TEST_CASE("sifted QBER follows (1 - V) / 2") {
  const auto key = sift(run_session(ideal_setup(0.95), 100'000, 2));
  REQUIRE(key.size() > 40'000);
  CHECK(within_3_sigma(static_cast<double>(mismatches(key)) / key.size(), 0.025, key.size()));
}

TEST_CASE("ideal devices: half the gates survive sifting") {
  const auto records = run_session(ideal_setup(0.9), 100'000, 3);
  const auto key = sift(records);
  CHECK(within_3_sigma(static_cast<double>(key.size()) / records.size(), 0.5, records.size()));
  for (const auto& r : records) {
    REQUIRE(r.alice_click());
    REQUIRE(r.bob_click());
  }
}

TEST_CASE("mismatched bases are uncorrelated") {
  const auto records = run_session(ideal_setup(1.0), 100'000, 4);
  std::size_t n = 0, equal = 0;
  for (const auto& r : records) {
    if (r.alice_basis == r.bob_basis) continue;
    ++n;
    equal += *r.alice_bit == *r.bob_bit;
  }
  CHECK(within_3_sigma(static_cast<double>(equal) / n, 0.5, n));
}

TEST_CASE("coincidence rate with lossy arms") {
  // 12.0412 km at 0.25 dB/km is a transmission of 0.5.
  auto setup = ideal_setup(1.0);
  setup.channel_b.length_km = 10.0 * std::log10(2.0) / 0.25 * 1.0;
  CHECK(photonics::channel_transmission(setup.channel_b) == doctest::Approx(0.5).epsilon(1e-12));
  setup.detector_a.efficiency = 0.1;
  setup.detector_b.efficiency = 0.1;
  setup.channel_a.length_km = 0.0;
  // P(both click) = 1 * 0.1 * 0.5 * 0.1 = 0.005, half in matching bases.
  const std::size_t n = 400'000;
  const auto records = run_session(setup, n, 5);
  std::size_t both = 0;
  for (const auto& r : records) both += r.alice_click() && r.bob_click();
  CHECK(within_3_sigma(static_cast<double>(both) / n, 0.005, n));
  CHECK(within_3_sigma(static_cast<double>(sift(records).size()) / n, 0.0025, n));
}

TEST_CASE("heralded source: Bob clicks at herald_efficiency given a herald") {
  SessionSetup setup = ideal_setup(1.0);
  setup.source = photonics::HeraldedPairSource{0.5, 0.7, 1.0};
  const std::size_t n = 200'000;
  const auto records = run_session(setup, n, 6);
  std::size_t heralds = 0, bob = 0;
  for (const auto& r : records) {
    if (!r.alice_click()) continue;
    ++heralds;
    bob += r.bob_click();
  }
  CHECK(within_3_sigma(static_cast<double>(heralds) / n, 0.5, n));
  CHECK(within_3_sigma(static_cast<double>(bob) / heralds, 0.7, heralds));
  CHECK(mismatches(sift(records)) == 0);
}

TEST_CASE("weak pulses: multiphoton fraction and transmission") {
  SessionSetup setup = ideal_setup(1.0);
  setup.source = photonics::WeakCoherentSource{0.1, 1.0};
  const std::size_t n = 500'000;
  const auto records = run_session(setup, n, 7);
  std::size_t multi = 0, bob = 0;
  for (const auto& r : records) {
    REQUIRE(r.alice_click());
    multi += r.multiphoton;
    bob += r.bob_click();
  }
  const double p_multi = photonics::multiphoton_probability(photonics::WeakCoherentSource{0.1, 1.0});
  CHECK(within_3_sigma(static_cast<double>(multi) / n, p_multi, n));
  CHECK(within_3_sigma(static_cast<double>(bob) / n, 1.0 - std::exp(-0.1), n));
}

TEST_CASE("dark-only clicks carry random bits") {
  SessionSetup setup = ideal_setup(1.0);
  setup.source = photonics::CentralPairSource{0.0, 1.0};
  setup.detector_a.dark_count_prob_per_gate = 0.5;
  setup.detector_b.dark_count_prob_per_gate = 0.5;
  const auto key = sift(run_session(setup, 200'000, 8));
  REQUIRE(key.size() > 10'000);
  CHECK(within_3_sigma(static_cast<double>(mismatches(key)) / key.size(), 0.5, key.size()));
}

TEST_CASE("sessions are reproducible and validated") {
  const auto setup = ideal_setup(0.9);
  CHECK(run_session(setup, 1000, 9) == run_session(setup, 1000, 9));
  CHECK(run_session(setup, 1000, 9) != run_session(setup, 1000, 10));
  CHECK_THROWS_AS(run_session(setup, 0, 9), std::invalid_argument);
  auto bad = setup;
  bad.detector_b.efficiency = 2.0;
  CHECK_THROWS_AS(run_session(bad, 10, 9), std::invalid_argument);
  bad = setup;
  bad.protocol.key_basis_prob = -0.5;
  CHECK_THROWS_AS(run_session(bad, 10, 9), std::invalid_argument);
}

TEST_CASE("estimate_qber") {
  SiftedKey key;
  for (int i = 0; i < 1000; ++i) {
    key.alice.push_back(0);
    key.bob.push_back(i % 10 == 0 ? 1 : 0);
    key.gates.push_back(i);
  }
  SUBCASE("full disclosure is exact") {
    const auto est = estimate_qber(key, 1.0, 1);
    CHECK(est.conclusive);
    CHECK(est.sample_size == 1000);
    CHECK(est.mismatches == 100);
    CHECK(est.estimate == doctest::Approx(0.1));
    CHECK(est.half_width == doctest::Approx(1.96 * std::sqrt(0.1 * 0.9 / 1000)));
  }
  SUBCASE("sample positions are distinct and sorted") {
    const auto est = estimate_qber(key, 0.1, 2);
    CHECK(est.sample_size == 100);
    REQUIRE(est.disclosed.size() == 100);
    for (std::size_t i = 1; i < est.disclosed.size(); ++i) CHECK(est.disclosed[i - 1] < est.disclosed[i]);
    CHECK(est.disclosed.back() < 1000);
    const auto rest = discard_positions(key, est.disclosed);
    CHECK(rest.size() == 900);
  }
  SUBCASE("a tiny fraction still samples one bit") {
    CHECK(estimate_qber(key, 1e-9, 3).sample_size == 1);
  }
  SUBCASE("bad fractions and empty keys") {
    CHECK_THROWS_AS(estimate_qber(key, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_qber(key, 1.5, 1), std::invalid_argument);
    const auto empty = estimate_qber(SiftedKey{}, 0.5, 1);
    CHECK_FALSE(empty.conclusive);
    CHECK(empty.sample_size == 0);
  }
}

TEST_CASE("QBER at the threshold visibility") {
  const double v = 1.0 / std::sqrt(2.0);
  const auto key = sift(run_session(ideal_setup(v), 210'000, 11));
  REQUIRE(key.size() >= 100'000);
  const auto est = estimate_qber(key, 1.0, 12);
  const double d = 0.5 * (1.0 - v);
  CHECK(within_3_sigma(est.estimate, d, est.sample_size));
  CHECK(est.half_width < 0.003);
}

TEST_CASE("transcript round trip") {
  SessionSetup setup = ideal_setup(0.9);
  setup.detector_a.efficiency = 0.4;
  setup.detector_b.efficiency = 0.6;
  auto records = run_session(setup, 2000, 13);
  std::stringstream ss;
  write_transcript(ss, records);
  const auto back = read_transcript(ss);
  REQUIRE(back.size() == records.size());
  for (auto& r : records) r.multiphoton = false;
  CHECK(back == records);

  std::stringstream header_only;
  write_transcript(header_only, {});
  CHECK(header_only.str() == "#gate_index\talice_basis\tbob_basis\talice_bit\tbob_bit\tclicks\n");
}

TEST_CASE("malformed transcripts name the line") {
  auto fails_at = [](const std::string& text, const std::string& line) {
    std::istringstream in(text);
    try {
      read_transcript(in);
    } catch (const std::runtime_error& e) {
      return std::string(e.what()).find("line " + line) != std::string::npos;
    }
    return false;
  };
  const std::string header = "#gate_index\talice_basis\tbob_basis\talice_bit\tbob_bit\tclicks\n";
  CHECK(fails_at(header + "0\tK\tK\t1\t1\t11\n1\tX\tK\t1\t1\t11\n", "3"));
  CHECK(fails_at(header + "0\tK\tK\t1\t-\t11\n", "2"));
  CHECK(fails_at(header + "0\tK\tK\t1\n", "2"));
  CHECK(fails_at(header + "abc\tK\tK\t1\t1\t11\n", "2"));
  CHECK(fails_at(header + "0\tK\tK\t1\t1\t11\textra\n", "2"));
}
