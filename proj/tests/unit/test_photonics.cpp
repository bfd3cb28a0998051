#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "entangle/photonics.hpp"
#include "entangle/random.hpp"
#include "support.hpp"

using namespace entangle;
using namespace entangle::photonics;
using entangle::testing::within_3_sigma;

TEST_CASE("photon number distribution") {
  const WeakCoherentSource s{0.1, 1.0};
  CHECK(photon_number_pmf(s, 0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-14));
  CHECK(photon_number_pmf(s, 1) == doctest::Approx(0.0904837418).epsilon(1e-9));

  double total = 0.0;
  for (unsigned n = 0; n <= 50; ++n) total += photon_number_pmf(s, n);
  CHECK(std::abs(total - 1.0) <= 1e-12);

  const WeakCoherentSource big{30.0, 1.0};
  CHECK(std::isfinite(photon_number_pmf(big, 400)));
  CHECK(photon_number_pmf(WeakCoherentSource{0.0, 1.0}, 0) == 1.0);
  CHECK(photon_number_pmf(WeakCoherentSource{0.0, 1.0}, 3) == 0.0);
}

TEST_CASE("multiphoton probability") {
  const WeakCoherentSource s{0.1, 1.0};
  CHECK(std::abs(multiphoton_probability(s) - 4.6788e-3) <= 1e-6);

  double series = 0.0;
  for (unsigned n = 2; n <= 60; ++n) series += photon_number_pmf(s, n);
  CHECK(std::abs(series - multiphoton_probability(s)) <= 1e-12);

  double prev = -1.0;
  for (double mu = 0.0; mu <= 2.0; mu += 0.01) {
    const double p = multiphoton_probability(WeakCoherentSource{mu, 1.0});
    CHECK(p > prev);
    prev = p;
  }
  CHECK(multiphoton_probability(WeakCoherentSource{1e-6, 1.0}) == doctest::Approx(0.5e-12).epsilon(1e-5));
}

TEST_CASE("Poisson draws follow the pmf") {
  Rng rng(42);
  const WeakCoherentSource s{0.1, 1.0};
  const std::size_t n = 1'000'000;
  std::size_t multi = 0, one = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = rng.poisson(s.mu);
    multi += k >= 2;
    one += k == 1;
  }
  CHECK(within_3_sigma(static_cast<double>(multi) / n, multiphoton_probability(s), n));
  CHECK(within_3_sigma(static_cast<double>(one) / n, photon_number_pmf(s, 1), n));
}

TEST_CASE("channel transmission and delay") {
  CHECK(channel_transmission(FiberChannel{20.0, 0.25, 1.47}) == doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-14));
  CHECK(channel_transmission(FiberChannel{0.0, 0.25, 1.47}) == 1.0);
  const double t1 = channel_transmission(FiberChannel{7.0, 0.3, 1.47});
  const double t2 = channel_transmission(FiberChannel{11.0, 0.3, 1.47});
  CHECK(t1 * t2 == doctest::Approx(channel_transmission(FiberChannel{18.0, 0.3, 1.47})).epsilon(1e-13));
  CHECK(propagation_delay(FiberChannel{20.0, 0.25, 1.47}) == doctest::Approx(9.8067e-5).epsilon(1e-4));
}

TEST_CASE("parameter validation") {
  CHECK(FiberChannel{-1.0, 0.25, 1.47}.violations().size() == 1);
  CHECK(FiberChannel{1.0, 0.25, 0.9}.violations().size() == 1);
  CHECK(WeakCoherentSource{-0.1, 1.0}.violations().size() == 1);
  CHECK(CentralPairSource{1.1, 1.2}.violations().size() == 2);
  DetectorModel d;
  d.efficiency = 1.5;
  d.gate_period_ns = 0.0;
  CHECK(d.violations().size() == 2);
  CHECK_THROWS_AS(validate(d.violations(), "detector"), std::invalid_argument);
  CHECK_NOTHROW(validate(DetectorModel{}.violations(), "detector"));
}

TEST_CASE("dark counts alone") {
  DetectorModel d = entangle::testing::ideal_detector();
  d.dark_count_prob_per_gate = 1e-3;
  DetectorState state;
  Rng rng(7);
  const std::size_t n = 1'000'000;
  std::size_t clicks = 0;
  for (std::size_t g = 0; g < n; ++g) clicks += detect(d, false, g, state, rng).click;
  CHECK(within_3_sigma(static_cast<double>(clicks) / n, 1e-3, n));
}

TEST_CASE("signal and dark are OR-combined") {
  DetectorModel d = entangle::testing::ideal_detector();
  d.efficiency = 0.1;
  d.dark_count_prob_per_gate = 0.05;
  DetectorState state;
  Rng rng(8);
  const std::size_t n = 1'000'000;
  std::size_t clicks = 0, signals = 0;
  for (std::size_t g = 0; g < n; ++g) {
    const auto det = detect(d, true, g, state, rng);
    clicks += det.click;
    signals += det.signal;
  }
  CHECK(within_3_sigma(static_cast<double>(clicks) / n, 0.1 + 0.05 - 0.1 * 0.05, n));
  CHECK(within_3_sigma(static_cast<double>(signals) / n, 0.1, n));
}

TEST_CASE("dead time blocks every click") {
  DetectorModel d = entangle::testing::ideal_detector();
  d.dark_count_prob_per_gate = 0.3;
  d.dead_time_ns = 1000.0;  // 10 gates at 100 ns
  DetectorState state;
  Rng rng(9);
  std::vector<std::uint64_t> click_gates;
  for (std::uint64_t g = 0; g < 200'000; ++g)
    if (detect(d, g % 3 == 0, g, state, rng).click) click_gates.push_back(g);
  REQUIRE(click_gates.size() > 1000);
  for (std::size_t i = 1; i < click_gates.size(); ++i)
    REQUIRE(static_cast<double>(click_gates[i] - click_gates[i - 1]) * d.gate_period_ns >= d.dead_time_ns);

  DetectorState s2;
  s2.last_click_gate = 100;
  CHECK(in_dead_time(d, s2, 100));
  CHECK(in_dead_time(d, s2, 109));
  CHECK_FALSE(in_dead_time(d, s2, 110));
}

TEST_CASE("a dead detector consumes no randomness") {
  DetectorModel d = entangle::testing::ideal_detector();
  d.dead_time_ns = 500.0;
  DetectorState state;
  state.last_click_gate = 0;
  Rng a(1), b(1);
  for (std::uint64_t g = 1; g < 5; ++g) CHECK_FALSE(detect(d, true, g, state, a).click);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("afterpulse probability decays geometrically") {
  DetectorModel d = entangle::testing::ideal_detector();
  d.afterpulse_prob = 0.2;
  d.afterpulse_decay = 0.5;
  d.afterpulse_window_gates = 4;
  DetectorState s;
  CHECK(afterpulse_probability(d, s, 3) == 0.0);
  s.last_click_gate = 10;
  CHECK(afterpulse_probability(d, s, 10) == 0.0);
  CHECK(afterpulse_probability(d, s, 11) == doctest::Approx(0.2));
  CHECK(afterpulse_probability(d, s, 12) == doctest::Approx(0.1));
  CHECK(afterpulse_probability(d, s, 14) == doctest::Approx(0.025));
  CHECK(afterpulse_probability(d, s, 15) == 0.0);
}

TEST_CASE("afterpulse statistics") {
  DetectorModel d = entangle::testing::ideal_detector();
  d.afterpulse_prob = 0.3;
  d.afterpulse_decay = 0.5;
  d.afterpulse_window_gates = 10;
  Rng rng(12);
  // Prime a click at gate 0, then watch gate 1 and (when gate 1 stays dark) gate 2.
  const std::size_t n = 200'000;
  std::size_t first = 0, second = 0, second_trials = 0;
  for (std::size_t i = 0; i < n; ++i) {
    DetectorState s;
    s.last_click_gate = 0;
    if (detect(d, false, 1, s, rng).click) {
      ++first;
      continue;
    }
    ++second_trials;
    second += detect(d, false, 2, s, rng).click;
  }
  CHECK(within_3_sigma(static_cast<double>(first) / n, 0.3, n));
  CHECK(within_3_sigma(static_cast<double>(second) / second_trials, 0.15, second_trials));
}

TEST_CASE("timing jitter moments") {
  DetectorModel d = entangle::testing::ideal_detector();
  d.jitter_sigma_ps = 50.0;
  DetectorState s;
  Rng rng(13);
  const std::size_t n = 200'000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t g = 0; g < n; ++g) {
    const auto det = detect(d, true, g, s, rng);
    REQUIRE(det.click);
    sum += det.time_offset_ps;
    sq += det.time_offset_ps * det.time_offset_ps;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 3 * 50.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sd == doctest::Approx(50.0).epsilon(0.01));
}

TEST_CASE("detector streams are reproducible") {
  DetectorModel d;
  d.efficiency = 0.3;
  d.dark_count_prob_per_gate = 0.01;
  d.dead_time_ns = 300.0;
  d.afterpulse_prob = 0.05;
  d.jitter_sigma_ps = 20.0;
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    DetectorState s;
    std::vector<double> out;
    for (std::uint64_t g = 0; g < 10'000; ++g) {
      const auto det = detect(d, g % 2 == 0, g, s, rng);
      out.push_back(det.click ? det.time_offset_ps + 1e6 : 0.0);
    }
    return out;
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}
