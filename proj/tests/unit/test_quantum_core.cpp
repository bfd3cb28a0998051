#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "entangle/quantum_core.hpp"
#include "entangle/random.hpp"

using namespace entangle;
using namespace entangle::quantum;

namespace {

using Mat4 = std::array<std::array<Complex, 4>, 4>;
using Vec4 = std::array<Complex, 4>;

// Independent Kronecker product: rows/cols indexed (i j) -> 2i + j.
Mat4 kron(const Unitary2& a, const Unitary2& b) {
  Mat4 m{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m[2 * i + j][2 * k + l] = a(i, k) * b(j, l);
  return m;
}

Vec4 mul(const Mat4& m, const Vec4& v) {
  Vec4 out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r] += m[r][c] * v[c];
  return out;
}

// Eigenvector of the analyzer at Bloch angle theta on the x-z circle.
std::array<Complex, 2> analyzer(double theta, int outcome) {
  if (outcome > 0) return {std::cos(theta / 2), std::sin(theta / 2)};
  return {-std::sin(theta / 2), std::cos(theta / 2)};
}

// Born rule |<a_x (x) b_y | psi>|^2 using the state's amplitudes.
double born(const PureTwoQubitState& psi, double a, double b, int x, int y) {
  const auto ea = analyzer(a, x);
  const auto eb = analyzer(b, y);
  Complex amp{0.0, 0.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) amp += std::conj(ea[i] * eb[j]) * psi[2 * i + j];
  return std::norm(amp);
}

const double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("bell_phi_plus") {
  const auto phi = bell_phi_plus();
  CHECK(phi[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(phi[1]) == 0.0);
  CHECK(std::abs(phi[2]) == 0.0);
  CHECK(phi[3].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(phi.norm() - 1.0) < 1e-15);
  CHECK(std::abs(overlap(phi, phi) - 1.0) < 1e-15);
}

TEST_CASE("states must be normalized") {
  CHECK_THROWS_AS(PureTwoQubitState::from_amplitudes({1.0, 1.0, 0.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(PureTwoQubitState::from_amplitudes({0.0, 1.0, 0.0, 0.0}));
}

TEST_CASE("apply_local_unitaries") {
  const auto phi = bell_phi_plus();

  SUBCASE("identity leaves the state alone") {
    const auto out = apply_local_unitaries(phi, Unitary2::identity(), Unitary2::identity());
    CHECK(distance(out.amplitudes(), phi.amplitudes()) < 1e-15);
  }

  SUBCASE("sigma_x (x) sigma_x fixes Phi+ (4x4 oracle)") {
    const auto sx = Unitary2::pauli_x();
    const auto out = apply_local_unitaries(phi, sx, sx);
    const Vec4 oracle = mul(kron(sx, sx), phi.amplitudes());
    CHECK(distance(out.amplitudes(), oracle) < 1e-15);
    CHECK(distance(out.amplitudes(), phi.amplitudes()) < 1e-15);
  }

  SUBCASE("random unitaries agree with the Kronecker oracle and keep the norm") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      const auto u1 = Unitary2::haar_random(rng);
      const auto u2 = Unitary2::haar_random(rng);
      const auto out = apply_local_unitaries(phi, u1, u2);
      CHECK(std::abs(out.norm() - 1.0) < 1e-12);
      CHECK(distance(out.amplitudes(), mul(kron(u1, u2), phi.amplitudes())) < 1e-13);
    }
  }
}

TEST_CASE("non-unitary matrices are rejected") {
  CHECK_THROWS_AS(Unitary2::from_entries({1.0, 1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Unitary2::from_entries({2.0, 0.0, 0.0, 0.5}), std::invalid_argument);
  CHECK_NOTHROW(Unitary2::from_entries({0.0, Complex{0.0, 1.0}, Complex{0.0, 1.0}, 0.0}));
}

TEST_CASE("haar_random produces unitaries") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(unitarity_defect(Unitary2::haar_random(rng).entries()) < 1e-12);
  }
}

TEST_CASE("transpose identity") {
  CHECK(transpose_identity_residual(Unitary2::identity(), Unitary2::identity()) == 0.0);
  CHECK(transpose_identity_residual(Unitary2::pauli_z(), Unitary2::identity()) <= 1e-12);
  CHECK(transpose_identity_residual(Unitary2::pauli_y(), Unitary2::pauli_x()) <= 1e-12);

  Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto u1 = Unitary2::haar_random(rng);
    const auto u2 = Unitary2::haar_random(rng);
    worst = std::max(worst, transpose_identity_residual(u1, u2));
    // Independent route: both sides via explicit 4x4 matrices.
    const Vec4 lhs = mul(kron(u1, u2), bell_phi_plus().amplitudes());
    const Vec4 rhs = mul(kron(Unitary2::identity(), u2 * u1.transpose()), bell_phi_plus().amplitudes());
    CHECK(distance(lhs, rhs) <= 1e-10);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("measurement settings canonicalize to [0, 2pi)") {
  CHECK(MeasurementSetting(-kPi / 2).angle() == doctest::Approx(3 * kPi / 2));
  CHECK(MeasurementSetting(5 * kPi).angle() == doctest::Approx(kPi));
  CHECK(MeasurementSetting(2 * kPi).angle() == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)MeasurementSetting(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS((void)MeasurementSetting(HUGE_VAL), std::invalid_argument);
}

TEST_CASE("correlation model bounds") {
  CHECK_THROWS_AS((void)CorrelationModel(1.2), std::invalid_argument);
  CHECK_THROWS_AS((void)CorrelationModel(-0.1), std::invalid_argument);
}

TEST_CASE("joint_probabilities") {
  const MeasurementSetting zero(0.0);

  const auto perfect = joint_probabilities(CorrelationModel(1.0), zero, zero);
  CHECK(perfect(+1, +1) == doctest::Approx(0.5));
  CHECK(perfect(-1, -1) == doctest::Approx(0.5));
  CHECK(perfect(+1, -1) == 0.0);
  CHECK(perfect(-1, +1) == 0.0);

  const auto flat = joint_probabilities(CorrelationModel(0.0), MeasurementSetting(0.3), MeasurementSetting(2.0));
  for (int x : {+1, -1})
    for (int y : {+1, -1}) CHECK(flat(x, y) == doctest::Approx(0.25));

  const auto tilted = joint_probabilities(CorrelationModel(1.0), zero, MeasurementSetting(kPi / 4));
  CHECK(tilted(+1, +1) == doctest::Approx((1 + std::sqrt(2.0) / 2) / 4).epsilon(1e-14));
  CHECK(std::abs(tilted(+1, +1) - born(bell_phi_plus(), 0.0, kPi / 4, +1, +1)) < 1e-12);
}

TEST_CASE("joint_probabilities normalization over random draws") {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const CorrelationModel m(rng.uniform());
    const auto p = joint_probabilities(m, MeasurementSetting(10 * rng.uniform()), MeasurementSetting(-10 * rng.uniform()));
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    CHECK(p.plus_plus >= 0.0);
    CHECK(p.plus_minus >= 0.0);
    CHECK(p.minus_plus >= 0.0);
    CHECK(p.minus_minus >= 0.0);
  }
}

TEST_CASE("Born rule on Phi+ matches the visibility-1 distribution") {
  Rng rng(3);
  const auto phi = bell_phi_plus();
  for (int i = 0; i < 1000; ++i) {
    const double a = 2 * kPi * rng.uniform();
    const double b = 2 * kPi * rng.uniform();
    const auto p = joint_probabilities(CorrelationModel(1.0), MeasurementSetting(a), MeasurementSetting(b));
    for (int x : {+1, -1})
      for (int y : {+1, -1}) CHECK(std::abs(p(x, y) - born(phi, a, b, x, y)) <= 1e-12);
  }
}

TEST_CASE("correlation") {
  const MeasurementSetting a(0.7);
  CHECK(correlation(CorrelationModel(1.0), a, a) == doctest::Approx(1.0));
  CHECK(std::abs(correlation(CorrelationModel(0.9), MeasurementSetting(0.0), MeasurementSetting(kPi / 2))) < 1e-15);

  const CorrelationModel m(1.0);
  const MeasurementSetting x(0.0), y(kPi / 4);
  const auto p = joint_probabilities(m, x, y);
  const double from_probs = p(1, 1) - p(1, -1) - p(-1, 1) + p(-1, -1);
  CHECK(correlation(m, x, y) == doctest::Approx(from_probs).epsilon(1e-14));
  CHECK(correlation(m, x, y) == doctest::Approx(0.7071067811865476).epsilon(1e-14));
}

TEST_CASE("chsh_value") {
  const auto s = ChshSettings::canonical();
  CHECK(std::abs(chsh_value(CorrelationModel(1.0), s) - 2 * std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(chsh_value(CorrelationModel(1.0 / std::sqrt(2.0)), s) - 2.0) <= 1e-12);
  CHECK(chsh_value(CorrelationModel(0.0), s) == 0.0);

  // Four-term oracle straight from the joint distribution.
  auto e = [](double v, double a, double b) {
    const auto p = joint_probabilities(CorrelationModel(v), MeasurementSetting(a), MeasurementSetting(b));
    return p(1, 1) - p(1, -1) - p(-1, 1) + p(-1, -1);
  };
  const double oracle = e(1, 0, kPi / 4) - e(1, 0, 3 * kPi / 4) + e(1, kPi / 2, kPi / 4) + e(1, kPi / 2, 3 * kPi / 4);
  CHECK(std::abs(oracle - chsh_value(CorrelationModel(1.0), s)) < 1e-14);
}

TEST_CASE("CHSH never exceeds 2 sqrt2 V") {
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform();
    const ChshSettings s{MeasurementSetting(7 * rng.uniform()), MeasurementSetting(7 * rng.uniform()),
                         MeasurementSetting(7 * rng.uniform()), MeasurementSetting(7 * rng.uniform())};
    REQUIRE(std::abs(chsh_value(CorrelationModel(v), s)) <= 2 * std::sqrt(2.0) * v + 1e-12);
  }
}

TEST_CASE("QBER and visibility") {
  CHECK(qber_from_visibility(1.0) == 0.0);
  CHECK(qber_from_visibility(1.0 / std::sqrt(2.0)) == doctest::Approx(0.14644660940672624).epsilon(1e-14));
  CHECK(qber_from_visibility(0.95) == doctest::Approx(0.025).epsilon(1e-14));
  CHECK_THROWS_AS(qber_from_visibility(1.01), std::invalid_argument);
  CHECK_THROWS_AS(qber_from_visibility(-0.01), std::invalid_argument);

  CHECK(visibility_from_qber(0.0) == 1.0);
  CHECK(visibility_from_qber(0.14644660940672624) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(visibility_from_qber(0.51), std::invalid_argument);
  CHECK_THROWS_AS(visibility_from_qber(-1e-9), std::invalid_argument);

  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const double d = 0.5 * rng.uniform();
    CHECK(std::abs(qber_from_visibility(visibility_from_qber(d)) - d) <= 1e-15);
  }
}

TEST_CASE("threshold coincidence") {
  const double d = 0.5 * (1.0 - 1.0 / std::sqrt(2.0));
  const double v = visibility_from_qber(d);
  CHECK(std::abs(v - 1.0 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(chsh_value(CorrelationModel(v), ChshSettings::canonical()) - 2.0) <= 1e-10);
}
