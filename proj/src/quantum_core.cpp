#include "entangle/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace entangle::quantum {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kUnitaryTolerance = 1e-10;

}  // namespace

PureTwoQubitState PureTwoQubitState::from_amplitudes(const std::array<Complex, 4>& amplitudes) {
  double total = 0.0;
  for (const auto& a : amplitudes) total += std::norm(a);
  if (!(std::abs(total - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("two-qubit state is not normalized: sum |a|^2 = " +
                                std::to_string(total));
  }
  return PureTwoQubitState(amplitudes);
}

double PureTwoQubitState::norm() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return std::sqrt(total);
}

Complex inner_product(const PureTwoQubitState& lhs, const PureTwoQubitState& rhs) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < 4; ++i) acc += std::conj(lhs[i]) * rhs[i];
  return acc;
}

double overlap(const PureTwoQubitState& lhs, const PureTwoQubitState& rhs) {
  return std::norm(inner_product(lhs, rhs));
}

double distance(const std::array<Complex, 4>& lhs, const std::array<Complex, 4>& rhs) {
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) total += std::norm(lhs[i] - rhs[i]);
  return std::sqrt(total);
}

double unitarity_defect(const std::array<Complex, 4>& m) {
  double worst = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      // (U U^dagger)_{rc} = sum_k U_{rk} conj(U_{ck})
      const Complex v = m[2 * r] * std::conj(m[2 * c]) + m[2 * r + 1] * std::conj(m[2 * c + 1]);
      const Complex target = (r == c) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
      worst = std::max(worst, std::abs(v - target));
    }
  }
  return worst;
}

Unitary2 Unitary2::from_entries(const std::array<Complex, 4>& entries) {
  for (const auto& e : entries) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
      throw std::invalid_argument("unitary has non-finite entries");
    }
  }
  const double defect = unitarity_defect(entries);
  if (!(defect <= kUnitaryTolerance)) {
    throw std::invalid_argument("matrix is not unitary: max |U U^dagger - 1| = " +
                                std::to_string(defect));
  }
  return Unitary2(entries);
}

Unitary2 Unitary2::identity() { return Unitary2({1.0, 0.0, 0.0, 1.0}); }
Unitary2 Unitary2::pauli_x() { return Unitary2({0.0, 1.0, 1.0, 0.0}); }
Unitary2 Unitary2::pauli_y() {
  return Unitary2({Complex{0.0, 0.0}, Complex{0.0, -1.0}, Complex{0.0, 1.0}, Complex{0.0, 0.0}});
}
Unitary2 Unitary2::pauli_z() { return Unitary2({1.0, 0.0, 0.0, -1.0}); }

Unitary2 Unitary2::haar_random(Rng& rng) {
  auto gaussian = [&rng] { return Complex{rng.normal(), rng.normal()} / std::sqrt(2.0); };
  // Columns of the Gaussian sample.
  std::array<Complex, 2> c0{gaussian(), gaussian()};
  std::array<Complex, 2> c1{gaussian(), gaussian()};

  const double r00 = std::sqrt(std::norm(c0[0]) + std::norm(c0[1]));
  c0[0] /= r00;
  c0[1] /= r00;
  const Complex proj = std::conj(c0[0]) * c1[0] + std::conj(c0[1]) * c1[1];
  c1[0] -= proj * c0[0];
  c1[1] -= proj * c0[1];
  const double r11 = std::sqrt(std::norm(c1[0]) + std::norm(c1[1]));
  c1[0] /= r11;
  c1[1] /= r11;
  // R has a positive real diagonal here, so Q is already Haar distributed.
  return Unitary2({c0[0], c1[0], c0[1], c1[1]});
}

Unitary2 Unitary2::transpose() const {
  return Unitary2({entries_[0], entries_[2], entries_[1], entries_[3]});
}

Unitary2 Unitary2::adjoint() const {
  return Unitary2({std::conj(entries_[0]), std::conj(entries_[2]), std::conj(entries_[1]),
                   std::conj(entries_[3])});
}

Unitary2 operator*(const Unitary2& lhs, const Unitary2& rhs) {
  std::array<Complex, 4> out{};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      out[2 * r + c] = lhs(r, 0) * rhs(0, c) + lhs(r, 1) * rhs(1, c);
    }
  }
  return Unitary2(out);
}

MeasurementSetting::MeasurementSetting(double angle) {
  if (!std::isfinite(angle)) throw std::invalid_argument("measurement angle must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle, two_pi);
  if (wrapped < 0.0) wrapped += two_pi;
  if (wrapped >= two_pi) wrapped = 0.0;
  angle_ = wrapped;
}

CorrelationModel::CorrelationModel(double visibility) : visibility_(visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(visibility));
  }
}

ChshSettings ChshSettings::canonical() {
  constexpr double pi = std::numbers::pi;
  return {MeasurementSetting(0.0), MeasurementSetting(pi / 2.0), MeasurementSetting(pi / 4.0),
          MeasurementSetting(3.0 * pi / 4.0)};
}

double JointProbabilities::operator()(int x, int y) const {
  if (x > 0) return y > 0 ? plus_plus : plus_minus;
  return y > 0 ? minus_plus : minus_minus;
}

PureTwoQubitState bell_phi_plus() {
  const double h = 1.0 / std::numbers::sqrt2;
  return PureTwoQubitState::from_amplitudes({h, 0.0, 0.0, h});
}

PureTwoQubitState apply_local_unitaries(const PureTwoQubitState& state, const Unitary2& u1,
                                        const Unitary2& u2) {
  std::array<Complex, 4> out{};
  // (u1 (x) u2)_{(i j),(k l)} = u1_{ik} u2_{jl}
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      Complex acc{0.0, 0.0};
      for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t l = 0; l < 2; ++l) acc += u1(i, k) * u2(j, l) * state[2 * k + l];
      }
      out[2 * i + j] = acc;
    }
  }
  // Unitaries preserve the norm; re-validating guards against drift in the inputs.
  return PureTwoQubitState::from_amplitudes(out);
}

double transpose_identity_residual(const Unitary2& u1, const Unitary2& u2) {
  const auto phi = bell_phi_plus();
  const auto lhs = apply_local_unitaries(phi, u1, u2);
  const auto rhs = apply_local_unitaries(phi, Unitary2::identity(), u2 * u1.transpose());
  return distance(lhs.amplitudes(), rhs.amplitudes());
}

JointProbabilities joint_probabilities(const CorrelationModel& model, const MeasurementSetting& a,
                                       const MeasurementSetting& b) {
  const double e = model.visibility() * std::cos(a.angle() - b.angle());
  const double same = (1.0 + e) / 4.0;
  const double diff = (1.0 - e) / 4.0;
  return {same, diff, diff, same};
}

double correlation(const CorrelationModel& model, const MeasurementSetting& a,
                   const MeasurementSetting& b) {
  return model.visibility() * std::cos(a.angle() - b.angle());
}

double chsh_value(const CorrelationModel& model, const ChshSettings& s) {
  return correlation(model, s.a, s.b) - correlation(model, s.a, s.b_prime) +
         correlation(model, s.a_prime, s.b) + correlation(model, s.a_prime, s.b_prime);
}

double qber_from_visibility(double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(visibility));
  }
  return (1.0 - visibility) / 2.0;
}

double visibility_from_qber(double qber) {
  if (!(qber >= 0.0 && qber <= 0.5)) {
    throw std::invalid_argument("QBER must lie in [0, 0.5], got " + std::to_string(qber));
  }
  return 1.0 - 2.0 * qber;
}

}  // namespace entangle::quantum
