#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include "entangle/random.hpp"

namespace entangle::quantum {

using Complex = std::complex<double>;

// Pure state of two qubits, amplitudes indexed |00>, |01>, |10>, |11>
// (first qubit is the most significant index bit).
class PureTwoQubitState {
 public:
  // Throws std::invalid_argument unless the squared moduli sum to 1 within 1e-12.
  static PureTwoQubitState from_amplitudes(const std::array<Complex, 4>& amplitudes);

  const Complex& operator[](std::size_t index) const { return amplitudes_[index]; }
  const std::array<Complex, 4>& amplitudes() const { return amplitudes_; }
  double norm() const;

 private:
  explicit PureTwoQubitState(const std::array<Complex, 4>& amplitudes) : amplitudes_(amplitudes) {}
  std::array<Complex, 4> amplitudes_;
};

// <lhs|rhs>
Complex inner_product(const PureTwoQubitState& lhs, const PureTwoQubitState& rhs);

// |<lhs|rhs>|^2
double overlap(const PureTwoQubitState& lhs, const PureTwoQubitState& rhs);

// Euclidean distance between amplitude vectors.
double distance(const std::array<Complex, 4>& lhs, const std::array<Complex, 4>& rhs);

// 2x2 unitary, row-major.
class Unitary2 {
 public:
  // Throws std::invalid_argument unless U U^dagger = 1 within 1e-10 entrywise.
  static Unitary2 from_entries(const std::array<Complex, 4>& entries);

  static Unitary2 identity();
  static Unitary2 pauli_x();
  static Unitary2 pauli_y();
  static Unitary2 pauli_z();

  // Haar-distributed unitary: QR (Gram-Schmidt) of a complex Gaussian matrix
  // with the phase of each column fixed by the diagonal of R.
  static Unitary2 haar_random(Rng& rng);

  const Complex& operator()(std::size_t row, std::size_t col) const { return entries_[2 * row + col]; }
  const std::array<Complex, 4>& entries() const { return entries_; }

  Unitary2 transpose() const;
  Unitary2 adjoint() const;
  friend Unitary2 operator*(const Unitary2& lhs, const Unitary2& rhs);

 private:
  explicit Unitary2(const std::array<Complex, 4>& entries) : entries_(entries) {}
  std::array<Complex, 4> entries_;
};

// Largest entrywise deviation of U U^dagger from the identity.
double unitarity_defect(const std::array<Complex, 4>& entries);

// Analyzer direction on the x-z great circle of the Bloch sphere, in radians,
// canonicalized to [0, 2pi).
class MeasurementSetting {
 public:
  // Throws std::invalid_argument for non-finite angles.
  explicit MeasurementSetting(double angle);
  double angle() const { return angle_; }

 private:
  double angle_;
};

// Isotropic-noise correlation model with a single two-photon visibility.
class CorrelationModel {
 public:
  // Throws std::invalid_argument unless 0 <= visibility <= 1.
  explicit CorrelationModel(double visibility);
  double visibility() const { return visibility_; }

 private:
  double visibility_;
};

struct ChshSettings {
  MeasurementSetting a;
  MeasurementSetting a_prime;
  MeasurementSetting b;
  MeasurementSetting b_prime;

  // a = 0, a' = pi/2, b = pi/4, b' = 3pi/4: the settings of maximal violation.
  static ChshSettings canonical();
};

// Outcome probabilities P(x, y) for x, y in {+1, -1}.
struct JointProbabilities {
  double plus_plus;
  double plus_minus;
  double minus_plus;
  double minus_minus;

  double operator()(int x, int y) const;
  double sum() const { return plus_plus + plus_minus + minus_plus + minus_minus; }
};

PureTwoQubitState bell_phi_plus();

// (u1 (x) u2) |state>
PureTwoQubitState apply_local_unitaries(const PureTwoQubitState& state, const Unitary2& u1,
                                        const Unitary2& u2);

// || (u1 (x) u2)|Phi+> - (1 (x) u2 u1^T)|Phi+> ||
double transpose_identity_residual(const Unitary2& u1, const Unitary2& u2);

JointProbabilities joint_probabilities(const CorrelationModel& model, const MeasurementSetting& a,
                                       const MeasurementSetting& b);

double correlation(const CorrelationModel& model, const MeasurementSetting& a,
                   const MeasurementSetting& b);

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b')
double chsh_value(const CorrelationModel& model, const ChshSettings& settings);

// QBER = (1 - V) / 2. Throws std::invalid_argument outside [0, 1].
double qber_from_visibility(double visibility);

// V = 1 - 2 QBER. Throws std::invalid_argument outside [0, 0.5].
double visibility_from_qber(double qber);

}  // namespace entangle::quantum
