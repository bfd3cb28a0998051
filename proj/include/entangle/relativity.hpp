#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace entangle::relativity {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

// Event on the Alice-Bob axis: t in seconds, x in meters.
struct SpacetimeEvent {
  double t = 0.0;
  double x = 0.0;
  std::string label;
};

// Inertial frame moving with velocity beta*c along the axis.
class InertialFrame {
 public:
  // Throws std::invalid_argument unless |beta| < 1.
  explicit InertialFrame(double beta, std::string name = {});

  double beta() const { return beta_; }
  double gamma() const;
  const std::string& name() const { return name_; }

 private:
  double beta_;
  std::string name_;
};

// Candidate preferred frame: speed in m/s and the cosine of the angle between
// its velocity and the Alice-Bob axis.
struct FrameSpec {
  double speed = 0.0;
  double cos_theta = 0.0;
};

// delta_t: timing alignment (s); separation: straight-line distance (m);
// fiber_length: optical path (m).
struct AlignmentBudget {
  double delta_t = 5e-12;
  double separation = 1e4;
  double fiber_length = 1.9e4;
};

double lorentz_factor(double beta);

// Throws std::invalid_argument for non-finite coordinates.
SpacetimeEvent lorentz_transform(const SpacetimeEvent& e, const InertialFrame& f);

// c^2 dt^2 - dx^2 between two events (m^2).
double interval(const SpacetimeEvent& a, const SpacetimeEvent& b);

// gamma (delta_t + speed cos_theta separation / c^2). Throws
// std::invalid_argument unless 0 <= speed < c and |cos_theta| <= 1.
double frame_delta_t(const AlignmentBudget& budget, const FrameSpec& frame);

// Lower bound on the speed of the nonlocal influence, in units of c.
// Throws std::invalid_argument unless both arguments are positive.
double spooky_speed_bound(double separation, double delta_t_in_frame);

struct FrameAngleInversion {
  double theta = 0.0;  // radians in [0, pi/2]
  double cos_theta = 0.0;
  double bound = 0.0;  // spooky_speed_bound at that angle
  std::size_t evaluations = 0;
};

// Brute-force scan of theta over [0, pi/2] for the frame orientation whose
// bound is closest (relative error) to target_bound.
FrameAngleInversion invert_frame_angle(const AlignmentBudget& budget, double speed,
                                       double target_bound, std::size_t steps = 1'000'000);

// delta_t over the fiber propagation time. Throws std::invalid_argument
// unless fiber_length > 0 and group_index >= 1.
double alignment_precision(const AlignmentBudget& budget, double group_index);

// c^2 delta_t / separation in m/s.
double before_before_threshold(double delta_t, double separation);

// Explicit two-frame check. In the lab (Alice's rest frame) Alice measures at
// (0, 0) and Bob at (delta_t, separation): the worst case allowed by the
// alignment. Bob's analyzer moves along the axis with speed v_rel |cos_phi|.
struct BeforeBeforeConstruction {
  SpacetimeEvent alice;
  SpacetimeEvent bob;
  double gap_in_alice_frame = 0.0;  // t_bob - t_alice
  double gap_in_bob_frame = 0.0;    // t_bob - t_alice after the boost
  bool alice_first_in_own_frame = false;
  bool bob_first_in_own_frame = false;

  bool before_before() const { return alice_first_in_own_frame && bob_first_in_own_frame; }
};

BeforeBeforeConstruction before_before_construction(double v_rel, double cos_phi, double delta_t,
                                                    double separation);

// v_rel |cos_phi| > c^2 delta_t / separation. When the margin is not within
// rounding of the threshold the result is cross-checked against
// before_before_construction (std::logic_error on disagreement).
bool before_before_satisfied(double v_rel, double cos_phi, double delta_t, double separation);

struct AngleInterval {
  double begin = 0.0;  // radians, half-open [begin, end)
  double end = 0.0;
};

struct AbsorberWindows {
  double threshold = 0.0;        // m/s
  double duty_fraction = 0.0;    // analytic 2 acos(threshold / v) / pi
  double swept_fraction = 0.0;   // fraction of sweep samples that satisfy the condition
  std::vector<AngleInterval> intervals;  // from the sweep, wheel phase in [0, 2pi)
};

// Sweeps the wheel phase in steps of angular_resolution (radians); the axial
// projection of the absorber velocity is tangential_speed cos(phase).
AbsorberWindows rotating_absorber_windows(double tangential_speed, double delta_t,
                                          double separation, double angular_resolution);

}  // namespace entangle::relativity
