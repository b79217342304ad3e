#pragma once

// Servo-rate dual-wing oscillator.  Each wing runs the discrete update
//
//   r_target = 1 / (0.5 + A*cos(omega))
//   r_smooth <- alpha*r_target + (1-alpha)*r_smooth
//   omega    <- omega + (pi*f/f_servo) * r_smooth
//   y        =  zeta*sin(omega) + delta
//
// The IIR filter acts on the reciprocal variable so the phase increment stays
// linear in the filtered quantity.  Stroke-angle offsets are slew-limited
// before entering the output law.

#include <cstdint>

namespace flapkit::cpg {

struct WingbeatParams {
    double zeta = 35.0;  // stroke amplitude, deg
    double f = 10.0;     // flapping frequency, Hz
    double delta = 0.0;  // stroke angle offset, deg (positive = upward)
    double A = 0.0;      // stroke-timing asymmetry
};

// Commanded stroke never exceeds servo travel: |delta| + zeta <= mech_limit.
inline constexpr double kDefaultMechLimitDeg = 80.0;

// Offset commands are slew-limited so step changes cannot inject stroke
// discontinuities; deg/s.
inline constexpr double kDefaultDeltaSlewDegPerSec = 200.0;

// Throws AdmissibilityError / ValidationError on violated bounds.
void validate(const WingbeatParams& params, double mech_limit = kDefaultMechLimitDeg);

struct SmoothingConfig {
    double alpha = 0.12566370614359174;  // IIR weight in (0,1)
    double f_servo = 100.0;              // update rate, Hz
    double f_c = 2.0;                    // effective cutoff, Hz

    // alpha = 2*pi*f_c/f_servo, clamped to (0,1).  Rejects f_c <= 0 and
    // f_c >= f_servo/2 (aliasing).  The flapping frequency, when supplied,
    // enforces the cutoff-below-flapping rule f_c < f.
    static SmoothingConfig from_cutoff(double f_c, double f_servo, double f = 0.0);

    // Calibrated path: set alpha directly.  f_c is recorded as the equivalent
    // first-order cutoff alpha*f_servo/(2*pi) for reporting only.
    static SmoothingConfig direct(double alpha, double f_servo);
};

// The bare conversion rule used by SmoothingConfig::from_cutoff.
double alpha_from_cutoff(double f_c, double f_servo);

struct OscState {
    double omega = 0.0;          // unwrapped phase, rad
    double r_smooth = 2.0;       // smoothed reciprocal of the modulation factor
    double y = 0.0;              // last stroke angle, deg
    double delta_applied = 0.0;  // slew-limited offset actually in effect, deg

    // r_smooth is seeded to the exact 1/p of the initial parameters so the
    // first tick has no filter transient.
    static OscState seeded(const WingbeatParams& params, double omega0 = 0.0);
};

struct StepResult {
    double y = 0.0;            // stroke angle, deg
    double delta_omega = 0.0;  // phase increment this tick, rad
};

StepResult cpg_step(OscState& state, const WingbeatParams& params,
                    const SmoothingConfig& cfg,
                    double delta_slew_deg_s = kDefaultDeltaSlewDegPerSec);

// Symmetric/antisymmetric channel composition for the two wings:
//   delta_L = delta_sym + delta_anti     delta_R = delta_sym - delta_anti
//   A_L     = A_sym + A_anti             A_R     = A_sym - A_anti
struct DualWingCommand {
    double delta_sym = 0.0;   // deg
    double delta_anti = 0.0;  // deg
    double A_sym = 0.0;
    double A_anti = 0.0;
};

struct DualWingResult {
    double y_left = 0.0;    // deg
    double y_right = 0.0;   // deg
    double dw_left = 0.0;   // phase increment, rad
    double dw_right = 0.0;  // phase increment, rad
    bool saturated_left = false;
    bool saturated_right = false;
};

// Two oscillators on a shared tick counter.  Composed per-wing values are
// clamped to the admissible box; clamping is silent but flagged.
class DualWing {
public:
    DualWing(const WingbeatParams& base, const SmoothingConfig& cfg,
             double mech_limit = kDefaultMechLimitDeg,
             double delta_slew = kDefaultDeltaSlewDegPerSec);

    DualWingResult step(const DualWingCommand& cmd);

    const OscState& left() const { return left_; }
    const OscState& right() const { return right_; }
    const WingbeatParams& base() const { return base_; }
    const SmoothingConfig& smoothing() const { return cfg_; }
    std::uint64_t tick() const { return tick_; }

private:
    WingbeatParams base_;
    SmoothingConfig cfg_;
    double mech_limit_;
    double delta_slew_;
    OscState left_;
    OscState right_;
    std::uint64_t tick_ = 0;
};

struct ServoCalib {
    double center_us = 1500.0;
    double us_per_deg = 10.0;
    double min_us = 900.0;
    double max_us = 2100.0;
};

struct PwmResult {
    double pulse_us = 1500.0;
    bool saturated = false;
};

// pulse = center + y*us_per_deg, clamped to [min, max] with a saturation flag.
PwmResult servo_pwm(double y_deg, const ServoCalib& calib);

}  // namespace flapkit::cpg
