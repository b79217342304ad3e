#pragma once

// Stroke Timing Asymmetry Rhythm (STAR): a single-parameter phase-domain
// rhythm generator.  The phase omega advances at speed pi*f / p(omega) with
// p(omega) = 0.5 + A*cos(omega), |A| < 0.5.  Skewing p reshapes the
// downstroke/upstroke split while the cycle-averaged frequency stays exactly
// f for any constant admissible A.
//
// Conventions: phase origin at mid-downstroke; the downstroke occupies
// omega in [-pi/2, pi/2] and the upstroke [pi/2, 3*pi/2].

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace flapkit::star {

// Hard admissibility clamp.  The dynamics require |A| < 0.5 strictly; the
// margin keeps p(omega) >= 0.01 away from the singularity.
inline constexpr double kMaxAsymmetry = 0.49;

// Downstroke phase window [start, end); upstroke is the complement.
inline constexpr double kDownstrokeStart = -1.5707963267948966;
inline constexpr double kDownstrokeEnd = 1.5707963267948966;

enum class Variant {
    Cosine,  // p = 0.5 + A*cos(omega); production choice
    Sine,    // p = 0.5 + A*sin(omega); kept for the residual comparison
};

struct StarParams {
    double f = 10.0;                    // flapping frequency, Hz
    double A = 0.0;                     // stroke-timing asymmetry
    Variant variant = Variant::Cosine;
    bool extended = false;              // drift-compensated numerator
};

// Throws AdmissibilityError on f <= 0 or |A| > kMaxAsymmetry.
void validate(const StarParams& params);

struct PhaseState {
    double omega = 0.0;  // unwrapped phase, rad
    double t = 0.0;      // time, s
};

// Modulation factor p(omega).  Throws AdmissibilityError when |A| > kMaxAsymmetry.
double modulation_fn(double A, double omega, Variant variant = Variant::Cosine);

// Instantaneous phase speed, rad/s.
//
// Standard form: pi*f / p(omega).  Extended form compensates modulation
// transients: (pi*f - A_dot*sin(omega)) / p for the cosine variant and the
// mirrored (pi*f + A_dot*cos(omega)) / p for the sine variant.  A
// non-positive extended numerator is rejected (ModulationRateError) instead
// of clamped: a clamped rate would break the drift-cancellation identity.
double phase_rate(const StarParams& params, double omega, double A_dot = 0.0);

// Time-indexed asymmetry command: value and rate at time t.
struct AsymmetrySample {
    double A = 0.0;
    double A_dot = 0.0;
};
using AsymmetryProfile = std::function<AsymmetrySample(double)>;

// Trapezoidal A-pulse: zero before t_start, linear ramp to peak over `ramp`
// seconds, hold for `hold` seconds, ramp back to zero.
struct TrapezoidPulse {
    double peak = 0.3;
    double t_start = 0.0;
    double ramp = 0.1;
    double hold = 0.3;

    AsymmetrySample operator()(double t) const;
};

// Fixed-step RK4 advance of the phase through `steps` steps of size dt.
// The profile supplies A(t) and dA/dt; an inadmissible A encountered along
// the way raises AdmissibilityError naming the offending time.
PhaseState integrate_phase(PhaseState state, const StarParams& params,
                           const AsymmetryProfile& profile, double dt,
                           std::size_t steps);

// Constant-A convenience overload.
PhaseState integrate_phase(PhaseState state, const StarParams& params,
                           double dt, std::size_t steps);

struct HalfStrokeDurations {
    double down = 0.0;  // s
    double up = 0.0;    // s
};

// Closed form: T_down = 1/(2f) + 2A/(pi f), T_up = 1/(2f) - 2A/(pi f).
// The pair sums to 1/f exactly.
HalfStrokeDurations half_stroke_durations(double f, double A);

struct PhaseSpeedBounds {
    double min = 0.0;  // rad/s
    double max = 0.0;  // rad/s
};

// pi*f/(0.5+|A|) <= omega_dot <= pi*f/(0.5-|A|) along any constant-A trajectory.
PhaseSpeedBounds phase_speed_bounds(double f, double A);

struct ResidualResult {
    double delta_final = 0.0;                      // omega_L - omega_R after the pulse
    std::vector<std::pair<double, double>> trace;  // (t, delta) diagnostic samples
};

// Integrates two phases from omega = 0 with the pulse applied antisymmetrically
// (A_L = +A(t), A_R = -A(t)) and returns the residual phase difference once the
// pulse has returned to zero.  `duration` must cover the pulse.
ResidualResult phase_difference_residual(const AsymmetryProfile& pulse, double f,
                                         Variant variant, bool extended, double dt,
                                         double duration, bool keep_trace = false);

}  // namespace flapkit::star
