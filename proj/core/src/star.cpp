#include "flapkit/star.hpp"

#include <cmath>
#include <sstream>

#include "flapkit/error.hpp"

namespace flapkit::star {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_asymmetry(double A) {
    if (!(std::abs(A) <= kMaxAsymmetry)) {
        std::ostringstream os;
        os << "asymmetry A = " << A << " outside admissible range |A| <= "
           << kMaxAsymmetry;
        throw AdmissibilityError(os.str());
    }
}

}  // namespace

void validate(const StarParams& params) {
    if (!(params.f > 0.0)) {
        std::ostringstream os;
        os << "flapping frequency f = " << params.f << " must be positive";
        throw AdmissibilityError(os.str());
    }
    check_asymmetry(params.A);
}

double modulation_fn(double A, double omega, Variant variant) {
    check_asymmetry(A);
    const double trig =
        variant == Variant::Cosine ? std::cos(omega) : std::sin(omega);
    return 0.5 + A * trig;
}

double phase_rate(const StarParams& params, double omega, double A_dot) {
    validate(params);
    const double p = modulation_fn(params.A, omega, params.variant);
    double numerator = kPi * params.f;
    if (params.extended) {
        numerator += params.variant == Variant::Cosine
                         ? -A_dot * std::sin(omega)
                         : A_dot * std::cos(omega);
        if (!(numerator > 0.0)) {
            std::ostringstream os;
            os << "extended phase dynamics rejected: numerator " << numerator
               << " <= 0 at omega = " << omega << " (A_dot = " << A_dot
               << " modulates faster than pi*f)";
            throw ModulationRateError(os.str());
        }
    }
    return numerator / p;
}

AsymmetrySample TrapezoidPulse::operator()(double t) const {
    if (t < t_start) return {0.0, 0.0};
    const double u = t - t_start;
    if (u < ramp) return {peak * u / ramp, peak / ramp};
    if (u < ramp + hold) return {peak, 0.0};
    if (u < 2.0 * ramp + hold)
        return {peak * (1.0 - (u - ramp - hold) / ramp), -peak / ramp};
    return {0.0, 0.0};
}

namespace {

// RK4 stage evaluation with per-time admissibility checking.
double stage_rate(const StarParams& base, const AsymmetryProfile& profile,
                  double t, double omega) {
    const AsymmetrySample a = profile(t);
    if (!(std::abs(a.A) <= kMaxAsymmetry)) {
        std::ostringstream os;
        os << "inadmissible asymmetry A = " << a.A << " at t = " << t;
        throw AdmissibilityError(os.str());
    }
    StarParams p = base;
    p.A = a.A;
    return phase_rate(p, omega, a.A_dot);
}

}  // namespace

PhaseState integrate_phase(PhaseState state, const StarParams& params,
                           const AsymmetryProfile& profile, double dt,
                           std::size_t steps) {
    if (!(dt > 0.0)) throw AdmissibilityError("integration step dt must be positive");
    validate(params);
    double omega = state.omega;
    double t = state.t;
    for (std::size_t i = 0; i < steps; ++i) {
        const double k1 = stage_rate(params, profile, t, omega);
        const double k2 = stage_rate(params, profile, t + 0.5 * dt, omega + 0.5 * dt * k1);
        const double k3 = stage_rate(params, profile, t + 0.5 * dt, omega + 0.5 * dt * k2);
        const double k4 = stage_rate(params, profile, t + dt, omega + dt * k3);
        omega += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
    }
    return {omega, t};
}

PhaseState integrate_phase(PhaseState state, const StarParams& params,
                           double dt, std::size_t steps) {
    const double A = params.A;
    return integrate_phase(
        state, params, [A](double) { return AsymmetrySample{A, 0.0}; }, dt, steps);
}

HalfStrokeDurations half_stroke_durations(double f, double A) {
    StarParams p;
    p.f = f;
    p.A = A;
    validate(p);
    const double half = 0.5 / f;
    const double skew = 2.0 * A / (kPi * f);
    return {half + skew, half - skew};
}

PhaseSpeedBounds phase_speed_bounds(double f, double A) {
    StarParams p;
    p.f = f;
    p.A = A;
    validate(p);
    const double a = std::abs(A);
    return {kPi * f / (0.5 + a), kPi * f / (0.5 - a)};
}

ResidualResult phase_difference_residual(const AsymmetryProfile& pulse, double f,
                                         Variant variant, bool extended, double dt,
                                         double duration, bool keep_trace) {
    StarParams left;
    left.f = f;
    left.variant = variant;
    left.extended = extended;
    StarParams right = left;

    const AsymmetryProfile right_pulse = [&pulse](double t) {
        AsymmetrySample s = pulse(t);
        return AsymmetrySample{-s.A, -s.A_dot};
    };

    ResidualResult result;
    PhaseState sl{0.0, 0.0};
    PhaseState sr{0.0, 0.0};
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    const std::size_t trace_stride =
        keep_trace ? std::max<std::size_t>(1, steps / 2000) : steps + 1;
    for (std::size_t i = 0; i < steps; ++i) {
        sl = integrate_phase(sl, left, pulse, dt, 1);
        sr = integrate_phase(sr, right, right_pulse, dt, 1);
        if (keep_trace && i % trace_stride == 0)
            result.trace.emplace_back(sl.t, sl.omega - sr.omega);
    }
    result.delta_final = sl.omega - sr.omega;
    if (keep_trace) result.trace.emplace_back(sl.t, result.delta_final);
    return result;
}

}  // namespace flapkit::star
