#include "flapkit/cpg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flapkit/error.hpp"
#include "flapkit/star.hpp"

namespace flapkit::cpg {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void validate(const WingbeatParams& params, double mech_limit) {
    if (!(params.zeta > 0.0))
        throw AdmissibilityError("stroke amplitude zeta must be positive");
    if (!(params.f > 0.0))
        throw AdmissibilityError("flapping frequency f must be positive");
    if (!(std::abs(params.A) <= star::kMaxAsymmetry)) {
        std::ostringstream os;
        os << "asymmetry A = " << params.A << " outside |A| <= " << star::kMaxAsymmetry;
        throw AdmissibilityError(os.str());
    }
    if (std::abs(params.delta) + params.zeta > mech_limit) {
        std::ostringstream os;
        os << "|delta| + zeta = " << std::abs(params.delta) + params.zeta
           << " deg exceeds mechanical limit " << mech_limit << " deg";
        throw ValidationError(os.str());
    }
}

double alpha_from_cutoff(double f_c, double f_servo) {
    if (!(f_c > 0.0))
        throw ValidationError("IIR cutoff f_c must be positive (alpha must be > 0)");
    if (!(f_servo > 0.0)) throw ValidationError("servo rate f_servo must be positive");
    if (f_c >= 0.5 * f_servo) {
        std::ostringstream os;
        os << "cutoff f_c = " << f_c << " Hz aliases at servo rate " << f_servo << " Hz";
        throw ValidationError(os.str());
    }
    const double alpha = 2.0 * kPi * f_c / f_servo;
    return std::clamp(alpha, 1e-12, 1.0 - 1e-12);
}

SmoothingConfig SmoothingConfig::from_cutoff(double f_c, double f_servo, double f) {
    if (f > 0.0 && !(f_c < f)) {
        std::ostringstream os;
        os << "IIR cutoff f_c = " << f_c << " Hz must stay below the flapping frequency "
           << f << " Hz";
        throw ValidationError(os.str());
    }
    SmoothingConfig cfg;
    cfg.alpha = alpha_from_cutoff(f_c, f_servo);
    cfg.f_servo = f_servo;
    cfg.f_c = f_c;
    return cfg;
}

SmoothingConfig SmoothingConfig::direct(double alpha, double f_servo) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("IIR weight alpha must lie in (0,1)");
    if (!(f_servo > 0.0)) throw ValidationError("servo rate f_servo must be positive");
    SmoothingConfig cfg;
    cfg.alpha = alpha;
    cfg.f_servo = f_servo;
    cfg.f_c = alpha * f_servo / (2.0 * kPi);
    return cfg;
}

OscState OscState::seeded(const WingbeatParams& params, double omega0) {
    validate(params);
    OscState s;
    s.omega = omega0;
    s.r_smooth = 1.0 / (0.5 + params.A * std::cos(omega0));
    s.y = params.zeta * std::sin(omega0) + params.delta;
    s.delta_applied = params.delta;
    return s;
}

StepResult cpg_step(OscState& state, const WingbeatParams& params,
                    const SmoothingConfig& cfg, double delta_slew_deg_s) {
    validate(params);  // before any state mutation

    const double max_delta_step = delta_slew_deg_s / cfg.f_servo;
    state.delta_applied +=
        std::clamp(params.delta - state.delta_applied, -max_delta_step, max_delta_step);

    const double r_target = 1.0 / (0.5 + params.A * std::cos(state.omega));
    state.r_smooth = cfg.alpha * r_target + (1.0 - cfg.alpha) * state.r_smooth;
    const double delta_omega = kPi * params.f / cfg.f_servo * state.r_smooth;
    state.omega += delta_omega;
    state.y = params.zeta * std::sin(state.omega) + state.delta_applied;
    return {state.y, delta_omega};
}

DualWing::DualWing(const WingbeatParams& base, const SmoothingConfig& cfg,
                   double mech_limit, double delta_slew)
    : base_(base),
      cfg_(cfg),
      mech_limit_(mech_limit),
      delta_slew_(delta_slew),
      left_(OscState::seeded(base)),
      right_(OscState::seeded(base)) {}

DualWingResult DualWing::step(const DualWingCommand& cmd) {
    const double delta_cap = std::max(0.0, mech_limit_ - base_.zeta);
    const double a_cap = star::kMaxAsymmetry;

    DualWingResult out;
    WingbeatParams wing = base_;

    const auto compose = [&](double sign) {
        const double delta_raw = cmd.delta_sym + sign * cmd.delta_anti;
        const double a_raw = cmd.A_sym + sign * cmd.A_anti;
        wing.delta = std::clamp(delta_raw, -delta_cap, delta_cap);
        wing.A = std::clamp(a_raw, -a_cap, a_cap);
        return wing.delta != delta_raw || wing.A != a_raw;
    };

    out.saturated_left = compose(+1.0);
    StepResult l = cpg_step(left_, wing, cfg_, delta_slew_);
    out.y_left = l.y;
    out.dw_left = l.delta_omega;

    out.saturated_right = compose(-1.0);
    StepResult r = cpg_step(right_, wing, cfg_, delta_slew_);
    out.y_right = r.y;
    out.dw_right = r.delta_omega;

    ++tick_;
    return out;
}

PwmResult servo_pwm(double y_deg, const ServoCalib& calib) {
    if (calib.us_per_deg == 0.0)
        throw ValidationError("servo calibration must be monotone (us_per_deg != 0)");
    const double raw = calib.center_us + y_deg * calib.us_per_deg;
    const double clamped = std::clamp(raw, calib.min_us, calib.max_us);
    return {clamped, clamped != raw};
}

}  // namespace flapkit::cpg
