#include "flapkit/control.hpp"

#include <algorithm>
#include <cmath>

#include "flapkit/error.hpp"

namespace flapkit::ctrl {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double pid_step(const PidGains& gains, PidState& state, double err, double dt) {
    if (!(dt > 0.0)) throw AdmissibilityError("pid_step requires dt > 0");
    if (state.fresh) {
        state.prev_err = err;  // suppress derivative kick on the first call
        state.fresh = false;
    }
    state.integral = std::clamp(state.integral + err * dt, -gains.i_limit, gains.i_limit);
    const double u = gains.kp * err + gains.ki * state.integral +
                     gains.kd * (err - state.prev_err) / dt;
    state.prev_err = err;
    return std::clamp(u, -gains.out_limit, gains.out_limit);
}

void validate(const AllocationConfig& cfg) {
    if (cfg.sign_yaw_delta != 1 && cfg.sign_yaw_delta != -1)
        throw ValidationError("allocation sign_yaw_delta must be +1 or -1");
    if (cfg.sign_yaw_A != 1 && cfg.sign_yaw_A != -1)
        throw ValidationError("allocation sign_yaw_A must be +1 or -1");
    if (!(cfg.delta_limit > 0.0) || !(cfg.A_limit > 0.0))
        throw ValidationError("allocation channel limits must be positive");
}

ControlOutput allocate(const AllocationConfig& cfg, double u_pitch, double u_yaw) {
    validate(cfg);
    if (!std::isfinite(u_pitch) || !std::isfinite(u_yaw))
        throw AdmissibilityError("allocation inputs must be finite");

    ControlOutput out;
    if (cfg.mode == AllocationMode::OffsetMode) {
        // Upward symmetric offset pitches the nose down, so a pitch-up demand
        // lowers both wings.
        const double ds = -cfg.k_pitch_to_delta * u_pitch;
        const double da = cfg.sign_yaw_delta * cfg.k_yaw_to_delta * u_yaw;
        out.delta_sym = std::clamp(ds, -cfg.delta_limit, cfg.delta_limit);
        out.delta_anti = std::clamp(da, -cfg.delta_limit, cfg.delta_limit);
        out.A_sym = cfg.A_trim;
        out.A_anti = 0.0;
        out.saturated = out.delta_sym != ds || out.delta_anti != da;
    } else {
        // Larger symmetric A pitches the nose up.
        const double as = cfg.A_trim + cfg.k_pitch_to_A * u_pitch;
        const double aa = cfg.sign_yaw_A * cfg.k_yaw_to_A * u_yaw;
        out.A_sym = std::clamp(as, -cfg.A_limit, cfg.A_limit);
        out.A_anti = std::clamp(aa, -cfg.A_limit, cfg.A_limit);
        out.delta_sym = 0.0;
        out.delta_anti = 0.0;
        out.saturated = out.A_sym != as || out.A_anti != aa;
    }
    return out;
}

ControllerConfig default_controller(AllocationMode mode) {
    ControllerConfig cfg;
    cfg.alloc.mode = mode;
    if (mode == AllocationMode::OffsetMode) {
        cfg.pitch_gains = {0.6, 0.45, 0.05, 20.0, 20.0};
        cfg.yaw_gains = {0.15, 0.0, 0.0, 20.0, 20.0};
    } else {
        cfg.pitch_gains = {0.6, 0.7, 0.07, 20.0, 20.0};
        cfg.yaw_gains = {0.17, 0.0, 0.0, 20.0, 20.0};
    }
    return cfg;
}

Controller::Controller(const ControllerConfig& cfg, const cpg::WingbeatParams& base,
                       const cpg::SmoothingConfig& smoothing)
    : cfg_(cfg),
      wing_(base, smoothing),
      rls_(est::RlsState::with_lambda(cfg.rls_lambda, cfg.rls_p0)),
      last_t_(0.0),
      omega_inst_(2.0 * kPi * base.f) {
    validate(cfg.alloc);
}

Telemetry Controller::tick(const est::ImuSample& sample, const Setpoint& setpoint) {
    const double f_servo = wing_.smoothing().f_servo;
    const double dt = 1.0 / f_servo;

    if (have_sample_ && !(sample.t > last_t_)) {
        // Sensor stream stalled: hold the last commands, raise the fault flag.
        Telemetry t = last_;
        t.flags |= kFlagStaleSample;
        last_ = t;
        return t;
    }

    Telemetry tm;
    tm.t = sample.t;

    const est::MadgwickResult mr = madgwick_update(q_, sample, cfg_.madgwick_beta, dt);
    q_ = mr.q;
    if (mr.accel_skipped) tm.flags |= kFlagAccelSkipped;

    const est::EulerAngles e = euler_from_quat(q_);
    if (e.gimbal) tm.flags |= kFlagGimbal;
    tm.roll = e.roll;
    tm.pitch = e.pitch;
    tm.yaw = e.yaw;

    const Eigen::Vector3d reg = est::adaptive_regressor(acc_, omega_inst_, dt);
    const est::RlsResult rr = est::rls_update(rls_, e.pitch, reg);
    tm.pitch_mean = rr.c;

    tm.u_pitch = pid_step(cfg_.pitch_gains, pid_pitch_, setpoint.pitch_ref - rr.c, dt);
    tm.u_yaw = pid_step(cfg_.yaw_gains, pid_yaw_, setpoint.yaw_ref - e.yaw, dt);

    const ControlOutput co = allocate(cfg_.alloc, tm.u_pitch, tm.u_yaw);
    tm.delta_sym = co.delta_sym;
    tm.delta_anti = co.delta_anti;
    tm.A_sym = co.A_sym;
    tm.A_anti = co.A_anti;

    const cpg::DualWingResult wr =
        wing_.step({co.delta_sym, co.delta_anti, co.A_sym, co.A_anti});
    tm.y_left = wr.y_left;
    tm.y_right = wr.y_right;
    if (co.saturated || wr.saturated_left || wr.saturated_right)
        tm.flags |= kFlagSaturated;

    omega_inst_ = 0.5 * (wr.dw_left + wr.dw_right) * f_servo;
    last_t_ = sample.t;
    have_sample_ = true;
    last_ = tm;
    return tm;
}

}  // namespace flapkit::ctrl
