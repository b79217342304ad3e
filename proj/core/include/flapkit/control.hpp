#pragma once

// PID attitude regulation and control allocation.  The pitch loop closes on
// the RLS-extracted mean; the yaw loop closes on the raw fused estimate.
// Allocation maps the two PID outputs onto either stroke-offset channels
// (OffsetMode) or stroke-timing channels (TimingMode).

#include <cstdint>
#include <string>

#include "flapkit/cpg.hpp"
#include "flapkit/estimation.hpp"

namespace flapkit::ctrl {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double i_limit = 20.0;    // anti-windup bound on the integral, err*s
    double out_limit = 20.0;  // output bound
};

struct PidState {
    double integral = 0.0;
    double prev_err = 0.0;
    bool fresh = true;  // first call initializes prev_err to err
};

// u = kp*err + ki*integral + kd*(err - prev_err)/dt with the integral clamped
// to +-i_limit and the output to +-out_limit.
double pid_step(const PidGains& gains, PidState& state, double err, double dt);

enum class AllocationMode { OffsetMode, TimingMode };

struct AllocationConfig {
    AllocationMode mode = AllocationMode::OffsetMode;
    double k_pitch_to_delta = 1.0;  // deg per pitch-PID unit
    double k_yaw_to_delta = 1.0;    // deg per yaw-PID unit
    double k_pitch_to_A = 0.05;     // A units per pitch-PID unit
    double k_yaw_to_A = 0.05;       // A units per yaw-PID unit
    double A_trim = 0.0;            // timing-mode trim A0
    // Turn-direction wiring; +-1.  Defaults: positive delta_anti (left wing
    // up, right wing down) yaws left; positive A_anti (left downstroke
    // faster) yaws right, hence the inverted default on the A channel.
    int sign_yaw_delta = +1;
    int sign_yaw_A = -1;
    double delta_limit = 45.0;  // deg, per channel
    double A_limit = 0.49;
};

void validate(const AllocationConfig& cfg);

struct ControlOutput {
    double delta_sym = 0.0;   // deg
    double delta_anti = 0.0;  // deg
    double A_sym = 0.0;
    double A_anti = 0.0;
    bool saturated = false;
};

// OffsetMode drives only the offset channels (timing stays at trim);
// TimingMode drives only the timing channels.  A positive pitch-up demand
// lowers both wings in OffsetMode and raises A_sym in TimingMode.
ControlOutput allocate(const AllocationConfig& cfg, double u_pitch, double u_yaw);

struct Setpoint {
    double pitch_ref = 0.0;  // deg
    double yaw_ref = 0.0;    // deg
};

struct ControllerConfig {
    PidGains pitch_gains{0.6, 0.45, 0.05};   // offset-mode defaults
    PidGains yaw_gains{0.15, 0.0, 0.0};
    AllocationConfig alloc;
    double madgwick_beta = 0.1;
    double rls_lambda = 0.995;
    double rls_p0 = 1e3;
};

// Paper-tuned gain sets per allocation mode.
ControllerConfig default_controller(AllocationMode mode);

struct Telemetry {
    double t = 0.0;
    double roll = 0.0, pitch = 0.0, yaw = 0.0;  // deg
    double pitch_mean = 0.0;                    // deg, RLS mean
    double u_pitch = 0.0, u_yaw = 0.0;
    double delta_sym = 0.0, delta_anti = 0.0;
    double A_sym = 0.0, A_anti = 0.0;
    double y_left = 0.0, y_right = 0.0;         // deg
    std::uint32_t flags = 0;
};

// Telemetry flag bits.
inline constexpr std::uint32_t kFlagStaleSample = 1u << 0;
inline constexpr std::uint32_t kFlagAccelSkipped = 1u << 1;
inline constexpr std::uint32_t kFlagSaturated = 1u << 2;
inline constexpr std::uint32_t kFlagGimbal = 1u << 3;

// One controller instance owns the estimator, PID states and the dual-wing
// oscillator; tick() runs the full pipeline at the servo rate.  A sample
// whose timestamp has not advanced freezes the commands and raises the
// stale-sample fault flag.
class Controller {
public:
    Controller(const ControllerConfig& cfg, const cpg::WingbeatParams& base,
               const cpg::SmoothingConfig& smoothing);

    Telemetry tick(const est::ImuSample& sample, const Setpoint& setpoint);

    const est::Quat& attitude() const { return q_; }
    const est::RlsState& rls() const { return rls_; }
    const cpg::DualWing& wing() const { return wing_; }

private:
    ControllerConfig cfg_;
    cpg::DualWing wing_;
    est::Quat q_;
    est::RlsState rls_;
    est::PhaseAccumulator acc_;
    PidState pid_pitch_;
    PidState pid_yaw_;
    double last_t_;
    bool have_sample_ = false;
    double omega_inst_;  // rad/s, realized phase rate fed to the regressor
    Telemetry last_;
};

}  // namespace flapkit::ctrl
