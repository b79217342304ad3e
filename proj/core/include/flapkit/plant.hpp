#pragma once

// Desk-scale flight plant: two-point-mass wing inertia with flap-angle
// dependence, a sign-constrained affine force-torque map distilled from the
// bench campaigns, and longitudinal-plus-yaw rigid-body dynamics with the
// time-varying-inertia coupling
//
//   tau = d/dt [ I(t) * rate ] = I * rate_dot + I_dot * rate.
//
// Pitch moments are nose-up positive; yaw moments are left-turn positive.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "flapkit/control.hpp"
#include "flapkit/cpg.hpp"

namespace flapkit::plant {

struct InertiaModel {
    double I_body_yy = 7.91548e-5;   // kg m^2, body contribution about y
    double I_body_zz = 6.26469e-5;   // kg m^2, body contribution about z
    double m_wing = 4.9e-3;          // kg, per wing
    double r_eff = 0.12;             // m, effective wing mass radius
    double x_w = 0.02;               // m, chordwise wing-mass offset
    double kappa_x = 3.1926e-3;      // m, fore-aft CG coupling
    double m_total = 0.026;          // kg
    double body_length = 0.10;       // m
    double body_core_height = 0.021255;  // m; peak |z_cg| is ~2x this
};

// Positivity and the two calibration anchors: I_yy(70 deg)/I_yy(0) = 2.5 +- 0.1
// and peak fore-aft CG excursion = 3% of body length at 70 deg.
void validate(const InertiaModel& model);

InertiaModel default_inertia_model();

struct InertiaSample {
    double I = 0.0;      // kg m^2
    double I_dot = 0.0;  // kg m^2 / s
};

// I_yy = I_body_yy + 2 m_w (x_w^2 + r_eff^2 sin^2 phi);
// I_dot = 2 m_w r_eff^2 sin(2 phi) phi_dot.  phi in rad.
InertiaSample inertia_yy_at(const InertiaModel& model, double phi, double phi_dot);

// Yaw analog: the spanwise mass moves toward the z axis as the wings leave
// the horizontal plane, so cos^2 replaces sin^2.
InertiaSample inertia_zz_at(const InertiaModel& model, double phi, double phi_dot);

struct CgOffset {
    double x = 0.0;  // m, fore-aft
    double z = 0.0;  // m, vertical
};

// z_cg = 2 m_w r_eff sin(phi) / m_total; x_cg = kappa_x sin(phi).
CgOffset cg_at(const InertiaModel& model, double phi);

struct FtMapConfig {
    double F_x0 = 0.05;          // N, forward baseline at the reference point
    double F_z0 = 0.255;         // N, vertical baseline
    double zeta_ref = 35.0;      // deg
    double f_ref = 10.0;         // Hz
    double c_F_zeta = 2.0e-3;    // N/deg, > 0
    double c_F_f = 1.0e-2;       // N/Hz, > 0
    double c_My_delta = -2.0e-4; // N m / deg, < 0 (upward offset = nose-down)
    double c_My_A = 6.0e-3;      // N m / unit, > 0 (larger A = nose-up)
    double c_Mz_danti = 4.0e-4;  // N m / deg, > 0 (left wing up = left turn)
    double c_Mz_Aanti = -5.0e-3; // N m / unit, < 0 (left faster = right turn)
    double c_Mx_danti = 4.0e-4;  // N m / deg, > 0
    double c_Mx_Aanti = 5.0e-3;  // N m / unit, > 0
    double shape_exponent = 2.0; // instantaneous profile ~ |stroke rate|^e
};

// Enforces the bench-observed channel directions; throws ValidationError.
void validate(const FtMapConfig& cfg);

FtMapConfig default_ft_map();

struct ForceTorque {
    std::array<double, 3> F{};  // N, body frame
    std::array<double, 3> M{};  // N m; M[1] nose-up positive, M[2] left-turn positive
};

// Cycle-mean map, affine in the modulation channels recovered from the
// per-wing parameters.
ForceTorque ft_map_mean(const FtMapConfig& cfg, const cpg::WingbeatParams& left,
                        const cpg::WingbeatParams& right);

// Time-average of |stroke_rate|^e over one cycle for the closed-loop shape
// normalization; stroke rate in deg/s when zeta is in deg.
double shape_normalization(const FtMapConfig& cfg, double zeta, double f, double A);

// Instantaneous map: the cycle mean distributed over the cycle proportionally
// to |stroke_rate|^e, normalized to preserve the mean exactly.
ForceTorque ft_map(const FtMapConfig& cfg, const cpg::WingbeatParams& left,
                   const cpg::WingbeatParams& right, double omega_phase,
                   double stroke_rate);

struct BodyState {
    double theta = 0.0;      // pitch, rad, nose-up positive
    double theta_dot = 0.0;  // rad/s
    double psi = 0.0;        // yaw, rad, left-turn positive
    double psi_dot = 0.0;    // rad/s
    double x = 0.0, z = 0.0;    // m, world frame
    double vx = 0.0, vz = 0.0;  // m/s
};

// Continuous stroke signal for integration stages: phi(t) in rad, rate in rad/s.
struct StrokeSignal {
    std::function<double(double)> phi;
    std::function<double(double)> phi_dot;
};

struct DynamicsOptions {
    bool include_cg_gravity = true;  // gravity moment from the shifted CG
    double gravity = 9.81;           // m/s^2
};

// One RK4 step of the rigid-body state with the force-torque held constant
// over the step and the stroke signal evaluated at stage times.
BodyState dynamics_step(const BodyState& state, const InertiaModel& model,
                        const ForceTorque& ft, const StrokeSignal& stroke, double t,
                        double dt, const DynamicsOptions& opts = {});

enum class ScenarioMode { OpenLoop, OffsetMode, TimingMode };

struct SetpointEntry {
    double t = 0.0;
    double pitch_ref = 0.0;  // deg
    double yaw_ref = 0.0;    // deg
};

struct ScenarioConfig {
    ScenarioMode mode = ScenarioMode::OffsetMode;
    double duration = 10.0;       // s
    double physics_rate = 1000.0; // Hz
    cpg::WingbeatParams wing{};   // zeta, f; delta/A used as open-loop commands
    double f_servo = 100.0;
    double cpg_alpha = 0.12566370614359174;
    InertiaModel inertia{};
    FtMapConfig ft{};
    ctrl::ControllerConfig controller{};  // ignored in open loop
    std::vector<SetpointEntry> setpoints{{0.0, 0.0, 0.0}};
    cpg::DualWingCommand open_loop_command{};  // used in OpenLoop mode
    BodyState initial{};
    DynamicsOptions dynamics{};
};

struct TrajectoryLog {
    std::vector<double> t;
    std::vector<double> phi_left, phi_right;      // deg
    std::vector<double> theta, theta_dot;         // deg, deg/s
    std::vector<double> psi;                      // deg
    std::vector<double> x, z, vx, vz;
    std::vector<std::array<double, 3>> F, M;
    std::vector<double> I_yy, I_dot;
    std::vector<ctrl::Telemetry> telemetry;       // zeroed rows in open loop
    bool aborted = false;
    std::string fault;
};

// Deterministic closed- or open-loop run: controller at f_servo, physics
// substeps at physics_rate, wing phase interpolated linearly across each tick.
// Integration faults abort with the partial log preserved.
TrajectoryLog simulate(const ScenarioConfig& scenario);

}  // namespace flapkit::plant
