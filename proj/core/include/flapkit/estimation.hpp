#pragma once

// 6-axis attitude estimation and pitch-mean extraction.
//
// Frames: body +x forward, +y left, +z up.  The quaternion maps body vectors
// into the world frame; a level body at rest reads accel = (0, 0, +1) g and
// the identity quaternion.  Euler angles are ZYX (yaw about +z, then pitch,
// then roll about +x) with pitch reported nose-up positive.

#include <array>
#include <vector>

#include <Eigen/Core>

namespace flapkit::est {

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat operator*(const Quat& o) const;
    Quat normalized() const;
    double norm() const;

    // Unit quaternion for a rotation vector (axis*angle, rad).
    static Quat from_rotation_vector(const std::array<double, 3>& v);
};

struct ImuSample {
    std::array<double, 3> gyro{};   // body angular rate, rad/s
    std::array<double, 3> accel{};  // specific force, g
    double t = 0.0;                 // s
};

struct MadgwickResult {
    Quat q;
    bool accel_skipped = false;  // correction skipped (near-zero accel norm)
};

// One fused update: exact quaternion-exponential gyro advance plus a
// normalized-gradient accelerometer correction scaled by beta.  With beta = 0
// the update is pure gyro dead-reckoning.  Accel norms below 0.1 g skip the
// correction for that step and set the flag.
MadgwickResult madgwick_update(const Quat& q, const ImuSample& sample, double beta,
                               double dt);

struct EulerAngles {
    double roll = 0.0;   // deg
    double pitch = 0.0;  // deg, nose-up positive, in [-90, 90]
    double yaw = 0.0;    // deg
    bool gimbal = false; // |pitch| beyond 89.9 deg; degenerate formula used
};

EulerAngles euler_from_quat(const Quat& q);
Quat quat_from_euler(double roll_deg, double pitch_deg, double yaw_deg);

// Recursive least squares with exponential forgetting over the regressor
// (sin phi, cos phi, 1).  w_est = (a, b, c) where c is the low-frequency mean.
struct RlsState {
    Eigen::Vector3d w_est = Eigen::Vector3d::Zero();
    Eigen::Matrix3d P = Eigen::Matrix3d::Identity() * 1e3;
    double lambda = 0.995;

    static RlsState with_lambda(double lambda, double p0 = 1e3);
};

struct RlsResult {
    double c = 0.0;   // updated mean estimate
    bool ok = true;   // false: non-finite input, state left unchanged
};

RlsResult rls_update(RlsState& state, double y, const Eigen::Vector3d& regressor);

// Frequency-aware regressor phase: phi accumulates the instantaneous phase
// rate supplied by the rhythm generator.
struct PhaseAccumulator {
    double phi = 0.0;  // rad
};

Eigen::Vector3d adaptive_regressor(PhaseAccumulator& acc, double omega_inst, double dt);

// Offline replay of an IMU stream at a nominal flapping frequency (the
// regressor advances at 2*pi*f between samples).
struct EstimatorConfig {
    double beta = 0.1;
    double lambda = 0.995;
    double f = 10.0;  // nominal flapping frequency for the replay regressor, Hz
};

struct EstimateRow {
    double t = 0.0;
    double roll = 0.0, pitch = 0.0, yaw = 0.0;  // deg
    double pitch_mean_c = 0.0;                  // deg
    double a = 0.0, b = 0.0;                    // sinusoid coefficients, deg
};

std::vector<EstimateRow> replay_imu(const std::vector<ImuSample>& samples,
                                    const EstimatorConfig& cfg);

}  // namespace flapkit::est
