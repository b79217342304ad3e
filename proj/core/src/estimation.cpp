#include "flapkit/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "flapkit/error.hpp"

namespace flapkit::est {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDeg = 180.0 / kPi;
constexpr double kAccelSkipNorm = 0.1;   // g
constexpr double kGimbalLimitDeg = 89.9;
}  // namespace

Quat Quat::operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
}

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quat Quat::normalized() const {
    const double n = norm();
    if (n == 0.0) throw NumericalError("cannot normalize a zero quaternion");
    return {w / n, x / n, y / n, z / n};
}

Quat Quat::from_rotation_vector(const std::array<double, 3>& v) {
    const double angle = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (angle < 1e-300) return {1.0, 0.0, 0.0, 0.0};
    const double half = 0.5 * angle;
    const double s = std::sin(half) / angle;
    return {std::cos(half), v[0] * s, v[1] * s, v[2] * s};
}

MadgwickResult madgwick_update(const Quat& q0, const ImuSample& sample, double beta,
                               double dt) {
    if (!(dt > 0.0)) throw AdmissibilityError("madgwick_update requires dt > 0");
    if (beta < 0.0) throw AdmissibilityError("madgwick gain beta must be >= 0");

    // Gyro advance: body rates enter on the right, integrated exactly over dt.
    const Quat dq = Quat::from_rotation_vector(
        {sample.gyro[0] * dt, sample.gyro[1] * dt, sample.gyro[2] * dt});
    Quat q = q0 * dq;

    MadgwickResult out;
    const double anorm = std::sqrt(sample.accel[0] * sample.accel[0] +
                                   sample.accel[1] * sample.accel[1] +
                                   sample.accel[2] * sample.accel[2]);
    if (beta > 0.0) {
        if (anorm < kAccelSkipNorm) {
            out.accel_skipped = true;
        } else {
            const double ax = sample.accel[0] / anorm;
            const double ay = sample.accel[1] / anorm;
            const double az = sample.accel[2] / anorm;
            // Objective: rotate world +z into the body frame and match accel.
            const double f1 = 2.0 * (q.x * q.z - q.w * q.y) - ax;
            const double f2 = 2.0 * (q.y * q.z + q.w * q.x) - ay;
            const double f3 = 1.0 - 2.0 * (q.x * q.x + q.y * q.y) - az;
            double gw = -2.0 * q.y * f1 + 2.0 * q.x * f2;
            double gx = 2.0 * q.z * f1 + 2.0 * q.w * f2 - 4.0 * q.x * f3;
            double gy = -2.0 * q.w * f1 + 2.0 * q.z * f2 - 4.0 * q.y * f3;
            double gz = 2.0 * q.x * f1 + 2.0 * q.y * f2;
            const double gn = std::sqrt(gw * gw + gx * gx + gy * gy + gz * gz);
            if (gn > 0.0) {
                const double s = beta * dt / gn;
                q.w -= s * gw;
                q.x -= s * gx;
                q.y -= s * gy;
                q.z -= s * gz;
            }
        }
    }
    out.q = q.normalized();
    return out;
}

EulerAngles euler_from_quat(const Quat& qin) {
    const Quat q = qin.normalized();
    EulerAngles e;
    // pitch (nose-up) = asin(2(xz - wy)); roll/yaw from the ZYX decomposition
    double s = 2.0 * (q.x * q.z - q.w * q.y);
    s = std::clamp(s, -1.0, 1.0);
    e.pitch = std::asin(s) * kDeg;
    if (std::abs(e.pitch) > kGimbalLimitDeg) {
        e.gimbal = true;
        // Degenerate axis: only yaw -/+ roll is observable; report roll = 0.
        const double r12 = 2.0 * (q.x * q.y - q.w * q.z);
        const double r22 = 1.0 - 2.0 * (q.x * q.x + q.z * q.z);
        e.roll = 0.0;
        e.yaw = (e.pitch > 0.0 ? -1.0 : 1.0) * std::atan2(r12, r22) * kDeg;
        return e;
    }
    e.roll = std::atan2(2.0 * (q.y * q.z + q.w * q.x),
                        1.0 - 2.0 * (q.x * q.x + q.y * q.y)) * kDeg;
    e.yaw = std::atan2(2.0 * (q.x * q.y + q.w * q.z),
                       1.0 - 2.0 * (q.y * q.y + q.z * q.z)) * kDeg;
    return e;
}

Quat quat_from_euler(double roll_deg, double pitch_deg, double yaw_deg) {
    const double hr = 0.5 * roll_deg / kDeg;
    const double hp = 0.5 * (-pitch_deg) / kDeg;  // pitch is nose-up positive
    const double hy = 0.5 * yaw_deg / kDeg;
    const Quat qz{std::cos(hy), 0.0, 0.0, std::sin(hy)};
    const Quat qy{std::cos(hp), 0.0, std::sin(hp), 0.0};
    const Quat qx{std::cos(hr), std::sin(hr), 0.0, 0.0};
    return (qz * qy * qx).normalized();
}

RlsState RlsState::with_lambda(double lambda, double p0) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw ValidationError("RLS forgetting factor lambda must lie in (0, 1]");
    if (!(p0 > 0.0)) throw ValidationError("RLS prior covariance must be positive");
    RlsState s;
    s.lambda = lambda;
    s.P = Eigen::Matrix3d::Identity() * p0;
    return s;
}

RlsResult rls_update(RlsState& state, double y, const Eigen::Vector3d& regressor) {
    if (!std::isfinite(y) || !regressor.allFinite())
        return {state.w_est(2), false};

    const double lambda = state.lambda;
    const Eigen::Vector3d Pphi = state.P * regressor;
    const double denom = lambda + regressor.dot(Pphi);
    const Eigen::Vector3d K = Pphi / denom;
    const double e = y - regressor.dot(state.w_est);
    state.w_est += K * e;
    state.P = (state.P - K * Pphi.transpose()) / lambda;
    // keep P numerically symmetric
    state.P = 0.5 * (state.P + state.P.transpose()).eval();
    return {state.w_est(2), true};
}

Eigen::Vector3d adaptive_regressor(PhaseAccumulator& acc, double omega_inst, double dt) {
    if (!(dt > 0.0)) throw AdmissibilityError("adaptive_regressor requires dt > 0");
    acc.phi += omega_inst * dt;
    return {std::sin(acc.phi), std::cos(acc.phi), 1.0};
}

std::vector<EstimateRow> replay_imu(const std::vector<ImuSample>& samples,
                                    const EstimatorConfig& cfg) {
    std::vector<EstimateRow> rows;
    rows.reserve(samples.size());
    Quat q;
    RlsState rls = RlsState::with_lambda(cfg.lambda);
    PhaseAccumulator acc;
    double prev_t = samples.empty() ? 0.0 : samples.front().t;
    bool first = true;
    for (const ImuSample& s : samples) {
        const double dt = first ? 0.01 : s.t - prev_t;
        if (!first && !(dt > 0.0))
            throw ValidationError("IMU stream timestamps must be strictly increasing");
        q = madgwick_update(q, s, cfg.beta, dt).q;
        const EulerAngles e = euler_from_quat(q);
        const Eigen::Vector3d reg = adaptive_regressor(acc, 2.0 * kPi * cfg.f, dt);
        rls_update(rls, e.pitch, reg);
        rows.push_back({s.t, e.roll, e.pitch, e.yaw, rls.w_est(2), rls.w_est(0),
                        rls.w_est(1)});
        prev_t = s.t;
        first = false;
    }
    return rows;
}

}  // namespace flapkit::est
