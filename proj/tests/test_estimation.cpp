#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "flapkit/error.hpp"
#include "flapkit/estimation.hpp"
#include "flapkit/star.hpp"

using namespace flapkit;
using namespace flapkit::est;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double quat_angle_deg(const Quat& a, const Quat& b) {
    const double dot = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    return 2.0 * std::acos(std::min(1.0, std::abs(dot))) * 180.0 / kPi;
}

}  // namespace

TEST_CASE("level rest is a fixed point") {
    Quat q;
    ImuSample s;
    s.accel = {0.0, 0.0, 1.0};
    for (int i = 0; i < 100; ++i) q = madgwick_update(q, s, 0.1, 0.01).q;
    CHECK(quat_angle_deg(q, Quat{}) < 1e-9);
}

TEST_CASE("beta = 0 equals gyro dead-reckoning") {
    // piecewise-constant rate script; closed-form ground truth composes the
    // per-segment quaternion exponentials
    struct Segment {
        std::array<double, 3> rate;
        double duration;
    };
    const std::vector<Segment> script = {
        {{0.0, 0.0, kPi / 2}, 1.0},
        {{0.0, -kPi / 4, 0.0}, 1.0},
        {{kPi / 3, 0.0, 0.0}, 0.5},
        {{0.2, -0.4, 0.6}, 2.0},
    };
    const double dt = 0.01;
    Quat q;
    Quat truth;
    for (const Segment& seg : script) {
        const int n = static_cast<int>(std::lround(seg.duration / dt));
        for (int i = 0; i < n; ++i) {
            ImuSample s;
            s.gyro = seg.rate;
            s.accel = {0.0, 0.0, 0.0};  // ignored at beta = 0
            q = madgwick_update(q, s, 0.0, dt).q;
        }
        truth = (truth * Quat::from_rotation_vector({seg.rate[0] * seg.duration,
                                                     seg.rate[1] * seg.duration,
                                                     seg.rate[2] * seg.duration}))
                    .normalized();
    }
    CHECK(quat_angle_deg(q, truth) < 1e-9);

    // 90 deg about +z in 1 s reads as yaw = 90
    Quat qy;
    for (int i = 0; i < 100; ++i) {
        ImuSample s;
        s.gyro = {0.0, 0.0, kPi / 2};
        qy = madgwick_update(qy, s, 0.0, 0.01).q;
    }
    CHECK(euler_from_quat(qy).yaw == doctest::Approx(90.0).epsilon(0.5 / 90.0));
}

TEST_CASE("static tilt converges to the accel-aligned attitude") {
    Quat q;
    ImuSample s;
    s.accel = {0.0, std::sin(10.0 / 180.0 * kPi), std::cos(10.0 / 180.0 * kPi)};
    for (int i = 0; i < 5000; ++i) q = madgwick_update(q, s, 0.1, 0.01).q;
    const EulerAngles e = euler_from_quat(q);
    CHECK(std::abs(e.roll - 10.0) < 0.1);
    CHECK(std::abs(e.pitch) < 0.1);
}

TEST_CASE("near-zero accel skips the correction") {
    Quat q = quat_from_euler(5.0, 3.0, 0.0);
    ImuSample s;
    s.accel = {0.0, 0.0, 0.05};  // free-fall-ish
    const MadgwickResult r = madgwick_update(q, s, 0.1, 0.01);
    CHECK(r.accel_skipped);
    CHECK(quat_angle_deg(r.q, q) < 1e-9);  // no gyro, no correction
}

TEST_CASE("quaternion norm is preserved") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Quat q;
    bool ok = true;
    for (int i = 0; i < 20000; ++i) {
        ImuSample s;
        s.gyro = {3.0 * u(rng), 3.0 * u(rng), 3.0 * u(rng)};
        s.accel = {0.2 * u(rng), 0.2 * u(rng), 1.0 + 0.2 * u(rng)};
        q = madgwick_update(q, s, 0.1, 0.01).q;
        ok = ok && std::abs(q.norm() - 1.0) < 1e-9;
    }
    CHECK(ok);
}

TEST_CASE("euler conversions") {
    CHECK(euler_from_quat(Quat{}).roll == doctest::Approx(0.0));
    CHECK(euler_from_quat(Quat{}).pitch == doctest::Approx(0.0));
    CHECK(euler_from_quat(Quat{}).yaw == doctest::Approx(0.0));

    const EulerAngles yaw90 = euler_from_quat(quat_from_euler(0.0, 0.0, 90.0));
    CHECK(yaw90.yaw == doctest::Approx(90.0));
    CHECK(yaw90.roll == doctest::Approx(0.0));
    CHECK(yaw90.pitch == doctest::Approx(0.0));

    SUBCASE("round trip over random attitudes") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ur(-180.0, 180.0);
        std::uniform_real_distribution<double> up(-85.0, 85.0);
        double max_err = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double roll = ur(rng), pitch = up(rng), yaw = ur(rng);
            const EulerAngles e = euler_from_quat(quat_from_euler(roll, pitch, yaw));
            max_err = std::max(max_err, std::abs(e.roll - roll));
            max_err = std::max(max_err, std::abs(e.pitch - pitch));
            max_err = std::max(max_err, std::abs(e.yaw - yaw));
        }
        CHECK(max_err < 1e-9);
    }

    SUBCASE("gimbal proximity is flagged") {
        const EulerAngles e = euler_from_quat(quat_from_euler(0.0, 89.95, 30.0));
        CHECK(e.gimbal);
        CHECK(std::isfinite(e.yaw));
        CHECK(std::isfinite(e.roll));
        CHECK_FALSE(euler_from_quat(quat_from_euler(0.0, 89.0, 30.0)).gimbal);
    }
}

TEST_CASE("rls: exact-model fixed point") {
    RlsState s = RlsState::with_lambda(0.995);
    PhaseAccumulator acc;
    for (int n = 0; n < 2000; ++n) {
        const Eigen::Vector3d reg = adaptive_regressor(acc, 2.0 * kPi * 10.0, 0.01);
        rls_update(s, 7.5, reg);
    }
    CHECK(s.w_est(0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(s.w_est(1) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(s.w_est(2) == doctest::Approx(7.5).epsilon(1e-9));
}

TEST_CASE("rls: sinusoid plus mean against the batch WLS oracle") {
    const double f_sig = 2.0;
    const double fs = 100.0;
    const int N = 500;  // 10 signal cycles
    const double lambda = 0.995;
    RlsState s = RlsState::with_lambda(lambda);

    std::vector<Eigen::Vector3d> regs;
    std::vector<double> ys;
    for (int n = 0; n < N; ++n) {
        const double phi = 2.0 * kPi * f_sig * n / fs;
        const Eigen::Vector3d reg{std::sin(phi), std::cos(phi), 1.0};
        const double y = 2.0 * std::sin(phi) + 0.5;
        rls_update(s, y, reg);
        regs.push_back(reg);
        ys.push_back(y);
    }
    CHECK(s.w_est(0) == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::abs(s.w_est(1)) < 1e-3);
    CHECK(s.w_est(2) == doctest::Approx(0.5).epsilon(1e-3));

    // batch weighted least squares on the same window: the recursion solves
    // (sum lambda^{N-1-n} reg reg' + lambda^N P0^-1) theta = sum lambda^{N-1-n} reg y
    Eigen::Matrix3d H = Eigen::Matrix3d::Identity() * (std::pow(lambda, N) / 1e3);
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (int n = 0; n < N; ++n) {
        const double w = std::pow(lambda, N - 1 - n);
        H += w * regs[n] * regs[n].transpose();
        g += w * regs[n] * ys[n];
    }
    const Eigen::Vector3d theta_wls = H.ldlt().solve(g);
    CHECK((s.w_est - theta_wls).norm() < 1e-9);
}

TEST_CASE("rls: step in the mean recovers with the forgetting time constant") {
    const double fs = 100.0;
    const double lambda = 0.995;
    RlsState s = RlsState::with_lambda(lambda);
    PhaseAccumulator acc;
    for (int n = 0; n < 3000; ++n) {
        const Eigen::Vector3d reg = adaptive_regressor(acc, 2.0 * kPi * 10.0, 1.0 / fs);
        rls_update(s, 1.0 * std::sin(acc.phi), reg);
    }
    // step the mean to 10; ~63% recovery after 1/((1-lambda) fs) seconds
    const int n_tau = static_cast<int>(std::lround(1.0 / (1.0 - lambda)));
    double c_at_tau = 0.0;
    for (int n = 0; n < 4 * n_tau; ++n) {
        const Eigen::Vector3d reg = adaptive_regressor(acc, 2.0 * kPi * 10.0, 1.0 / fs);
        const RlsResult r = rls_update(s, 10.0 + 1.0 * std::sin(acc.phi), reg);
        if (n == n_tau - 1) c_at_tau = r.c;
    }
    CHECK(c_at_tau / 10.0 == doctest::Approx(0.63).epsilon(0.10));
}

TEST_CASE("rls: covariance stays symmetric positive-definite") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RlsState s = RlsState::with_lambda(0.995);
    double phi = 0.0;
    bool spd = true;
    bool symmetric = true;
    for (int n = 0; n < 1000000; ++n) {
        phi += 0.3 + 0.2 * u(rng);
        const Eigen::Vector3d reg{std::sin(phi), std::cos(phi), 1.0};
        rls_update(s, 5.0 * u(rng), reg);
        if ((n & 255) == 0) {
            symmetric = symmetric && (s.P - s.P.transpose()).norm() < 1e-9 * s.P.norm();
            const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(s.P);
            spd = spd && es.eigenvalues().minCoeff() > 0.0;
        }
    }
    CHECK(symmetric);
    CHECK(spd);
}

TEST_CASE("rls: non-finite input leaves the state unchanged") {
    RlsState s = RlsState::with_lambda(0.995);
    rls_update(s, 1.0, {0.0, 1.0, 1.0});
    const Eigen::Vector3d before = s.w_est;
    const RlsResult r1 = rls_update(s, std::nan(""), {0.0, 1.0, 1.0});
    CHECK_FALSE(r1.ok);
    const RlsResult r2 =
        rls_update(s, 1.0, {std::numeric_limits<double>::infinity(), 1.0, 1.0});
    CHECK_FALSE(r2.ok);
    CHECK((s.w_est - before).norm() == 0.0);
}

TEST_CASE("adaptive regressor") {
    SUBCASE("constant rate accumulates omega * t") {
        PhaseAccumulator acc;
        Eigen::Vector3d reg;
        for (int n = 0; n < 100; ++n) reg = adaptive_regressor(acc, 5.0, 0.01);
        CHECK(acc.phi == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(reg(0) == doctest::Approx(std::sin(5.0)));
        CHECK(reg(1) == doctest::Approx(std::cos(5.0)));
        CHECK(reg(2) == 1.0);
    }

    SUBCASE("zero rate freezes the regressor") {
        PhaseAccumulator acc{1.2345};
        const Eigen::Vector3d reg = adaptive_regressor(acc, 0.0, 0.01);
        CHECK(acc.phi == 1.2345);
        CHECK(reg(0) == doctest::Approx(std::sin(1.2345)));
    }

    SUBCASE("tracks the rhythm-generator phase") {
        star::StarParams p;
        p.f = 10.0;
        p.A = 0.3;
        PhaseAccumulator acc;
        star::PhaseState s{0.0, 0.0};
        const double dt = 1e-4;
        for (int n = 0; n < 1000; ++n) {  // one cycle
            // the oscillator supplies the realized average rate over the tick
            const star::PhaseState next = star::integrate_phase(s, p, dt, 1);
            adaptive_regressor(acc, (next.omega - s.omega) / dt, dt);
            s = next;
        }
        CHECK(std::abs(acc.phi - s.omega) < 1e-4);
    }
}

TEST_CASE("imu replay produces estimate rows") {
    std::vector<ImuSample> samples;
    const double fs = 100.0;
    for (int n = 0; n < 800; ++n) {
        ImuSample s;
        s.t = n / fs;
        s.gyro = {0.0, 0.0, 0.0};
        const double pitch = 10.0 / 180.0 * kPi;  // static nose-up tilt
        s.accel = {std::sin(pitch), 0.0, std::cos(pitch)};
        samples.push_back(s);
    }
    const std::vector<EstimateRow> rows = replay_imu(samples, EstimatorConfig{});
    REQUIRE(rows.size() == samples.size());
    CHECK(rows.back().pitch == doctest::Approx(10.0).epsilon(0.01));
    CHECK(rows.back().pitch_mean_c == doctest::Approx(10.0).epsilon(0.05));

    SUBCASE("non-increasing timestamps are rejected") {
        samples[10].t = samples[9].t;
        CHECK_THROWS_AS(replay_imu(samples, EstimatorConfig{}), ValidationError);
    }
}
