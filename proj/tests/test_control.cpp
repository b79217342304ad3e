#include <doctest.h>

#include <cmath>
#include <random>

#include "flapkit/control.hpp"
#include "flapkit/error.hpp"

using namespace flapkit;
using namespace flapkit::ctrl;

TEST_CASE("pid basics") {
    const PidGains g{0.6, 0.45, 0.05, 20.0, 20.0};

    SUBCASE("zero error, fresh state") {
        PidState s;
        CHECK(pid_step(g, s, 0.0, 0.01) == doctest::Approx(0.0));
    }

    SUBCASE("first step suppresses the derivative kick") {
        PidState s;
        const double u = pid_step(g, s, 1.0, 0.01);
        CHECK(u == doctest::Approx(0.6045).epsilon(1e-12));
    }

    SUBCASE("second step sees the error difference") {
        PidState s;
        pid_step(g, s, 1.0, 0.01);
        const double u = pid_step(g, s, 2.0, 0.01);
        // integral = 0.03, derivative = (2-1)/0.01
        CHECK(u == doctest::Approx(0.6 * 2.0 + 0.45 * 0.03 + 0.05 * 100.0).epsilon(1e-12));
    }

    SUBCASE("anti-windup pins the integral and output") {
        PidState s;
        double u = 0.0;
        for (int i = 0; i < 10000; ++i) u = pid_step(g, s, 100.0, 0.01);
        CHECK(s.integral == doctest::Approx(20.0));
        CHECK(u == doctest::Approx(20.0));
        for (int i = 0; i < 10000; ++i) u = pid_step(g, s, -100.0, 0.01);
        CHECK(s.integral == doctest::Approx(-20.0));
        CHECK(u == doctest::Approx(-20.0));
    }

    SUBCASE("integral never exceeds the bound under random errors") {
        PidState s;
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> e(-200.0, 200.0);
        bool bounded = true;
        for (int i = 0; i < 100000; ++i) {
            pid_step(g, s, e(rng), 0.01);
            bounded = bounded && std::abs(s.integral) <= 20.0 + 1e-12;
        }
        CHECK(bounded);
    }
}

TEST_CASE("allocation") {
    AllocationConfig cfg;

    SUBCASE("neutral input, neutral output") {
        for (AllocationMode m : {AllocationMode::OffsetMode, AllocationMode::TimingMode}) {
            cfg.mode = m;
            const ControlOutput o = allocate(cfg, 0.0, 0.0);
            CHECK(o.delta_sym == 0.0);
            CHECK(o.delta_anti == 0.0);
            CHECK(o.A_sym == cfg.A_trim);
            CHECK(o.A_anti == 0.0);
            CHECK_FALSE(o.saturated);
        }
    }

    SUBCASE("offset mode: pitch-up demand lowers both wings") {
        cfg.mode = AllocationMode::OffsetMode;
        const ControlOutput o = allocate(cfg, 2.0, 0.0);
        CHECK(o.delta_sym < 0.0);
        CHECK(o.delta_sym == doctest::Approx(-2.0));
    }

    SUBCASE("timing mode: pitch-up demand raises the shared asymmetry") {
        cfg.mode = AllocationMode::TimingMode;
        cfg.A_trim = 0.1;
        const ControlOutput o = allocate(cfg, 2.0, 0.0);
        CHECK(o.A_sym > cfg.A_trim);
        CHECK(o.A_sym == doctest::Approx(0.1 + 0.05 * 2.0));
    }

    SUBCASE("channel separation") {
        cfg.A_trim = 0.05;
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        bool offset_clean = true;
        bool timing_clean = true;
        for (int i = 0; i < 10000; ++i) {
            cfg.mode = AllocationMode::OffsetMode;
            const ControlOutput a = allocate(cfg, u(rng), u(rng));
            offset_clean = offset_clean && a.A_anti == 0.0 && a.A_sym == cfg.A_trim;
            cfg.mode = AllocationMode::TimingMode;
            const ControlOutput b = allocate(cfg, u(rng), u(rng));
            timing_clean = timing_clean && b.delta_sym == 0.0 && b.delta_anti == 0.0;
        }
        CHECK(offset_clean);
        CHECK(timing_clean);
    }

    SUBCASE("yaw signs follow the wiring config") {
        cfg.mode = AllocationMode::OffsetMode;
        CHECK(allocate(cfg, 0.0, 1.0).delta_anti > 0.0);
        cfg.sign_yaw_delta = -1;
        CHECK(allocate(cfg, 0.0, 1.0).delta_anti < 0.0);

        cfg.mode = AllocationMode::TimingMode;
        cfg.sign_yaw_A = -1;
        CHECK(allocate(cfg, 0.0, 1.0).A_anti < 0.0);
        cfg.sign_yaw_A = +1;
        CHECK(allocate(cfg, 0.0, 1.0).A_anti > 0.0);
    }

    SUBCASE("clamping flags saturation") {
        cfg.mode = AllocationMode::OffsetMode;
        const ControlOutput o = allocate(cfg, 100.0, 0.0);
        CHECK(o.saturated);
        CHECK(o.delta_sym == doctest::Approx(-cfg.delta_limit));
    }

    SUBCASE("invalid config is rejected") {
        cfg.sign_yaw_delta = 2;
        CHECK_THROWS_AS(allocate(cfg, 0.0, 0.0), ValidationError);
        cfg = AllocationConfig{};
        CHECK_THROWS_AS(allocate(cfg, std::nan(""), 0.0), AdmissibilityError);
    }
}

TEST_CASE("controller tick pipeline") {
    const ControllerConfig cc = default_controller(AllocationMode::OffsetMode);
    cpg::WingbeatParams base;
    base.zeta = 35.0;
    base.f = 10.0;
    const cpg::SmoothingConfig smoothing =
        cpg::SmoothingConfig::from_cutoff(2.0, 100.0, base.f);

    SUBCASE("level attitude, zero setpoints, neutral modulation") {
        Controller ctl(cc, base, smoothing);
        est::ImuSample s;
        s.accel = {0.0, 0.0, 1.0};
        Telemetry tm{};
        for (int n = 0; n < 300; ++n) {
            s.t = n * 0.01;
            tm = ctl.tick(s, {0.0, 0.0});
        }
        CHECK(std::abs(tm.delta_sym) < 1e-6);
        CHECK(std::abs(tm.delta_anti) < 1e-6);
        CHECK(tm.A_sym == 0.0);
        CHECK(tm.A_anti == 0.0);
        CHECK(tm.flags == 0);
        // wings beat the base pattern
        CHECK(std::abs(tm.y_left) <= base.zeta + 1e-9);
        CHECK(tm.y_left == tm.y_right);
    }

    SUBCASE("stale sample freezes the commands and raises the fault flag") {
        Controller ctl(cc, base, smoothing);
        est::ImuSample s;
        s.accel = {0.0, 0.0, 1.0};
        s.t = 0.0;
        ctl.tick(s, {0.0, 0.0});
        s.t = 0.01;
        const Telemetry before = ctl.tick(s, {0.0, 0.0});
        const Telemetry stale = ctl.tick(s, {0.0, 0.0});  // same timestamp
        CHECK((stale.flags & kFlagStaleSample) != 0);
        CHECK(stale.y_left == before.y_left);
        CHECK(stale.y_right == before.y_right);
    }

    SUBCASE("pitch error drives nose-up offset demand") {
        Controller ctl(cc, base, smoothing);
        est::ImuSample s;
        s.accel = {0.0, 0.0, 1.0};
        Telemetry tm{};
        for (int n = 0; n < 500; ++n) {
            s.t = n * 0.01;
            tm = ctl.tick(s, {10.0, 0.0});  // want nose up from level
        }
        CHECK(tm.u_pitch > 0.0);
        CHECK(tm.delta_sym < 0.0);
    }
}
