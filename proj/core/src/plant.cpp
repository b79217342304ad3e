#include "flapkit/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flapkit/error.hpp"
#include "flapkit/star.hpp"

namespace flapkit::plant {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDeg = 180.0 / kPi;
}  // namespace

void validate(const InertiaModel& m) {
    const bool positive = m.I_body_yy > 0 && m.I_body_zz > 0 && m.m_wing > 0 &&
                          m.r_eff > 0 && m.x_w > 0 && m.kappa_x > 0 &&
                          m.m_total > 0 && m.body_length > 0 && m.body_core_height > 0;
    if (!positive)
        throw ValidationError("inertia model: all masses, inertias and lengths must be positive");

    const double phi70 = 70.0 / kDeg;
    const double ratio = inertia_yy_at(m, phi70, 0.0).I / inertia_yy_at(m, 0.0, 0.0).I;
    if (std::abs(ratio - 2.5) > 0.1) {
        std::ostringstream os;
        os << "inertia model: I_yy(70deg)/I_yy(0) = " << ratio
           << " outside the 2.5 +- 0.1 calibration band";
        throw ValidationError(os.str());
    }
    const double x_peak = std::abs(cg_at(m, phi70).x);
    if (std::abs(x_peak - 0.03 * m.body_length) > 0.006 * m.body_length) {
        std::ostringstream os;
        os << "inertia model: peak fore-aft CG " << x_peak
           << " m is not 3% of body length within 20%";
        throw ValidationError(os.str());
    }
}

InertiaModel default_inertia_model() { return InertiaModel{}; }

InertiaSample inertia_yy_at(const InertiaModel& m, double phi, double phi_dot) {
    const double s = std::sin(phi);
    return {m.I_body_yy + 2.0 * m.m_wing * (m.x_w * m.x_w + m.r_eff * m.r_eff * s * s),
            2.0 * m.m_wing * m.r_eff * m.r_eff * std::sin(2.0 * phi) * phi_dot};
}

InertiaSample inertia_zz_at(const InertiaModel& m, double phi, double phi_dot) {
    const double c = std::cos(phi);
    return {m.I_body_zz + 2.0 * m.m_wing * (m.x_w * m.x_w + m.r_eff * m.r_eff * c * c),
            -2.0 * m.m_wing * m.r_eff * m.r_eff * std::sin(2.0 * phi) * phi_dot};
}

CgOffset cg_at(const InertiaModel& m, double phi) {
    const double s = std::sin(phi);
    return {m.kappa_x * s, 2.0 * m.m_wing * m.r_eff * s / m.m_total};
}

void validate(const FtMapConfig& cfg) {
    const auto reject = [](const char* what) {
        throw ValidationError(std::string("force-torque map: ") + what);
    };
    if (!(cfg.c_F_zeta > 0)) reject("c_F_zeta must be > 0 (amplitude enhances force)");
    if (!(cfg.c_F_f > 0)) reject("c_F_f must be > 0 (frequency enhances force)");
    if (!(cfg.c_My_delta < 0)) reject("c_My_delta must be < 0 (upward offset is nose-down)");
    if (!(cfg.c_My_A > 0)) reject("c_My_A must be > 0 (larger A is nose-up)");
    if (!(cfg.c_Mz_danti > 0)) reject("c_Mz_danti must be > 0 (left wing up turns left)");
    if (!(cfg.c_Mz_Aanti < 0)) reject("c_Mz_Aanti must be < 0 (left faster turns right)");
    if (!(cfg.c_Mx_danti > 0)) reject("c_Mx_danti must be > 0");
    if (!(cfg.c_Mx_Aanti > 0)) reject("c_Mx_Aanti must be > 0");
    if (!(cfg.shape_exponent >= 0)) reject("shape exponent must be >= 0");
    if (!(cfg.zeta_ref > 0) || !(cfg.f_ref > 0)) reject("reference point must be positive");
}

FtMapConfig default_ft_map() { return FtMapConfig{}; }

namespace {

struct Channels {
    double zeta, f, delta_sym, delta_anti, A_sym, A_anti;
};

Channels recover_channels(const cpg::WingbeatParams& l, const cpg::WingbeatParams& r) {
    return {0.5 * (l.zeta + r.zeta), 0.5 * (l.f + r.f),
            0.5 * (l.delta + r.delta), 0.5 * (l.delta - r.delta),
            0.5 * (l.A + r.A),         0.5 * (l.A - r.A)};
}

ForceTorque mean_from_channels(const FtMapConfig& cfg, const Channels& ch) {
    ForceTorque ft;
    ft.F[0] = cfg.F_x0 + cfg.c_F_zeta * (ch.zeta - cfg.zeta_ref) +
              cfg.c_F_f * (ch.f - cfg.f_ref);
    ft.F[1] = 0.0;
    ft.F[2] = cfg.F_z0;
    ft.M[0] = cfg.c_Mx_danti * ch.delta_anti + cfg.c_Mx_Aanti * ch.A_anti;
    ft.M[1] = cfg.c_My_delta * ch.delta_sym + cfg.c_My_A * ch.A_sym;
    ft.M[2] = cfg.c_Mz_danti * ch.delta_anti + cfg.c_Mz_Aanti * ch.A_anti;
    return ft;
}

// Closed form of integral_0^{2pi} cos^2(w) / (0.5 + A cos w) dw.
double cos2_over_p_integral(double A) {
    const double a = std::abs(A);
    if (a < 1e-8) return 2.0 * kPi;
    const double b = 0.5;
    return (2.0 * kPi * b / (A * A)) * (b / std::sqrt(b * b - A * A) - 1.0);
}

}  // namespace

double shape_normalization(const FtMapConfig& cfg, double zeta, double f, double A) {
    const double e = cfg.shape_exponent;
    if (e == 0.0) return 1.0;
    if (e == 2.0) {
        // S_bar = zeta^2 pi f^2 * integral(cos^2/p)
        return zeta * zeta * kPi * f * f * cos2_over_p_integral(A);
    }
    // General exponent: (zeta pi f)^e / pi * integral |cos|^e p^{1-e} dw,
    // evaluated with the periodic trapezoid rule.
    const int n = 4096;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = 2.0 * kPi * i / n;
        const double p = 0.5 + A * std::cos(w);
        acc += std::pow(std::abs(std::cos(w)), e) * std::pow(p, 1.0 - e);
    }
    acc *= 2.0 * kPi / n;
    return std::pow(zeta * kPi * f, e) / kPi * acc;
}

ForceTorque ft_map_mean(const FtMapConfig& cfg, const cpg::WingbeatParams& left,
                        const cpg::WingbeatParams& right) {
    return mean_from_channels(cfg, recover_channels(left, right));
}

ForceTorque ft_map(const FtMapConfig& cfg, const cpg::WingbeatParams& left,
                   const cpg::WingbeatParams& right, double omega_phase,
                   double stroke_rate) {
    (void)omega_phase;  // the shape depends on phase only through the passed rate
    const Channels ch = recover_channels(left, right);
    ForceTorque ft = mean_from_channels(cfg, ch);
    const double norm = shape_normalization(cfg, ch.zeta, ch.f, ch.A_sym);
    const double w =
        norm > 0.0 ? std::pow(std::abs(stroke_rate), cfg.shape_exponent) / norm : 1.0;
    for (int i = 0; i < 3; ++i) {
        ft.F[i] *= w;
        ft.M[i] *= w;
    }
    return ft;
}

namespace {

struct Deriv {
    double dtheta, dtheta_dot, dpsi, dpsi_dot, dx, dz, dvx, dvz;
};

Deriv derivative(const BodyState& s, const InertiaModel& model, const ForceTorque& ft,
                 const StrokeSignal& stroke, double t, const DynamicsOptions& opts) {
    const double phi = stroke.phi(t);
    const double phid = stroke.phi_dot(t);
    const InertiaSample iy = inertia_yy_at(model, phi, phid);
    const InertiaSample iz = inertia_zz_at(model, phi, phid);

    double My = ft.M[1];
    if (opts.include_cg_gravity) {
        const CgOffset cg = cg_at(model, phi);
        My += -model.m_total * opts.gravity *
              (cg.x * std::cos(s.theta) - cg.z * std::sin(s.theta));
    }

    Deriv d;
    d.dtheta = s.theta_dot;
    d.dtheta_dot = (My - iy.I_dot * s.theta_dot) / iy.I;
    d.dpsi = s.psi_dot;
    d.dpsi_dot = (ft.M[2] - iz.I_dot * s.psi_dot) / iz.I;

    // body -> world: Rz(psi) * Ry(-theta), theta nose-up positive
    const double ct = std::cos(s.theta), st = std::sin(s.theta);
    const double cp = std::cos(s.psi), sp = std::sin(s.psi);
    const double fx_b = ft.F[0], fy_b = ft.F[1], fz_b = ft.F[2];
    const double fx_i = ct * fx_b + st * fz_b;   // intermediate after Ry(-theta)
    const double fz_i = -st * fx_b + ct * fz_b;
    const double fx_w = cp * fx_i - sp * fy_b;
    const double fz_w = fz_i;

    d.dx = s.vx;
    d.dz = s.vz;
    d.dvx = fx_w / model.m_total;
    d.dvz = fz_w / model.m_total - opts.gravity;
    return d;
}

BodyState axpy(const BodyState& s, const Deriv& d, double h) {
    BodyState r = s;
    r.theta += h * d.dtheta;
    r.theta_dot += h * d.dtheta_dot;
    r.psi += h * d.dpsi;
    r.psi_dot += h * d.dpsi_dot;
    r.x += h * d.dx;
    r.z += h * d.dz;
    r.vx += h * d.dvx;
    r.vz += h * d.dvz;
    return r;
}

bool finite(const BodyState& s) {
    return std::isfinite(s.theta) && std::isfinite(s.theta_dot) &&
           std::isfinite(s.psi) && std::isfinite(s.psi_dot) && std::isfinite(s.x) &&
           std::isfinite(s.z) && std::isfinite(s.vx) && std::isfinite(s.vz);
}

}  // namespace

BodyState dynamics_step(const BodyState& state, const InertiaModel& model,
                        const ForceTorque& ft, const StrokeSignal& stroke, double t,
                        double dt, const DynamicsOptions& opts) {
    if (!(dt > 0.0)) throw AdmissibilityError("dynamics_step requires dt > 0");
    const Deriv k1 = derivative(state, model, ft, stroke, t, opts);
    const Deriv k2 = derivative(axpy(state, k1, 0.5 * dt), model, ft, stroke, t + 0.5 * dt, opts);
    const Deriv k3 = derivative(axpy(state, k2, 0.5 * dt), model, ft, stroke, t + 0.5 * dt, opts);
    const Deriv k4 = derivative(axpy(state, k3, dt), model, ft, stroke, t + dt, opts);

    BodyState out = state;
    const double h = dt / 6.0;
    out.theta += h * (k1.dtheta + 2 * k2.dtheta + 2 * k3.dtheta + k4.dtheta);
    out.theta_dot += h * (k1.dtheta_dot + 2 * k2.dtheta_dot + 2 * k3.dtheta_dot + k4.dtheta_dot);
    out.psi += h * (k1.dpsi + 2 * k2.dpsi + 2 * k3.dpsi + k4.dpsi);
    out.psi_dot += h * (k1.dpsi_dot + 2 * k2.dpsi_dot + 2 * k3.dpsi_dot + k4.dpsi_dot);
    out.x += h * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    out.z += h * (k1.dz + 2 * k2.dz + 2 * k3.dz + k4.dz);
    out.vx += h * (k1.dvx + 2 * k2.dvx + 2 * k3.dvx + k4.dvx);
    out.vz += h * (k1.dvz + 2 * k2.dvz + 2 * k3.dvz + k4.dvz);
    if (!finite(out)) throw NumericalError("dynamics_step produced a non-finite state");
    return out;
}

TrajectoryLog simulate(const ScenarioConfig& scenario) {
    validate(scenario.inertia);
    validate(scenario.ft);
    cpg::validate(scenario.wing);

    const double f_servo = scenario.f_servo;
    const int nsub = std::max(1, static_cast<int>(std::lround(scenario.physics_rate / f_servo)));
    const double dt_phys = 1.0 / (f_servo * nsub);
    const auto n_ticks = static_cast<std::size_t>(std::llround(scenario.duration * f_servo));

    const cpg::SmoothingConfig smoothing =
        cpg::SmoothingConfig::direct(scenario.cpg_alpha, f_servo);

    const bool closed = scenario.mode != ScenarioMode::OpenLoop;
    ctrl::ControllerConfig ctrl_cfg = scenario.controller;
    if (closed) {
        ctrl_cfg.alloc.mode = scenario.mode == ScenarioMode::OffsetMode
                                  ? ctrl::AllocationMode::OffsetMode
                                  : ctrl::AllocationMode::TimingMode;
    }

    // Open loop drives the wing pair directly with the configured command.
    cpg::DualWing open_wing(scenario.wing, smoothing);
    ctrl::Controller controller(ctrl_cfg, scenario.wing, smoothing);

    TrajectoryLog log;
    BodyState body = scenario.initial;
    ForceTorque ft_now;  // instantaneous, body frame; starts at the neutral mean
    {
        cpg::WingbeatParams p = scenario.wing;
        ft_now = ft_map_mean(scenario.ft, p, p);
    }

    const double zeta = scenario.wing.zeta;
    double prev_om_l = 0.0, prev_om_r = 0.0;
    double prev_delta_l = scenario.wing.delta, prev_delta_r = scenario.wing.delta;

    auto setpoint_at = [&](double t) {
        ctrl::Setpoint sp;
        for (const SetpointEntry& e : scenario.setpoints) {
            if (t >= e.t) sp = {e.pitch_ref, e.yaw_ref};
        }
        return sp;
    };

    for (std::size_t n = 0; n < n_ticks; ++n) {
        const double t_tick = static_cast<double>(n) / f_servo;

        // Synthesize the IMU sample seen at this tick from the current state
        // and the instantaneous body-frame force.
        est::ImuSample imu;
        imu.t = t_tick;
        imu.gyro = {body.psi_dot * std::sin(body.theta), -body.theta_dot,
                    body.psi_dot * std::cos(body.theta)};
        const double g = scenario.dynamics.gravity;
        imu.accel = {ft_now.F[0] / (scenario.inertia.m_total * g),
                     ft_now.F[1] / (scenario.inertia.m_total * g),
                     ft_now.F[2] / (scenario.inertia.m_total * g)};

        ctrl::Telemetry tm;
        cpg::DualWingResult wr;
        cpg::WingbeatParams wing_l = scenario.wing, wing_r = scenario.wing;
        const double delta_cap = std::max(0.0, cpg::kDefaultMechLimitDeg - zeta);
        const auto apply_channels = [&](double ds, double da, double as, double aa) {
            // same clamps the oscillator applies, so the force map sees the
            // wing motion actually commanded
            wing_l.delta = std::clamp(ds + da, -delta_cap, delta_cap);
            wing_r.delta = std::clamp(ds - da, -delta_cap, delta_cap);
            wing_l.A = std::clamp(as + aa, -star::kMaxAsymmetry, star::kMaxAsymmetry);
            wing_r.A = std::clamp(as - aa, -star::kMaxAsymmetry, star::kMaxAsymmetry);
        };
        if (closed) {
            tm = controller.tick(imu, setpoint_at(t_tick));
            wr.y_left = tm.y_left;
            wr.y_right = tm.y_right;
            apply_channels(tm.delta_sym, tm.delta_anti, tm.A_sym, tm.A_anti);
        } else {
            const cpg::DualWingCommand& c = scenario.open_loop_command;
            wr = open_wing.step(c);
            tm.t = t_tick;
            tm.y_left = wr.y_left;
            tm.y_right = wr.y_right;
            tm.delta_sym = c.delta_sym;
            tm.delta_anti = c.delta_anti;
            tm.A_sym = c.A_sym;
            tm.A_anti = c.A_anti;
            apply_channels(c.delta_sym, c.delta_anti, c.A_sym, c.A_anti);
        }

        const cpg::DualWing& w = closed ? controller.wing() : open_wing;
        const double om_l_new = w.left().omega;
        const double om_r_new = w.right().omega;
        const double dw_l = om_l_new - prev_om_l;
        const double dw_r = om_r_new - prev_om_r;
        const double delta_l_new = w.left().delta_applied;
        const double delta_r_new = w.right().delta_applied;

        // Linear-in-phase interpolation across the tick for the physics substeps.
        auto phi_left = [&](double tau) {
            return zeta * std::sin(prev_om_l + dw_l * tau) +
                   prev_delta_l + (delta_l_new - prev_delta_l) * tau;
        };
        auto phi_right = [&](double tau) {
            return zeta * std::sin(prev_om_r + dw_r * tau) +
                   prev_delta_r + (delta_r_new - prev_delta_r) * tau;
        };
        StrokeSignal stroke;
        stroke.phi = [&](double t_abs) {
            const double tau = (t_abs - t_tick) * f_servo;
            return 0.5 * (phi_left(tau) + phi_right(tau)) / kDeg;
        };
        stroke.phi_dot = [&](double t_abs) {
            const double tau = (t_abs - t_tick) * f_servo;
            const double dl = zeta * std::cos(prev_om_l + dw_l * tau) * dw_l +
                              (delta_l_new - prev_delta_l);
            const double dr = zeta * std::cos(prev_om_r + dw_r * tau) * dw_r +
                              (delta_r_new - prev_delta_r);
            return 0.5 * (dl + dr) * f_servo / kDeg;
        };

        try {
            for (int k = 0; k < nsub; ++k) {
                const double t_sub = t_tick + k * dt_phys;
                const double tau = (t_sub - t_tick) * f_servo;
                const double om_phase = prev_om_l + dw_l * tau;
                const double rate_l =
                    zeta * std::cos(prev_om_l + dw_l * tau) * dw_l * f_servo;
                ft_now = ft_map(scenario.ft, wing_l, wing_r, om_phase, rate_l);
                body = dynamics_step(body, scenario.inertia, ft_now, stroke, t_sub,
                                     dt_phys, scenario.dynamics);
            }
        } catch (const Error& err) {
            log.aborted = true;
            log.fault = err.what();
            break;
        }

        prev_om_l = om_l_new;
        prev_om_r = om_r_new;
        prev_delta_l = delta_l_new;
        prev_delta_r = delta_r_new;

        const double phi_mean = stroke.phi(t_tick + 1.0 / f_servo);
        const double phid_mean = stroke.phi_dot(t_tick + 1.0 / f_servo);
        const InertiaSample iy = inertia_yy_at(scenario.inertia, phi_mean, phid_mean);

        log.t.push_back(t_tick + 1.0 / f_servo);
        log.phi_left.push_back(wr.y_left);
        log.phi_right.push_back(wr.y_right);
        log.theta.push_back(body.theta * kDeg);
        log.theta_dot.push_back(body.theta_dot * kDeg);
        log.psi.push_back(body.psi * kDeg);
        log.x.push_back(body.x);
        log.z.push_back(body.z);
        log.vx.push_back(body.vx);
        log.vz.push_back(body.vz);
        log.F.push_back(ft_now.F);
        log.M.push_back(ft_now.M);
        log.I_yy.push_back(iy.I);
        log.I_dot.push_back(iy.I_dot);
        log.telemetry.push_back(tm);
    }
    return log;
}

}  // namespace flapkit::plant
