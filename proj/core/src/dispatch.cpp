#include "flapkit/dispatch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "flapkit/bench.hpp"
#include "flapkit/csv.hpp"
#include "flapkit/error.hpp"
#include "flapkit/manifest.hpp"
#include "flapkit/morphometrics.hpp"
#include "flapkit/spline.hpp"
#include "flapkit/star.hpp"

namespace flapkit::cfg {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

namespace fs = std::filesystem;

void require_input_file(const Config& config, const std::string& key, fs::path& out) {
    const std::string p = config.require_string(key);
    out = p;
    if (!fs::exists(out))
        throw ConfigParseError("input file does not exist: " + p, 0, 0);
}

// ---------------------------------------------------------------- star-gen

std::vector<fs::path> run_star_gen(const RunConfig& run) {
    const Config& c = run.config;
    star::StarParams params;
    params.f = c.get_double("star.f", 10.0);
    params.A = c.get_double("star.A", 0.0);
    params.extended = c.get_bool("star.extended", false);
    const std::string variant = c.get_string("star.variant", "cosine");
    if (variant == "sine")
        params.variant = star::Variant::Sine;
    else if (variant != "cosine")
        throw ValidationError("star.variant must be 'cosine' or 'sine'");
    star::validate(params);

    const double duration = c.get_double("star.duration", 2.0);
    const double dt = c.get_double("star.dt", 1e-4);
    if (!(duration > 0.0) || !(dt > 0.0))
        throw ValidationError("star.duration and star.dt must be positive");

    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    star::PhaseState state;
    std::vector<std::vector<double>> rows;
    rows.reserve(steps + 1);
    const auto emit = [&](const star::PhaseState& s) {
        const double p = star::modulation_fn(params.A, s.omega, params.variant);
        rows.push_back({s.t, s.omega, star::phase_rate(params, s.omega), p,
                        std::sin(s.omega)});
    };
    emit(state);
    for (std::size_t i = 0; i < steps; ++i) {
        state = star::integrate_phase(state, params, dt, 1);
        emit(state);
    }

    const fs::path out = run.out_dir / "star_trajectory.csv";
    io::write_csv(out, {"t", "omega", "omega_dot", "p", "y"}, rows);
    return {out};
}

// ----------------------------------------------------------------- cpg-gen

std::vector<fs::path> run_cpg_gen(const RunConfig& run) {
    const Config& c = run.config;
    cpg::WingbeatParams base;
    base.zeta = c.get_double("cpg.zeta", 35.0);
    base.f = c.get_double("cpg.f", 10.0);
    cpg::validate(base);

    const double f_servo = c.get_double("cpg.f_servo", 100.0);
    cpg::SmoothingConfig smoothing =
        c.has("cpg.alpha")
            ? cpg::SmoothingConfig::direct(c.get_double("cpg.alpha", 0.0), f_servo)
            : cpg::SmoothingConfig::from_cutoff(c.get_double("cpg.f_c", 2.0), f_servo,
                                                base.f);

    const double duration = c.get_double("cpg.duration", 2.0);
    const auto ticks = static_cast<std::size_t>(std::llround(duration * f_servo));

    cpg::DualWingCommand cmd;
    cmd.delta_sym = c.get_double("cpg.delta_sym", 0.0);
    cmd.delta_anti = c.get_double("cpg.delta_anti", 0.0);
    cmd.A_sym = c.get_double("cpg.A_sym", 0.0);
    cmd.A_anti = c.get_double("cpg.A_anti", 0.0);

    // optional command schedule (t, delta_sym, delta_anti, A_sym, A_anti)
    std::vector<std::array<double, 5>> schedule;
    if (c.has("cpg.schedule")) {
        fs::path sched_path;
        require_input_file(c, "cpg.schedule", sched_path);
        const io::CsvTable t = io::read_csv(sched_path);
        for (const auto& row : t.rows)
            schedule.push_back({row[t.column("t")], row[t.column("delta_sym")],
                                row[t.column("delta_anti")], row[t.column("A_sym")],
                                row[t.column("A_anti")]});
    }

    cpg::DualWing wing(base, smoothing);
    cpg::ServoCalib calib;
    std::vector<std::vector<double>> rows;
    rows.reserve(ticks);
    for (std::size_t n = 0; n < ticks; ++n) {
        const double t = static_cast<double>(n) / f_servo;
        for (const auto& s : schedule)
            if (t >= s[0]) cmd = {s[1], s[2], s[3], s[4]};
        const cpg::DualWingResult r = wing.step(cmd);
        const cpg::PwmResult pl = cpg::servo_pwm(r.y_left, calib);
        const cpg::PwmResult pr = cpg::servo_pwm(r.y_right, calib);
        rows.push_back({static_cast<double>(n),
                        cmd.A_sym + cmd.A_anti, cmd.A_sym - cmd.A_anti,
                        cmd.delta_sym + cmd.delta_anti, cmd.delta_sym - cmd.delta_anti,
                        r.y_left, r.y_right, pl.pulse_us, pr.pulse_us});
    }

    const fs::path out = run.out_dir / "cpg_stream.csv";
    io::write_csv(out,
                  {"tick", "A_L", "A_R", "delta_L", "delta_R", "y_L", "y_R", "pwm_L",
                   "pwm_R"},
                  rows);
    return {out};
}

// ----------------------------------------------------------------- sim-run

void append_trajectory_csv(const plant::TrajectoryLog& log, const fs::path& out) {
    std::vector<std::vector<double>> rows;
    rows.reserve(log.t.size());
    for (std::size_t i = 0; i < log.t.size(); ++i) {
        const ctrl::Telemetry& tm = log.telemetry[i];
        rows.push_back({log.t[i], log.phi_left[i], log.phi_right[i], log.theta[i],
                        log.theta_dot[i], log.psi[i], log.x[i], log.z[i], log.vx[i],
                        log.vz[i], log.F[i][0], log.F[i][1], log.F[i][2], log.M[i][0],
                        log.M[i][1], log.M[i][2], log.I_yy[i], log.I_dot[i], tm.roll,
                        tm.pitch, tm.yaw, tm.pitch_mean, tm.u_pitch, tm.u_yaw,
                        tm.delta_sym, tm.delta_anti, tm.A_sym, tm.A_anti, tm.y_left,
                        tm.y_right, static_cast<double>(tm.flags)});
    }
    io::write_csv(out,
                  {"t", "phi_L", "phi_R", "theta", "theta_dot", "psi", "x", "z", "vx",
                   "vz", "Fx", "Fy", "Fz", "Mx", "My", "Mz", "I_yy", "I_dot", "roll",
                   "pitch", "yaw", "pitch_mean", "u_pitch", "u_yaw", "delta_sym",
                   "delta_anti", "A_sym", "A_anti", "y_L", "y_R", "flags"},
                  rows);
}

std::vector<fs::path> run_sim(const RunConfig& run) {
    const plant::ScenarioConfig scenario = scenario_from_config(run.config);
    const plant::TrajectoryLog log = plant::simulate(scenario);
    const fs::path out = run.out_dir / "trajectory.csv";
    append_trajectory_csv(log, out);
    if (log.aborted)
        throw Error("simulation aborted: " + log.fault + " (partial log preserved at " +
                    out.string() + ")");
    return {out};
}

std::vector<fs::path> run_sim_sweep(const RunConfig& run) {
    const Config& c = run.config;
    const std::string key = c.require_string("sweep.key");
    const std::vector<double> values = c.get_double_array("sweep.values");
    if (values.empty()) throw ValidationError("sweep.values must be a non-empty array");

    std::vector<fs::path> outputs(values.size());
    std::vector<std::string> faults(values.size());
    std::atomic<std::size_t> next{0};

    const int jobs = std::max(1, run.jobs);
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            Config local = c;
            local.set_override(key + "=" + io::format_double(values[i]));
            try {
                const plant::ScenarioConfig scenario = scenario_from_config(local);
                const plant::TrajectoryLog log = plant::simulate(scenario);
                const fs::path out =
                    run.out_dir / ("trajectory_" + std::to_string(i) + ".csv");
                append_trajectory_csv(log, out);
                outputs[i] = out;
                if (log.aborted) faults[i] = log.fault;
            } catch (const std::exception& e) {
                faults[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<std::vector<double>> summary;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!faults[i].empty())
            throw Error("sweep member " + std::to_string(i) + " failed: " + faults[i]);
        const io::CsvTable t = io::read_csv(outputs[i]);
        const std::vector<double> pitch = t.column_values("pitch_mean");
        const std::vector<double> yaw = t.column_values("yaw");
        summary.push_back({values[i], pitch.empty() ? 0.0 : pitch.back(),
                           yaw.empty() ? 0.0 : yaw.back()});
    }
    const fs::path sum = run.out_dir / "sweep_summary.csv";
    io::write_csv(sum, {"value", "final_pitch_mean", "final_yaw"}, summary);

    std::vector<fs::path> all = outputs;
    all.push_back(sum);
    return all;
}

// ------------------------------------------------------------- fit-contour

std::vector<fs::path> run_fit_contour(const RunConfig& run) {
    const Config& c = run.config;
    fs::path in_path;
    require_input_file(c, "contour.input", in_path);
    const io::CsvTable t = io::read_csv(in_path);
    wing::Contour contour;
    const std::size_t cx = t.column("x");
    const std::size_t cy = t.column("y");
    for (const auto& row : t.rows) contour.points.push_back({row[cx], row[cy]});

    const double alpha = c.get_double("contour.alpha", 0.5);
    const auto fixed_n = static_cast<std::size_t>(c.get_int("contour.n", 0));
    const auto M = static_cast<std::size_t>(c.get_int("contour.resample", 1000));

    const wing::FitResult fit =
        wing::fit_periodic_smoothing_spline(contour, alpha, fixed_n, M);

    std::vector<std::vector<double>> cps;
    for (std::size_t i = 0; i < fit.model.size(); ++i)
        cps.push_back({static_cast<double>(i), fit.model.control_points()[i].x,
                       fit.model.control_points()[i].y});
    const fs::path cp_out = run.out_dir / "control_points.csv";
    io::write_csv(cp_out, {"i", "x", "y"}, cps);

    std::vector<std::vector<double>> dense;
    for (const wing::Vec2& p : fit.model.resample(M)) dense.push_back({p.x, p.y});
    const fs::path curve_out = run.out_dir / "resampled_curve.csv";
    io::write_csv(curve_out, {"x", "y"}, dense);

    const fs::path rep_out = run.out_dir / "fit_report.txt";
    std::ofstream rep(rep_out, std::ios::binary);
    rep << "N = " << fit.report.N << "\n"
        << "n = " << fit.report.n << "\n"
        << "M = " << fit.report.M << "\n"
        << "alpha = " << io::format_double(alpha) << "\n"
        << "rms_px = " << io::format_double(fit.report.rms) << "\n"
        << "p95_px = " << io::format_double(fit.report.p95) << "\n";
    rep.close();

    return {cp_out, curve_out, rep_out};
}

// ----------------------------------------------------------------- metrics

std::vector<fs::path> run_metrics(const RunConfig& run) {
    const Config& c = run.config;
    morpho::MorphoConfig mc;
    mc.m = c.get_double("morpho.m", mc.m);
    mc.b = c.get_double("morpho.b", mc.b);
    mc.S = c.get_double("morpho.S", mc.S);
    mc.c_bar = c.get_double("morpho.c_bar", mc.c_bar);
    mc.V = c.get_double("morpho.V", mc.V);
    mc.f = c.get_double("morpho.f", mc.f);
    mc.nu = c.get_double("morpho.nu", mc.nu);
    mc.g = c.get_double("morpho.g", mc.g);
    const morpho::Morphometrics m = morpho::morphometrics(mc);

    const fs::path out = run.out_dir / "metrics.txt";
    std::ofstream rep(out, std::ios::binary);
    rep << "AR = " << io::format_double(m.aspect_ratio) << "\n"
        << "WL = " << io::format_double(m.wing_loading) << " N/m^2\n"
        << "Re = " << io::format_double(m.reynolds) << "\n"
        << "k = " << io::format_double(m.reduced_frequency) << "\n";
    rep.close();
    return {out};
}

// ------------------------------------------------------------ bench-analyze

std::vector<fs::path> run_bench_analyze(const RunConfig& run) {
    const Config& c = run.config;
    fs::path in_path;
    require_input_file(c, "bench.input", in_path);
    const io::CsvTable t = io::read_csv(in_path);

    bench::FilterSpec spec;
    spec.cutoff = c.get_double("bench.cutoff", 50.0);
    spec.fs = c.get_double("bench.fs", 222.0);
    bench::validate(spec);

    const std::vector<double> pwm = t.column_values("pwm_L");
    const double idle = c.get_double("bench.pwm_idle", pwm.empty() ? 0.0 : pwm.front());
    const double thresh = c.get_double("bench.pwm_threshold", 10.0);
    const auto debounce = static_cast<std::size_t>(c.get_int("bench.debounce", 5));
    const bench::ActiveWindow win = bench::detect_active(pwm, idle, thresh, debounce);
    if (win.empty) throw Error("bench-analyze: no active flapping window detected");

    const char* names[6] = {"Fx", "Fy", "Fz", "Mx", "My", "Mz"};
    std::array<std::vector<double>, 6> filtered;
    for (int ch = 0; ch < 6; ++ch) {
        std::vector<double> raw = t.column_values(names[ch]);
        raw = {raw.begin() + static_cast<std::ptrdiff_t>(win.first),
               raw.begin() + static_cast<std::ptrdiff_t>(win.last + 1)};
        filtered[ch] = bench::butterworth_lowpass(raw, spec);
    }

    // segment on the configured stroke channel (default Fz)
    const std::string stroke_ch = c.get_string("bench.stroke_channel", "Fz");
    std::vector<double> stroke = t.column_values(stroke_ch);
    stroke = {stroke.begin() + static_cast<std::ptrdiff_t>(win.first),
              stroke.begin() + static_cast<std::ptrdiff_t>(win.last + 1)};
    stroke = bench::butterworth_lowpass(stroke, spec);
    const std::vector<std::size_t> bounds =
        bench::segment_cycles(stroke, c.get_double("bench.prominence", 0.0));
    if (bounds.size() < 3) throw Error("bench-analyze: fewer than 2 full cycles");

    const auto grid_points =
        static_cast<std::size_t>(c.get_int("bench.grid_points", 200));

    std::vector<std::vector<double>> profile_rows;
    bench::CycleProfile first_profile;
    std::vector<std::vector<double>> polar_rows;
    std::vector<std::vector<double>> impulse_rows;

    const double fs = spec.fs;
    double mean_T = 0.0;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b)
        mean_T += static_cast<double>(bounds[b + 1] - bounds[b]) / fs;
    mean_T /= static_cast<double>(bounds.size() - 1);

    for (int ch = 0; ch < 6; ++ch) {
        std::vector<std::vector<double>> cycles;
        for (std::size_t b = 0; b + 1 < bounds.size(); ++b)
            cycles.emplace_back(filtered[ch].begin() + static_cast<std::ptrdiff_t>(bounds[b]),
                                filtered[ch].begin() + static_cast<std::ptrdiff_t>(bounds[b + 1] + 1));
        const bench::CycleProfile prof = bench::phase_lock_average(cycles, grid_points);
        if (ch == 0) {
            first_profile = prof;
            profile_rows.resize(grid_points);
            for (std::size_t g = 0; g < grid_points; ++g)
                profile_rows[g] = {prof.grid[g]};
        }
        for (std::size_t g = 0; g < grid_points; ++g) {
            profile_rows[g].push_back(prof.mean[g]);
            profile_rows[g].push_back(prof.var[g]);
        }
        const bench::PolarProfile pol = bench::polar_profile(prof.grid, prof.mean);
        if (ch == 0) {
            polar_rows.resize(grid_points);
            for (std::size_t g = 0; g < grid_points; ++g)
                polar_rows[g] = {pol.theta[g]};
        }
        for (std::size_t g = 0; g < grid_points; ++g)
            polar_rows[g].push_back(pol.radial[g]);

        const bench::Impulse imp = bench::integrate_impulse(prof.mean, mean_T);
        impulse_rows.push_back({static_cast<double>(ch), imp.signed_integral,
                                imp.absolute_integral});
    }

    std::array<std::span<const double>, 6> spans;
    for (int ch = 0; ch < 6; ++ch) spans[ch] = filtered[ch];
    const bench::SweepStats stats = bench::modulation_sweep_stats(spans, bounds);

    const fs::path prof_out = run.out_dir / "cycle_profiles.csv";
    io::write_csv(prof_out,
                  {"t_norm", "Fx_mean", "Fx_var", "Fy_mean", "Fy_var", "Fz_mean",
                   "Fz_var", "Mx_mean", "Mx_var", "My_mean", "My_var", "Mz_mean",
                   "Mz_var"},
                  profile_rows);
    const fs::path polar_out = run.out_dir / "polar_profiles.csv";
    io::write_csv(polar_out,
                  {"theta", "Fx", "Fy", "Fz", "Mx", "My", "Mz"}, polar_rows);
    const fs::path imp_out = run.out_dir / "impulses.csv";
    io::write_csv(imp_out, {"channel", "signed", "absolute"}, impulse_rows);

    std::vector<std::vector<double>> stat_rows;
    for (int ch = 0; ch < 6; ++ch)
        stat_rows.push_back({static_cast<double>(ch), stats.channels[ch].mean,
                             stats.channels[ch].stdev});
    const fs::path stats_out = run.out_dir / "sweep_stats.csv";
    io::write_csv(stats_out, {"channel", "mean", "std"}, stat_rows);

    return {prof_out, polar_out, imp_out, stats_out};
}

}  // namespace

plant::ScenarioConfig scenario_from_config(const Config& c) {
    plant::ScenarioConfig s;
    const std::string mode = c.get_string("scenario.mode", "offset");
    if (mode == "open-loop")
        s.mode = plant::ScenarioMode::OpenLoop;
    else if (mode == "offset")
        s.mode = plant::ScenarioMode::OffsetMode;
    else if (mode == "timing")
        s.mode = plant::ScenarioMode::TimingMode;
    else
        throw ValidationError("scenario.mode must be open-loop, offset or timing");

    s.duration = c.get_double("scenario.duration", 10.0);
    s.physics_rate = c.get_double("scenario.physics_rate", 1000.0);
    if (!(s.duration > 0.0) || !(s.physics_rate > 0.0))
        throw ValidationError("scenario duration and physics_rate must be positive");

    s.wing.zeta = c.get_double("wing.zeta", 35.0);
    s.wing.f = c.get_double("wing.f", 10.0);
    cpg::validate(s.wing);

    s.f_servo = c.get_double("cpg.f_servo", 100.0);
    if (c.has("cpg.alpha")) {
        s.cpg_alpha = cpg::SmoothingConfig::direct(c.get_double("cpg.alpha", 0.0),
                                                   s.f_servo).alpha;
    } else {
        s.cpg_alpha = cpg::SmoothingConfig::from_cutoff(c.get_double("cpg.f_c", 2.0),
                                                        s.f_servo, s.wing.f).alpha;
    }

    s.inertia.I_body_yy = c.get_double("inertia.I_body_yy", s.inertia.I_body_yy);
    s.inertia.I_body_zz = c.get_double("inertia.I_body_zz", s.inertia.I_body_zz);
    s.inertia.m_wing = c.get_double("inertia.m_wing", s.inertia.m_wing);
    s.inertia.r_eff = c.get_double("inertia.r_eff", s.inertia.r_eff);
    s.inertia.x_w = c.get_double("inertia.x_w", s.inertia.x_w);
    s.inertia.kappa_x = c.get_double("inertia.kappa_x", s.inertia.kappa_x);
    s.inertia.m_total = c.get_double("inertia.m_total", s.inertia.m_total);
    s.inertia.body_length = c.get_double("inertia.body_length", s.inertia.body_length);
    s.inertia.body_core_height =
        c.get_double("inertia.body_core_height", s.inertia.body_core_height);
    plant::validate(s.inertia);

    s.ft.F_x0 = c.get_double("ft.F_x0", s.ft.F_x0);
    s.ft.F_z0 = c.get_double("ft.F_z0", s.ft.F_z0);
    s.ft.zeta_ref = c.get_double("ft.zeta_ref", s.ft.zeta_ref);
    s.ft.f_ref = c.get_double("ft.f_ref", s.ft.f_ref);
    s.ft.c_F_zeta = c.get_double("ft.c_F_zeta", s.ft.c_F_zeta);
    s.ft.c_F_f = c.get_double("ft.c_F_f", s.ft.c_F_f);
    s.ft.c_My_delta = c.get_double("ft.c_My_delta", s.ft.c_My_delta);
    s.ft.c_My_A = c.get_double("ft.c_My_A", s.ft.c_My_A);
    s.ft.c_Mz_danti = c.get_double("ft.c_Mz_danti", s.ft.c_Mz_danti);
    s.ft.c_Mz_Aanti = c.get_double("ft.c_Mz_Aanti", s.ft.c_Mz_Aanti);
    s.ft.c_Mx_danti = c.get_double("ft.c_Mx_danti", s.ft.c_Mx_danti);
    s.ft.c_Mx_Aanti = c.get_double("ft.c_Mx_Aanti", s.ft.c_Mx_Aanti);
    s.ft.shape_exponent = c.get_double("ft.shape_exponent", s.ft.shape_exponent);
    plant::validate(s.ft);

    const auto mode_default = s.mode == plant::ScenarioMode::TimingMode
                                  ? ctrl::AllocationMode::TimingMode
                                  : ctrl::AllocationMode::OffsetMode;
    s.controller = ctrl::default_controller(mode_default);
    s.controller.pitch_gains.kp = c.get_double("pid.pitch_kp", s.controller.pitch_gains.kp);
    s.controller.pitch_gains.ki = c.get_double("pid.pitch_ki", s.controller.pitch_gains.ki);
    s.controller.pitch_gains.kd = c.get_double("pid.pitch_kd", s.controller.pitch_gains.kd);
    s.controller.yaw_gains.kp = c.get_double("pid.yaw_kp", s.controller.yaw_gains.kp);
    s.controller.rls_lambda = c.get_double("estimator.lambda", 0.8);
    s.controller.madgwick_beta = c.get_double("estimator.beta", 0.1);
    s.controller.alloc.k_pitch_to_delta =
        c.get_double("alloc.k_pitch_to_delta", s.controller.alloc.k_pitch_to_delta);
    s.controller.alloc.k_yaw_to_delta =
        c.get_double("alloc.k_yaw_to_delta", s.controller.alloc.k_yaw_to_delta);
    s.controller.alloc.k_pitch_to_A =
        c.get_double("alloc.k_pitch_to_A", s.controller.alloc.k_pitch_to_A);
    s.controller.alloc.k_yaw_to_A =
        c.get_double("alloc.k_yaw_to_A", s.controller.alloc.k_yaw_to_A);
    s.controller.alloc.A_trim = c.get_double("alloc.A_trim", 0.0);
    s.controller.alloc.sign_yaw_delta =
        static_cast<int>(c.get_int("alloc.sign_yaw_delta", +1));
    s.controller.alloc.sign_yaw_A = static_cast<int>(c.get_int("alloc.sign_yaw_A", -1));
    ctrl::validate(s.controller.alloc);

    s.open_loop_command.delta_sym = c.get_double("command.delta_sym", 0.0);
    s.open_loop_command.delta_anti = c.get_double("command.delta_anti", 0.0);
    s.open_loop_command.A_sym = c.get_double("command.A_sym", 0.0);
    s.open_loop_command.A_anti = c.get_double("command.A_anti", 0.0);
    if (std::abs(s.open_loop_command.A_sym) + std::abs(s.open_loop_command.A_anti) >
        star::kMaxAsymmetry)
        throw ValidationError(
            "open-loop command violates the |A| <= 0.49 admissibility bound");

    const std::vector<double> step_t = c.get_double_array("setpoint.t");
    const std::vector<double> step_pitch = c.get_double_array("setpoint.pitch_ref");
    const std::vector<double> step_yaw = c.get_double_array("setpoint.yaw_ref");
    if (!step_t.empty()) {
        if (step_pitch.size() != step_t.size() || step_yaw.size() != step_t.size())
            throw ValidationError("setpoint arrays t/pitch_ref/yaw_ref must align");
        s.setpoints.clear();
        for (std::size_t i = 0; i < step_t.size(); ++i)
            s.setpoints.push_back({step_t[i], step_pitch[i], step_yaw[i]});
        std::sort(s.setpoints.begin(), s.setpoints.end(),
                  [](const auto& a, const auto& b) { return a.t < b.t; });
    }

    s.initial.theta = c.get_double("initial.theta_deg", 0.0) * kPi / 180.0;
    s.initial.theta_dot = c.get_double("initial.theta_dot_deg", 0.0) * kPi / 180.0;
    s.initial.psi = c.get_double("initial.psi_deg", 0.0) * kPi / 180.0;
    s.dynamics.include_cg_gravity = c.get_bool("dynamics.cg_gravity", true);
    return s;
}

int dispatch(const RunConfig& run) {
    std::filesystem::create_directories(run.out_dir);
    std::vector<std::filesystem::path> outputs;
    switch (run.command) {
        case Command::StarGen: outputs = run_star_gen(run); break;
        case Command::CpgGen: outputs = run_cpg_gen(run); break;
        case Command::SimRun: outputs = run_sim(run); break;
        case Command::SimSweep: outputs = run_sim_sweep(run); break;
        case Command::FitContour: outputs = run_fit_contour(run); break;
        case Command::Metrics: outputs = run_metrics(run); break;
        case Command::BenchAnalyze: outputs = run_bench_analyze(run); break;
    }
    io::write_manifest(run.out_dir, command_name(run.command), run.seed, run.config,
                       outputs);
    return kExitOk;
}

}  // namespace flapkit::cfg
