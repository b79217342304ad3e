#include <benchmark/benchmark.h>

#include "flapkit/bench.hpp"
#include "flapkit/cpg.hpp"
#include "flapkit/estimation.hpp"
#include "flapkit/plant.hpp"
#include "flapkit/spline.hpp"
#include "flapkit/star.hpp"

namespace {

void bm_cpg_step(benchmark::State& state) {
    using namespace flapkit;
    cpg::WingbeatParams p;
    p.A = 0.3;
    const cpg::SmoothingConfig cfg = cpg::SmoothingConfig::from_cutoff(2.0, 100.0);
    cpg::OscState s = cpg::OscState::seeded(p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cpg::cpg_step(s, p, cfg));
    }
}
BENCHMARK(bm_cpg_step);

void bm_integrate_phase(benchmark::State& state) {
    using namespace flapkit;
    star::StarParams p;
    p.A = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(star::integrate_phase({0.0, 0.0}, p, 1e-4, 1000));
    }
}
BENCHMARK(bm_integrate_phase);

void bm_madgwick(benchmark::State& state) {
    using namespace flapkit;
    est::Quat q;
    est::ImuSample s;
    s.gyro = {0.1, 0.2, 0.3};
    s.accel = {0.0, 0.05, 0.999};
    for (auto _ : state) {
        q = est::madgwick_update(q, s, 0.1, 0.01).q;
        benchmark::DoNotOptimize(q);
    }
}
BENCHMARK(bm_madgwick);

void bm_rls(benchmark::State& state) {
    using namespace flapkit;
    est::RlsState rls = est::RlsState::with_lambda(0.995);
    est::PhaseAccumulator acc;
    double y = 1.0;
    for (auto _ : state) {
        const Eigen::Vector3d reg = est::adaptive_regressor(acc, 62.8, 0.01);
        benchmark::DoNotOptimize(est::rls_update(rls, y, reg));
    }
}
BENCHMARK(bm_rls);

void bm_spline_eval(benchmark::State& state) {
    using namespace flapkit;
    std::vector<wing::Vec2> cps;
    for (int i = 0; i < 22; ++i)
        cps.push_back({std::cos(2 * 3.14159 * i / 22.0), std::sin(2 * 3.14159 * i / 22.0)});
    const wing::SplineModel m(cps);
    double u = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m.evaluate(u));
        u += 0.001;
        if (u >= 1.0) u -= 1.0;
    }
}
BENCHMARK(bm_spline_eval);

void bm_butterworth(benchmark::State& state) {
    using namespace flapkit;
    std::vector<double> signal(2220);
    for (std::size_t i = 0; i < signal.size(); ++i)
        signal[i] = std::sin(2 * 3.14159 * 8.0 * i / 222.0);
    const bench::FilterSpec spec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bench::butterworth_lowpass(signal, spec));
    }
}
BENCHMARK(bm_butterworth);

void bm_dynamics_step(benchmark::State& state) {
    using namespace flapkit;
    const plant::InertiaModel model;
    plant::BodyState body;
    body.theta_dot = 0.1;
    plant::ForceTorque ft;
    plant::StrokeSignal stroke;
    stroke.phi = [](double t) { return 0.6 * std::sin(62.8 * t); };
    stroke.phi_dot = [](double t) { return 0.6 * 62.8 * std::cos(62.8 * t); };
    double t = 0.0;
    for (auto _ : state) {
        body = plant::dynamics_step(body, model, ft, stroke, t, 1e-3);
        benchmark::DoNotOptimize(body);
        t += 1e-3;
    }
}
BENCHMARK(bm_dynamics_step);

}  // namespace

BENCHMARK_MAIN();
