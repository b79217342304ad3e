#include "flapkit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "flapkit/error.hpp"

namespace flapkit::bench {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDeg = 180.0 / kPi;
}

void validate(const FilterSpec& spec) {
    if (spec.order != 4)
        throw ValidationError("filter: only the 4th-order Butterworth is provided");
    if (!(spec.fs > 0)) throw ValidationError("filter: sample rate must be positive");
    if (!(spec.cutoff > 0) || spec.cutoff >= 0.5 * spec.fs) {
        std::ostringstream os;
        os << "filter: cutoff " << spec.cutoff << " Hz must lie in (0, fs/2) at fs = "
           << spec.fs;
        throw ValidationError(os.str());
    }
}

ActiveWindow detect_active(std::span<const double> pwm, double idle, double threshold,
                           std::size_t debounce) {
    if (pwm.empty()) throw ValidationError("detect_active: empty series");
    if (debounce == 0) debounce = 1;

    ActiveWindow w;
    std::size_t run = 0;
    for (std::size_t i = 0; i < pwm.size(); ++i) {
        if (std::abs(pwm[i] - idle) > threshold) {
            ++run;
            if (run >= debounce) {
                const std::size_t start = i + 1 - run;
                if (w.empty) {
                    w.first = start;
                    w.empty = false;
                }
                w.last = i;
            }
        } else {
            run = 0;
        }
    }
    return w;
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
};

// 4th-order Butterworth low-pass as two bilinear-transformed biquads with
// prewarped cutoff.
std::array<Biquad, 2> design_butterworth4(double cutoff, double fs) {
    const double K = 1.0 / std::tan(kPi * cutoff / fs);
    // conjugate analog pole pairs: s^2 + 2*cos(theta_k)*s + 1
    const double q[2] = {2.0 * std::cos(kPi / 8.0), 2.0 * std::cos(3.0 * kPi / 8.0)};
    std::array<Biquad, 2> sec{};
    for (int k = 0; k < 2; ++k) {
        const double a0 = K * K + q[k] * K + 1.0;
        sec[k].b0 = 1.0 / a0;
        sec[k].b1 = 2.0 / a0;
        sec[k].b2 = 1.0 / a0;
        sec[k].a1 = (2.0 - 2.0 * K * K) / a0;
        sec[k].a2 = (K * K - q[k] * K + 1.0) / a0;
    }
    return sec;
}

// One-direction pass through both sections with steady-state initialization
// (transposed direct form II).
void filter_once(std::vector<double>& x, const std::array<Biquad, 2>& sec) {
    for (const Biquad& s : sec) {
        // steady-state per unit DC input
        const double z2_unit = s.b2 - s.a2;
        const double z1_unit = s.b1 - s.a1 + z2_unit;
        double z1 = z1_unit * x.front();
        double z2 = z2_unit * x.front();
        for (double& v : x) {
            const double y = s.b0 * v + z1;
            z1 = s.b1 * v - s.a1 * y + z2;
            z2 = s.b2 * v - s.a2 * y;
            v = y;
        }
    }
}

}  // namespace

std::vector<double> butterworth_lowpass(std::span<const double> signal,
                                        const FilterSpec& spec) {
    validate(spec);
    if (signal.empty()) return {};
    const auto sec = design_butterworth4(spec.cutoff, spec.fs);

    const std::size_t pad = std::min<std::size_t>(15, signal.size() - 1);
    std::vector<double> ext;
    ext.reserve(signal.size() + 2 * pad);
    // odd reflection about the end samples
    for (std::size_t i = pad; i >= 1; --i)
        ext.push_back(2.0 * signal.front() - signal[i]);
    ext.insert(ext.end(), signal.begin(), signal.end());
    for (std::size_t i = 2; i <= pad + 1; ++i)
        ext.push_back(2.0 * signal.back() - signal[signal.size() - i]);

    filter_once(ext, sec);
    std::reverse(ext.begin(), ext.end());
    filter_once(ext, sec);
    std::reverse(ext.begin(), ext.end());

    return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
            ext.begin() + static_cast<std::ptrdiff_t>(pad + signal.size())};
}

std::vector<std::size_t> segment_cycles(std::span<const double> stroke,
                                        double prominence) {
    if (stroke.size() < 3) throw ValidationError("segment_cycles: series too short");
    const auto [mn_it, mx_it] = std::minmax_element(stroke.begin(), stroke.end());
    const double range = *mx_it - *mn_it;
    if (range == 0.0)
        throw ValidationError("segment_cycles: constant signal has no cycles");
    const double h = prominence > 0.0 ? prominence : 0.5 * range / 2.0;

    // Alternating-extrema hysteresis: a maximum counts once the signal has
    // dropped h below the running candidate, confirmed by local curvature.
    enum class Mode { Unknown, SeekMax, SeekMin };
    std::vector<std::size_t> maxima;
    Mode mode = Mode::Unknown;
    std::size_t imax = 0, imin = 0;
    const auto confirm_max = [&](std::size_t cand) {
        if (cand > 0 && cand + 1 < stroke.size() &&
            stroke[cand + 1] - 2.0 * stroke[cand] + stroke[cand - 1] <= 0.0)
            maxima.push_back(cand);
    };
    for (std::size_t i = 1; i < stroke.size(); ++i) {
        const double v = stroke[i];
        switch (mode) {
            case Mode::Unknown:
                if (v > stroke[imax]) imax = i;
                if (v < stroke[imin]) imin = i;
                if (stroke[imax] - v > h) {
                    confirm_max(imax);
                    mode = Mode::SeekMin;
                    imin = i;
                } else if (v - stroke[imin] > h) {
                    mode = Mode::SeekMax;
                    imax = i;
                }
                break;
            case Mode::SeekMax:
                if (v > stroke[imax]) imax = i;
                if (stroke[imax] - v > h) {
                    confirm_max(imax);
                    mode = Mode::SeekMin;
                    imin = i;
                }
                break;
            case Mode::SeekMin:
                if (v < stroke[imin]) imin = i;
                if (v - stroke[imin] > h) {
                    mode = Mode::SeekMax;
                    imax = i;
                }
                break;
        }
    }
    return maxima;
}

namespace {

std::vector<double> resample_to_grid(std::span<const double> cycle,
                                     std::size_t grid_points) {
    std::vector<double> out(grid_points);
    const std::size_t n = cycle.size();
    if (n == 1) {
        std::fill(out.begin(), out.end(), cycle[0]);
        return out;
    }
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double pos = static_cast<double>(g) / static_cast<double>(grid_points - 1) *
                           static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double w = pos - std::floor(pos);
        out[g] = (1.0 - w) * cycle[lo] + w * cycle[hi];
    }
    return out;
}

}  // namespace

CycleProfile phase_lock_average(const std::vector<std::vector<double>>& cycles,
                                std::size_t grid_points) {
    if (cycles.empty()) throw ValidationError("phase_lock_average: no cycles");
    CycleProfile prof;
    prof.grid.resize(grid_points);
    for (std::size_t g = 0; g < grid_points; ++g)
        prof.grid[g] = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    prof.n_cycles = cycles.size();
    prof.mean.assign(grid_points, 0.0);
    prof.var.assign(grid_points, 0.0);

    std::vector<std::vector<double>> resampled;
    resampled.reserve(cycles.size());
    for (const auto& c : cycles) {
        if (c.empty()) throw ValidationError("phase_lock_average: empty cycle");
        resampled.push_back(resample_to_grid(c, grid_points));
    }
    for (std::size_t g = 0; g < grid_points; ++g) {
        double s = 0.0;
        for (const auto& c : resampled) s += c[g];
        prof.mean[g] = s / static_cast<double>(cycles.size());
    }
    if (cycles.size() >= 2) {
        prof.var_defined = true;
        for (std::size_t g = 0; g < grid_points; ++g) {
            double ss = 0.0;
            for (const auto& c : resampled) {
                const double d = c[g] - prof.mean[g];
                ss += d * d;
            }
            prof.var[g] = ss / static_cast<double>(cycles.size() - 1);
        }
    }
    return prof;
}

CycleProfile subtract_inertial(const CycleProfile& intact,
                               const CycleProfile& perforated) {
    if (intact.mean.empty() || perforated.mean.empty())
        throw ValidationError("subtract_inertial: empty profile");
    CycleProfile aero;
    aero.grid = intact.grid;
    aero.n_cycles = intact.n_cycles;
    aero.var_defined = intact.var_defined && perforated.var_defined;

    std::vector<double> pmean = perforated.mean;
    std::vector<double> pvar = perforated.var;
    if (perforated.grid.size() != intact.grid.size()) {
        pmean = resample_to_grid(perforated.mean, intact.grid.size());
        pvar = resample_to_grid(perforated.var, intact.grid.size());
    }
    aero.mean.resize(intact.mean.size());
    aero.var.resize(intact.mean.size());
    for (std::size_t g = 0; g < intact.mean.size(); ++g) {
        aero.mean[g] = intact.mean[g] - pmean[g];
        aero.var[g] = intact.var[g] + pvar[g];
    }
    return aero;
}

Impulse integrate_impulse(std::span<const double> profile, double T_cycle) {
    if (profile.size() < 2)
        throw ValidationError("integrate_impulse: need at least two samples");
    const double dx = T_cycle / static_cast<double>(profile.size() - 1);
    Impulse imp;
    for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
        imp.signed_integral += 0.5 * (profile[i] + profile[i + 1]) * dx;
        imp.absolute_integral +=
            0.5 * (std::abs(profile[i]) + std::abs(profile[i + 1])) * dx;
    }
    return imp;
}

PolarProfile polar_profile(std::span<const double> grid, std::span<const double> value) {
    if (grid.size() != value.size())
        throw ValidationError("polar_profile: grid/value size mismatch");
    PolarProfile p;
    p.theta.reserve(grid.size());
    p.radial.reserve(grid.size());
    const double mn = value.empty() ? 0.0 : *std::min_element(value.begin(), value.end());
    p.offset = std::max(0.0, -mn);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p.theta.push_back(2.0 * kPi * grid[i]);
        p.radial.push_back(value[i] + p.offset);
    }
    return p;
}

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 project_off_axis(const Vec3& v, const Vec3& axis_unit) {
    const double d = dot(v, axis_unit);
    return {v.x - d * axis_unit.x, v.y - d * axis_unit.y, v.z - d * axis_unit.z};
}

}  // namespace

BendingResult bending_angle(const std::vector<MarkerFrame>& frames, const Vec3& axis,
                            std::span<const double> stroke_angle) {
    const double an = norm(axis);
    if (!(an > 0.0)) throw ValidationError("bending_angle: degenerate rotation axis");
    if (stroke_angle.size() != frames.size())
        throw ValidationError("bending_angle: stroke series must match frame count");
    const Vec3 a{axis.x / an, axis.y / an, axis.z / an};

    BendingResult out;
    out.angle_deg.reserve(frames.size());
    out.flagged.reserve(frames.size());
    constexpr double kEps = 1e-12;

    for (const MarkerFrame& f : frames) {
        if (f.proximal.size() < 2 || f.distal.size() < 2)
            throw ValidationError("bending_angle: need >= 2 markers per segment");
        const Vec3 pd = project_off_axis(sub(f.proximal.back(), f.proximal.front()), a);
        const Vec3 dd = project_off_axis(sub(f.distal.back(), f.distal.front()), a);
        const double np = norm(pd);
        const double nd = norm(dd);
        if (np < kEps || nd < kEps) {
            out.angle_deg.push_back(0.0);
            out.flagged.push_back(true);
            continue;
        }
        const double c = std::clamp(dot(pd, dd) / (np * nd), -1.0, 1.0);
        out.angle_deg.push_back(std::acos(c) * kDeg);
        out.flagged.push_back(false);
    }

    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        if (out.flagged[i]) continue;
        const bool down = stroke_angle[i + 1] > stroke_angle[i];
        double& m = down ? out.max_down : out.max_up;
        m = std::max(m, out.angle_deg[i]);
    }
    return out;
}

SweepStats modulation_sweep_stats(const std::array<std::span<const double>, 6>& channels,
                                  std::span<const std::size_t> boundaries) {
    if (boundaries.size() < 2)
        throw ValidationError("sweep stats: need at least one full cycle");
    const std::size_t n_cycles = boundaries.size() - 1;
    if (n_cycles < 4) throw ValidationError("sweep stats: fewer than 4 cycles");

    SweepStats out;
    std::size_t use = 40;
    std::size_t start;
    if (n_cycles >= 80) {
        start = (n_cycles - use) / 2;
    } else {
        use = n_cycles / 2;
        start = (n_cycles - use) / 2;
        std::ostringstream os;
        os << "only " << n_cycles << " cycles available; using the middle " << use;
        out.warnings.push_back(os.str());
    }
    out.cycles_used = use;

    for (std::size_t ch = 0; ch < 6; ++ch) {
        std::vector<double> cycle_means;
        cycle_means.reserve(use);
        for (std::size_t c = start; c < start + use; ++c) {
            const std::size_t b0 = boundaries[c];
            const std::size_t b1 = boundaries[c + 1];
            if (b1 <= b0 || b1 > channels[ch].size())
                throw ValidationError("sweep stats: cycle boundary out of range");
            const double s = std::accumulate(channels[ch].begin() + static_cast<std::ptrdiff_t>(b0),
                                             channels[ch].begin() + static_cast<std::ptrdiff_t>(b1), 0.0);
            cycle_means.push_back(s / static_cast<double>(b1 - b0));
        }
        double mean = std::accumulate(cycle_means.begin(), cycle_means.end(), 0.0) /
                      static_cast<double>(cycle_means.size());
        double ss = 0.0;
        for (double v : cycle_means) ss += (v - mean) * (v - mean);
        out.channels[ch].mean = mean;
        out.channels[ch].stdev =
            cycle_means.size() > 1
                ? std::sqrt(ss / static_cast<double>(cycle_means.size() - 1))
                : 0.0;
    }
    return out;
}

}  // namespace flapkit::bench
