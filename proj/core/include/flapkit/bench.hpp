#pragma once

// Test-stand data reduction: activity detection, zero-phase Butterworth
// filtering, stroke-cycle segmentation, phase-locked averaging, inertial
// subtraction, impulse integration, polar transform, bending-angle geometry
// and per-setting sweep statistics.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flapkit::bench {

struct FilterSpec {
    int order = 4;
    double cutoff = 50.0;  // Hz
    double fs = 222.0;     // Hz
};

void validate(const FilterSpec& spec);

struct ActiveWindow {
    std::size_t first = 0;
    std::size_t last = 0;   // inclusive
    bool empty = true;
};

// First/last indices where |pwm - idle| > threshold sustained for at least
// `debounce` consecutive samples.  No activity yields an empty window.
ActiveWindow detect_active(std::span<const double> pwm, double idle, double threshold,
                           std::size_t debounce);

// Zero-phase (forward-backward) Butterworth low-pass via bilinear transform
// with prewarping; the effective magnitude response is the squared one-pass
// response.  Ends are handled with odd reflection padding and steady-state
// filter initialization.
std::vector<double> butterworth_lowpass(std::span<const double> signal,
                                        const FilterSpec& spec);

// Stroke-reversal indices of one kind (maxima), located by first-difference
// sign changes confirmed by negative second-difference curvature, with a
// hysteresis prominence threshold.  prominence <= 0 selects half the signal
// peak-to-peak range.  Throws on constant signals.
std::vector<std::size_t> segment_cycles(std::span<const double> stroke,
                                        double prominence = 0.0);

struct CycleProfile {
    std::vector<double> grid;   // normalized time in [0,1]
    std::vector<double> mean;
    std::vector<double> var;    // across-cycle variance (undefined for 1 cycle)
    std::size_t n_cycles = 0;
    bool var_defined = false;
};

inline constexpr std::size_t kDefaultGridPoints = 200;

// Resamples each cycle to the common grid (linear interpolation) and takes
// the pointwise mean and unbiased variance across cycles.
CycleProfile phase_lock_average(const std::vector<std::vector<double>>& cycles,
                                std::size_t grid_points = kDefaultGridPoints);

// Pointwise difference of means; variances add (independent recordings).
// Profiles on different grids are resampled to the intact grid first.
CycleProfile subtract_inertial(const CycleProfile& intact,
                               const CycleProfile& perforated);

struct Impulse {
    double signed_integral = 0.0;    // N s over the cycle
    double absolute_integral = 0.0;  // integral of |signal|
};

// Trapezoidal rule over the cycle duration on a uniform grid.
Impulse integrate_impulse(std::span<const double> profile, double T_cycle);

struct PolarProfile {
    std::vector<double> theta;   // rad, 2*pi*t_norm
    std::vector<double> radial;  // value + offset, offset = max(0, -min)
    double offset = 0.0;
};

PolarProfile polar_profile(std::span<const double> grid, std::span<const double> value);

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct MarkerFrame {
    std::vector<Vec3> proximal;
    std::vector<Vec3> distal;
};

struct BendingResult {
    std::vector<double> angle_deg;   // per frame
    std::vector<bool> flagged;       // collapsed segment after projection
    double max_down = 0.0;           // max over downstroke frames
    double max_up = 0.0;             // max over upstroke frames
};

// Projects markers onto the plane orthogonal to the rotation axis and
// measures the angle between the proximal and distal segment directions.
// stroke_angle labels half-strokes: increasing stroke angle = downstroke.
BendingResult bending_angle(const std::vector<MarkerFrame>& frames, const Vec3& axis,
                            std::span<const double> stroke_angle);

struct SweepChannelStats {
    double mean = 0.0;   // mean of per-cycle averages
    double stdev = 0.0;  // std across cycles
};

struct SweepStats {
    std::array<SweepChannelStats, 6> channels{};  // Fx Fy Fz Mx My Mz
    std::size_t cycles_used = 0;
    std::vector<std::string> warnings;
};

// Selects the middle 40 of 80 cycles (middle half with a warning when fewer),
// averages each cycle per channel, then reports mean and std across the
// selected cycle averages.  Fewer than 4 cycles is an error.
SweepStats modulation_sweep_stats(const std::array<std::span<const double>, 6>& channels,
                                  std::span<const std::size_t> boundaries);

}  // namespace flapkit::bench
