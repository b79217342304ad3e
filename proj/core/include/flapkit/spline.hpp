#pragma once

// Closed-contour parameterization with periodic cubic B-splines.
//
// The curve is C(u) = sum_i N_{i,3}(u) P_i on u in [0,1) over a uniform
// periodic knot sequence, fitted to chord-length-parameterized samples by
// least squares under a smoothing budget s = alpha * N (squared pixels).
// Fit quality is scored by nearest-neighbor distances from the data to a
// dense resample of the curve.

#include <cstddef>
#include <span>
#include <vector>

namespace flapkit::wing {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Contour {
    std::vector<Vec2> points;  // ordered, px
    bool closed = true;
};

// Minimum number of samples for a cubic periodic fit.
inline constexpr std::size_t kMinContourPoints = 8;

void validate(const Contour& contour);

// Chord-length parameters: t_1 = 0, cumulative fractions, and a final 1 for
// the closing segment.  Returns N+1 values for N input points.  Consecutive
// duplicate points raise a degenerate-segment error.
std::vector<double> chord_params(const Contour& contour);

// Cox-de Boor recursion; zero-denominator fractions are taken as zero.
// Knot spans are half-open [u_i, u_{i+1}).
double bspline_basis(int i, int p, double u, std::span<const double> knots);

class SplineModel {
public:
    SplineModel() = default;
    explicit SplineModel(std::vector<Vec2> control_points);

    const std::vector<Vec2>& control_points() const { return control_points_; }
    int degree() const { return 3; }
    std::size_t size() const { return control_points_.size(); }

    // Uniform periodic knot vector (i - degree)/n for i = 0 .. n + 2*degree,
    // covering [0,1] with degree knots of overhang on each side.
    std::vector<double> knots() const;

    // C(u); u is wrapped into [0,1).
    Vec2 evaluate(double u) const;

    // M samples at u = k/M, k = 0..M-1.
    std::vector<Vec2> resample(std::size_t M) const;

private:
    std::vector<Vec2> control_points_;
};

struct FitReport {
    std::vector<double> e;      // per-point nearest-neighbor distance, px
    double rms = 0.0;           // sqrt(mean(e^2))
    double p95 = 0.0;           // 95th-percentile error
    std::size_t N = 0;          // data points
    std::size_t n = 0;          // control points
    std::size_t M = 0;          // dense resample size
    double alpha_smooth = 0.0;
};

struct FitResult {
    SplineModel model;
    FitReport report;
};

// Penalized least squares over the periodic cubic basis.  The control-point
// count is the smallest n whose residual sum of squares meets the smoothing
// budget s = alpha_smooth * N; alpha_smooth = 0 requests interpolation
// (n = N).  A positive fixed_n bypasses the selection.  Data parameters come
// from chord_params unless `params` supplies N known values in [0,1) (round
// trips on resampled curves, where chord lengths would re-parameterize the
// geometry).  Ill-conditioned normal systems raise NumericalError naming the
// condition estimate.
FitResult fit_periodic_smoothing_spline(const Contour& contour, double alpha_smooth,
                                        std::size_t fixed_n = 0, std::size_t M = 1000,
                                        std::span<const double> params = {});

// Nearest-neighbor errors of `points` against the dense closed polyline
// (distances to segments, matching the resampled-curve scoring).
FitReport fit_error(std::span<const Vec2> points, std::span<const Vec2> dense_curve);

}  // namespace flapkit::wing
