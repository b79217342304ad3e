#include "flapkit/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "flapkit/error.hpp"

namespace flapkit::wing {

void validate(const Contour& contour) {
    if (contour.points.size() < kMinContourPoints) {
        std::ostringstream os;
        os << "contour has " << contour.points.size() << " points; need at least "
           << kMinContourPoints << " for a cubic periodic fit";
        throw ValidationError(os.str());
    }
}

std::vector<double> chord_params(const Contour& contour) {
    validate(contour);
    const auto& pts = contour.points;
    const std::size_t N = pts.size();
    std::vector<double> seg(N);
    double total = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const Vec2& a = pts[k];
        const Vec2& b = pts[(k + 1) % N];  // closing segment wraps to the start
        const double d = std::hypot(b.x - a.x, b.y - a.y);
        if (d == 0.0 && k + 1 < N) {
            std::ostringstream os;
            os << "degenerate segment: points " << k << " and " << k + 1
               << " coincide";
            throw ValidationError(os.str());
        }
        seg[k] = d;
        total += d;
    }
    if (total == 0.0) throw ValidationError("contour has zero total chord length");

    std::vector<double> t(N + 1);
    t[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        acc += seg[k];
        t[k + 1] = acc / total;
    }
    t[N] = 1.0;
    return t;
}

double bspline_basis(int i, int p, double u, std::span<const double> knots) {
    const auto idx = [&](int j) -> double {
        if (j < 0 || j >= static_cast<int>(knots.size()))
            throw AdmissibilityError("bspline_basis: knot index out of range");
        return knots[j];
    };
    if (p == 0) return (u >= idx(i) && u < idx(i + 1)) ? 1.0 : 0.0;

    double left = 0.0;
    const double den_l = idx(i + p) - idx(i);
    if (den_l != 0.0) left = (u - idx(i)) / den_l * bspline_basis(i, p - 1, u, knots);

    double right = 0.0;
    const double den_r = idx(i + p + 1) - idx(i + 1);
    if (den_r != 0.0)
        right = (idx(i + p + 1) - u) / den_r * bspline_basis(i + 1, p - 1, u, knots);

    return left + right;
}

namespace {

// Cubic cardinal B-spline on [0,4].
double cubic_cardinal(double x) {
    if (x <= 0.0 || x >= 4.0) return 0.0;
    if (x < 1.0) return x * x * x / 6.0;
    if (x < 2.0) {
        const double s = x - 1.0;
        return (1.0 + 3.0 * s + 3.0 * s * s - 3.0 * s * s * s) / 6.0;
    }
    if (x < 3.0) {
        const double s = x - 2.0;
        return (4.0 - 6.0 * s * s + 3.0 * s * s * s) / 6.0;
    }
    const double s = x - 3.0;
    return (1.0 - 3.0 * s + 3.0 * s * s - s * s * s) / 6.0;
}

double wrap01(double u) {
    double w = u - std::floor(u);
    return w;
}

// Periodic basis weight of control point i at parameter u for n points:
// the cardinal bump centred at u = i/n, wrapped around the circle.
double periodic_weight(int i, double u, std::size_t n) {
    const double nn = static_cast<double>(n);
    double x = u * nn - static_cast<double>(i) + 2.0;
    x -= nn * std::floor(x / nn);  // into [0, n)
    return cubic_cardinal(x);
}

}  // namespace

SplineModel::SplineModel(std::vector<Vec2> control_points)
    : control_points_(std::move(control_points)) {
    if (control_points_.size() < 4)
        throw ValidationError("periodic cubic spline needs at least 4 control points");
}

std::vector<double> SplineModel::knots() const {
    const int n = static_cast<int>(control_points_.size());
    std::vector<double> U(n + 2 * degree() + 1);
    for (int i = 0; i < static_cast<int>(U.size()); ++i)
        U[i] = static_cast<double>(i - degree()) / n;
    return U;
}

Vec2 SplineModel::evaluate(double u) const {
    const std::size_t n = control_points_.size();
    const double uu = wrap01(u);
    const auto j = static_cast<int>(std::floor(uu * static_cast<double>(n)));
    Vec2 out;
    for (int k = -1; k <= 2; ++k) {
        const int i = ((j + k) % static_cast<int>(n) + static_cast<int>(n)) %
                      static_cast<int>(n);
        const double w = periodic_weight(i, uu, n);
        out.x += w * control_points_[i].x;
        out.y += w * control_points_[i].y;
    }
    return out;
}

std::vector<Vec2> SplineModel::resample(std::size_t M) const {
    std::vector<Vec2> pts(M);
    for (std::size_t k = 0; k < M; ++k)
        pts[k] = evaluate(static_cast<double>(k) / static_cast<double>(M));
    return pts;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0)
        t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double cx = a.x + t * dx;
    const double cy = a.y + t * dy;
    return std::hypot(p.x - cx, p.y - cy);
}

struct LsSolution {
    std::vector<Vec2> control;
    double residual_ss;
};

// Least-squares fit of n periodic control points to the (t_k, D_k) samples.
LsSolution solve_ls(const std::vector<Vec2>& pts, const std::vector<double>& t,
                    std::size_t n) {
    const std::size_t N = pts.size();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, n);
    for (std::size_t k = 0; k < N; ++k) {
        const double uu = wrap01(t[k]);
        const auto j = static_cast<int>(std::floor(uu * static_cast<double>(n)));
        for (int d = -1; d <= 2; ++d) {
            const int i = ((j + d) % static_cast<int>(n) + static_cast<int>(n)) %
                          static_cast<int>(n);
            B(k, i) = periodic_weight(i, uu, n);
        }
    }
    Eigen::MatrixXd D(N, 2);
    for (std::size_t k = 0; k < N; ++k) {
        D(k, 0) = pts[k].x;
        D(k, 1) = pts[k].y;
    }

    const Eigen::MatrixXd BtB = B.transpose() * B;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(BtB);
    const Eigen::VectorXd diag = ldlt.vectorD();
    const double dmax = diag.maxCoeff();
    const double dmin = diag.minCoeff();
    const double cond = dmin > 0.0 ? dmax / dmin
                                   : std::numeric_limits<double>::infinity();
    if (ldlt.info() != Eigen::Success || !(dmin > 0.0) || cond > 1e14) {
        std::ostringstream os;
        os << "periodic spline fit: normal equations ill-conditioned "
           << "(condition estimate " << cond
           << "; data parameters likely leave basis spans empty at n = " << n << ")";
        throw NumericalError(os.str());
    }
    const Eigen::MatrixXd P = ldlt.solve(B.transpose() * D);
    const double rss = (B * P - D).squaredNorm();

    LsSolution sol;
    sol.control.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.control[i] = {P(i, 0), P(i, 1)};
    sol.residual_ss = rss;
    return sol;
}

}  // namespace

FitReport fit_error(std::span<const Vec2> points, std::span<const Vec2> dense_curve) {
    if (dense_curve.empty()) throw ValidationError("fit_error: dense curve is empty");
    FitReport rep;
    rep.N = points.size();
    rep.M = dense_curve.size();
    rep.e.reserve(points.size());
    const std::size_t M = dense_curve.size();
    for (const Vec2& p : points) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < M; ++s) {
            const Vec2& a = dense_curve[s];
            const Vec2& b = dense_curve[(s + 1) % M];  // closed polyline
            best = std::min(best, point_segment_distance(p, a, b));
        }
        rep.e.push_back(best);
    }
    double ss = 0.0;
    for (double e : rep.e) ss += e * e;
    rep.rms = rep.e.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(rep.e.size()));
    std::vector<double> sorted = rep.e;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty()) {
        const double pos = 0.95 * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        rep.p95 = sorted[lo] + (pos - std::floor(pos)) * (sorted[hi] - sorted[lo]);
    }
    return rep;
}

FitResult fit_periodic_smoothing_spline(const Contour& contour, double alpha_smooth,
                                        std::size_t fixed_n, std::size_t M,
                                        std::span<const double> params) {
    validate(contour);
    if (alpha_smooth < 0.0)
        throw ValidationError("smoothing factor alpha must be non-negative");
    std::vector<double> t;
    if (params.empty()) {
        const std::vector<double> t_full = chord_params(contour);
        t.assign(t_full.begin(), t_full.end() - 1);
    } else {
        if (params.size() != contour.points.size())
            throw ValidationError("explicit parameter count must match the contour");
        t.assign(params.begin(), params.end());
    }
    const std::vector<Vec2>& pts = contour.points;
    const std::size_t N = pts.size();
    const double budget = alpha_smooth * static_cast<double>(N);

    LsSolution sol;
    std::size_t n_used = 0;
    if (fixed_n > 0) {
        n_used = fixed_n;
        sol = solve_ls(pts, t, n_used);
    } else if (alpha_smooth == 0.0) {
        n_used = N;  // interpolation
        sol = solve_ls(pts, t, n_used);
    } else {
        // smallest n whose residual meets the budget
        for (std::size_t n = 4; n <= N; ++n) {
            sol = solve_ls(pts, t, n);
            n_used = n;
            if (sol.residual_ss <= budget) break;
        }
    }

    FitResult out;
    out.model = SplineModel(sol.control);
    const std::vector<Vec2> dense = out.model.resample(M);
    out.report = fit_error(pts, dense);
    out.report.n = n_used;
    out.report.alpha_smooth = alpha_smooth;
    return out;
}

}  // namespace flapkit::wing
