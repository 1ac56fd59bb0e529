#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace angval {

struct ScalarOptimum {
    double arg = 0.0;
    double value = 0.0;
};

// Golden-section maximization on [a,b]; assumes a single interior peak in
// the bracket (callers grid first and refine the bracketing cell).
template <typename F>
ScalarOptimum golden_max(F&& f, double a, double b, double tol = 1e-10,
                         int max_iter = 200) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    double x = (a + b) / 2.0;
    return {x, f(x)};
}

template <typename F>
ScalarOptimum golden_min(F&& f, double a, double b, double tol = 1e-10,
                         int max_iter = 200) {
    auto neg = [&](double x) { return -f(x); };
    ScalarOptimum o = golden_max(neg, a, b, tol, max_iter);
    return {o.arg, -o.value};
}

// Grid scan followed by golden refinement in the cell around the best point.
template <typename F>
ScalarOptimum grid_then_golden_max(F&& f, double a, double b, int grid,
                                   double tol = 1e-10) {
    int best = 0;
    double fbest = -1e300;
    for (int i = 0; i <= grid; ++i) {
        double x = a + (b - a) * i / grid;
        double v = f(x);
        if (v > fbest) {
            fbest = v;
            best = i;
        }
    }
    double lo = a + (b - a) * (best > 0 ? best - 1 : 0) / grid;
    double hi = a + (b - a) * (best < grid ? best + 1 : grid) / grid;
    ScalarOptimum o = golden_max(f, lo, hi, tol);
    if (fbest > o.value) return {a + (b - a) * best / grid, fbest};
    return o;
}

template <typename F>
ScalarOptimum grid_then_golden_min(F&& f, double a, double b, int grid,
                                   double tol = 1e-10) {
    auto neg = [&](double x) { return -f(x); };
    ScalarOptimum o = grid_then_golden_max(neg, a, b, grid, tol);
    return {o.arg, -o.value};
}

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

namespace detail {

template <typename F>
void simpson_rec(F& f, double a, double m, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth, QuadratureResult& acc) {
    double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
    double flm = f(lm), frm = f(rm);
    acc.evaluations += 2;
    double h = b - a;
    double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::abs(err) <= tol) {
        acc.value += left + right + err;
        acc.error_estimate += std::abs(err);
        return;
    }
    simpson_rec(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1, acc);
    simpson_rec(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1, acc);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance.
template <typename F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double tol = 1e-10,
                                  int max_depth = 40) {
    QuadratureResult acc;
    if (a == b) return acc;
    double m = (a + b) / 2.0;
    double fa = f(a), fm = f(m), fb = f(b);
    acc.evaluations = 3;
    double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth, acc);
    return acc;
}

struct PowerFit {
    double coefficient = 0.0;  // C in y ~ C * g(n)
    double r_squared = 1.0;
};

// Least-squares fit of y_i ~ C * g_i through the origin, with R^2 against
// the mean. Degenerate (all y below `floor`) counts as a perfect fit.
inline PowerFit fit_through_origin(const std::vector<double>& g,
                                   const std::vector<double>& y,
                                   double floor_value = 1e-14) {
    PowerFit out;
    double gg = 0.0, gy = 0.0, ymax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        gg += g[i] * g[i];
        gy += g[i] * y[i];
        ymax = std::max(ymax, std::abs(y[i]));
    }
    if (ymax <= floor_value || gg == 0.0) return out;
    out.coefficient = gy / gg;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r = y[i] - out.coefficient * g[i];
        ss_res += r * r;
        double t = y[i] - mean;
        ss_tot += t * t;
    }
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

}  // namespace angval
