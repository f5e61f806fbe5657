#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "monostop/errors.hpp"

namespace monostop {

// Neumaier-compensated summation. Order-fixed and compensated so that
// aggregates are stable to ~1e-12 regardless of how the terms are produced.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Two-pass compensated mean and standard error of the mean.
inline MeanStderr mean_and_stderr(std::span<const double> xs) {
    if (xs.empty()) return {};
    CompensatedSum s;
    for (double x : xs) s.add(x);
    const double mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    CompensatedSum sq;
    for (double x : xs) {
        const double d = x - mean;
        sq.add(d * d);
    }
    const double n = static_cast<double>(xs.size());
    const double var = sq.value() / (n - 1.0);
    return {mean, std::sqrt(var > 0.0 ? var / n : 0.0)};
}

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double tol, int max_depth = 48) {
    if (!(a < b)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// First point of [lo, hi] where g crosses from positive to nonpositive.
// Requires g(lo) > 0 and g(hi) <= 0. Bisects the bracket down to xtol and
// returns its right end, so g at the returned point is guaranteed <= 0.
inline double bisect_crossing(const std::function<double(double)>& g,
                              double lo, double hi, double xtol) {
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // out of float resolution
        if (g(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Root of an increasing function f with f(root) = target, bracket expanded
// from [0, hint]. Used for deterministic horizon bounds.
inline double solve_increasing(const std::function<double(double)>& f,
                               double target, double hint, double xtol) {
    double lo = 0.0;
    double hi = hint > 0.0 ? hint : 1.0;
    int guard = 0;
    while (f(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) throw NumericError("solve_increasing: bracket expansion failed");
    }
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace monostop
