#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace noisecool::quadrature {

namespace detail {

template <typename F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double rel_tol, double abs_tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double h = b - a;
    double left = h / 12.0 * (fa + 4.0 * flm + fm);
    double right = h / 12.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * (rel_tol * std::abs(left + right) + abs_tol))
        return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, rel_tol, abs_tol / 2.0, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, rel_tol, abs_tol / 2.0, depth - 1);
}

} // namespace detail

/// Adaptive Simpson on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 0.0, int max_depth = 60) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, rel_tol, abs_tol, max_depth);
}

/// Bisection for a sign change of f on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double x_tol = 0.0, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: f(lo) and f(hi) must differ in sign");
    for (int i = 0; i < max_iter && hi - lo > x_tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace noisecool::quadrature
