#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "nlslab/errors.hpp"

namespace nlslab {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double abs_tol, double rel_tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    const double err = left + right - whole;
    const double tol = std::max(abs_tol, rel_tol * std::abs(left + right));
    if (depth <= 0 || std::abs(err) <= 15.0 * tol)
        return left + right + err / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, rel_tol,
                                depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, rel_tol,
                                depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
inline double integrate_adaptive(const std::function<double(double)>& f, double a,
                                 double b, double abs_tol = 1e-10,
                                 double rel_tol = 1e-8, int max_depth = 50) {
    if (!(a < b)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        throw numerical_error("integrate_adaptive: non-finite integrand sample");
    const double whole = detail::simpson(f, a, b, fa, fm, fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, rel_tol,
                                        max_depth);
}

/// Composite Simpson rule for g(u) on a uniform grid over [u_lo, u_hi].
/// n_intervals is rounded up to an even count.
inline double integrate_simpson_uniform(const std::function<double(double)>& g,
                                        double u_lo, double u_hi, int n_intervals) {
    if (n_intervals < 2) n_intervals = 2;
    if (n_intervals % 2 != 0) ++n_intervals;
    const double h = (u_hi - u_lo) / n_intervals;
    double sum = g(u_lo) + g(u_hi);
    for (int k = 1; k < n_intervals; ++k)
        sum += g(u_lo + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

/// Simpson quadrature of f(t) over [t_lo, t_hi] with logarithmically spaced
/// nodes: integrates t * f(t) in u = log t.
inline double integrate_log_simpson(const std::function<double(double)>& f,
                                    double t_lo, double t_hi, int n_intervals) {
    return integrate_simpson_uniform(
        [&](double u) {
            const double t = std::exp(u);
            return t * f(t);
        },
        std::log(t_lo), std::log(t_hi), n_intervals);
}

}  // namespace nlslab
