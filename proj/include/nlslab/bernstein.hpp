#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nlslab/errors.hpp"
#include "nlslab/quadrature.hpp"

namespace nlslab {

enum class Family { Stable, Relativistic, TemperedStable };
enum class Role { Phi, Psi };

/// A member of the complete Bernstein function families used throughout:
///   Stable(s):          lambda^s
///   Relativistic(s,m):  (lambda + m^{1/s})^s - m
///   TemperedStable(s,t): (lambda + t)^s - t^s
/// The exponent s must lie strictly inside (0,1).
struct BernsteinSpec {
    Family family = Family::Stable;
    Role role = Role::Psi;
    double s = 0.5;
    double mass = 0.0;       // Relativistic only
    double tempering = 0.0;  // TemperedStable only

    static BernsteinSpec stable(double s, Role role = Role::Psi) {
        check_exponent(s);
        return BernsteinSpec{Family::Stable, role, s, 0.0, 0.0};
    }
    static BernsteinSpec relativistic(double s, double mass, Role role = Role::Psi) {
        check_exponent(s);
        if (!(mass > 0)) throw domain_error("relativistic mass must be positive");
        return BernsteinSpec{Family::Relativistic, role, s, mass, 0.0};
    }
    static BernsteinSpec tempered(double s, double tempering, Role role = Role::Psi) {
        check_exponent(s);
        if (!(tempering > 0)) throw domain_error("tempering parameter must be positive");
        return BernsteinSpec{Family::TemperedStable, role, s, 0.0, tempering};
    }

    double operator()(double lambda) const { return eval(lambda); }

    double eval(double lambda) const {
        if (lambda < 0) throw domain_error("Bernstein eval: lambda must be non-negative");
        if (lambda == 0) return 0.0;
        switch (family) {
            case Family::Stable:
                return std::pow(lambda, s);
            case Family::Relativistic:
                return std::pow(lambda + std::pow(mass, 1.0 / s), s) - mass;
            case Family::TemperedStable:
                return std::pow(lambda + tempering, s) - std::pow(tempering, s);
        }
        throw domain_error("unknown Bernstein family");
    }

private:
    static void check_exponent(double s) {
        if (!(s > 0.0 && s < 1.0))
            throw domain_error("Bernstein exponent must lie in (0,1)");
    }
};

inline double eval(const BernsteinSpec& spec, double lambda) { return spec.eval(lambda); }

/// Conjugate Bernstein function lambda -> lambda / psi(lambda).
inline std::function<double(double)> conjugate(const BernsteinSpec& psi) {
    if (psi.role != Role::Psi)
        throw domain_error("conjugate: spec must have role Psi");
    return [psi](double lambda) {
        if (!(lambda > 0)) throw domain_error("conjugate: lambda must be positive");
        return lambda / psi.eval(lambda);
    };
}

/// Empirical weak-scaling exponents and constants over a sampled lattice.
struct ScalingReport {
    double lower_exponent = 0;
    double upper_exponent = 0;
    double lower_const = 0;
    double upper_const = 0;
    double lambda_min = 0;
    double lambda_max = 0;
};

/// Estimates the scaling-at-infinity exponents of a Bernstein function from
/// log-ratio slopes log(phi(lambda t)/phi(t)) / log(lambda). Slopes are
/// anchored in the upper half of the sampled log-range, where the asymptotic
/// regime the exponents describe is resolved; the constants are the extremal
/// multiplicative gaps over the full lattice.
inline ScalingReport estimate_scaling(const BernsteinSpec& spec, double lambda_min,
                                      double lambda_max, int n_samples) {
    if (n_samples < 8)
        throw config_error("estimate_scaling: n_samples must be at least 8");
    if (!(lambda_min >= 1.0 && lambda_min < lambda_max))
        throw config_error("estimate_scaling: need 1 <= lambda_min < lambda_max");

    std::vector<double> t(n_samples), ft(n_samples);
    const double lmin = std::log(lambda_min), lmax = std::log(lambda_max);
    for (int i = 0; i < n_samples; ++i) {
        t[i] = std::exp(lmin + (lmax - lmin) * i / (n_samples - 1));
        ft[i] = spec.eval(t[i]);
    }

    const double anchor = std::exp(0.5 * (lmin + lmax));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
        if (t[i] < anchor) continue;
        for (int j = i + 1; j < n_samples; ++j) {
            const double slope = std::log(ft[j] / ft[i]) / std::log(t[j] / t[i]);
            lo = std::min(lo, slope);
            hi = std::max(hi, slope);
        }
    }
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw config_error("estimate_scaling: degenerate sample lattice");

    double c_lo = std::numeric_limits<double>::infinity();
    double c_hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
        for (int j = i + 1; j < n_samples; ++j) {
            const double lam = t[j] / t[i];
            c_hi = std::max(c_hi, ft[j] / (std::pow(lam, lo) * ft[i]));
            c_lo = std::min(c_lo, ft[j] / (std::pow(lam, hi) * ft[i]));
        }
    }
    return ScalingReport{lo, hi, c_lo, c_hi, lambda_min, lambda_max};
}

/// Renewal function representative V(t) = 1 / sqrt(phi(t^{-2})).
/// Equals t^{beta/2} exactly when phi is Stable(beta/2).
inline double renewal_V(const BernsteinSpec& phi, double t) {
    if (!(t > 0)) throw domain_error("renewal_V: t must be positive");
    return 1.0 / std::sqrt(phi.eval(1.0 / (t * t)));
}

struct LevyDensity {
    double value = 0;
    bool proxy = false;  // true when the value is the comparability proxy psi(1/t)/t
};

/// Levy density of the outer subordinator. Exact for the stable family
/// (s t^{-1-s} / Gamma(1-s)); for other families the proxy psi(1/t)/t is
/// returned with the proxy flag set.
inline LevyDensity levy_density_nu(const BernsteinSpec& psi, double t) {
    if (!(t > 0)) throw domain_error("levy_density_nu: t must be positive");
    if (psi.family == Family::Stable) {
        const double s = psi.s;
        return {s * std::pow(t, -1.0 - s) / std::tgamma(1.0 - s), false};
    }
    return {psi.eval(1.0 / t) / t, true};
}

namespace detail {

/// Gaver-Stehfest coefficients for an even term count N.
inline std::vector<double> gaver_stehfest_weights(int n_terms) {
    const int M = n_terms / 2;
    std::vector<double> a(n_terms + 1, 0.0);
    for (int k = 1; k <= n_terms; ++k) {
        double sum = 0.0;
        const int j_lo = (k + 1) / 2;
        const int j_hi = std::min(k, M);
        for (int j = j_lo; j <= j_hi; ++j) {
            // j^M (2j)! / ((M-j)! j! (j-1)! (k-j)! (2j-k)!)
            double log_term = M * std::log(double(j)) + std::lgamma(2.0 * j + 1.0) -
                              std::lgamma(M - j + 1.0) - std::lgamma(j + 1.0) -
                              std::lgamma(double(j)) - std::lgamma(k - j + 1.0) -
                              std::lgamma(2.0 * j - k + 1.0);
            sum += std::exp(log_term);
        }
        a[k] = ((M + k) % 2 == 0 ? 1.0 : -1.0) * sum;
    }
    return a;
}

inline double gaver_stehfest_invert(const std::function<double(double)>& F, double t,
                                    int n_terms) {
    const auto a = gaver_stehfest_weights(n_terms);
    const double ln2_t = std::log(2.0) / t;
    double sum = 0.0;
    for (int k = 1; k <= n_terms; ++k) sum += a[k] * F(k * ln2_t);
    return ln2_t * sum;
}

}  // namespace detail

/// Density of the potential measure of the outer subordinator: the inverse
/// Laplace transform of 1/psi. Closed form t^{s-1}/Gamma(s) in the stable
/// case; Gaver-Stehfest inversion otherwise, with a convergence monitor
/// comparing adjacent orders.
inline double potential_density_u(const BernsteinSpec& psi, double t, int order = 12) {
    if (!(t > 0)) throw domain_error("potential_density_u: t must be positive");
    if (psi.role != Role::Psi)
        throw domain_error("potential_density_u: spec must have role Psi");
    if (psi.family == Family::Stable)
        return std::pow(t, psi.s - 1.0) / std::tgamma(psi.s);

    const auto F = [&psi](double lambda) { return 1.0 / psi.eval(lambda); };
    const double v_lo = detail::gaver_stehfest_invert(F, t, order - 2);
    const double v = detail::gaver_stehfest_invert(F, t, order);
    const double v_hi = detail::gaver_stehfest_invert(F, t, order + 2);
    const double spread = std::max(std::abs(v - v_lo), std::abs(v - v_hi));
    if (spread > 5e-5 * std::max(1e-300, std::abs(v)))
        throw numerical_error(
            "potential_density_u: Gaver-Stehfest orders disagree at t=" +
            std::to_string(t) + " (relative spread " +
            std::to_string(spread / std::abs(v)) + ")");
    return v;
}

/// Boundary weight rho(delta) = V^2 psi(V^{-2}) + V * int_V^1 psi(s^{-2}) ds,
/// V = V(delta). The integral term is empty once V(delta) >= 1.
inline double weight_rho(const BernsteinSpec& phi, const BernsteinSpec& psi,
                         double delta) {
    if (!(delta > 0)) throw domain_error("weight_rho: delta must be positive");
    const double V = renewal_V(phi, delta);
    double rho = V * V * psi.eval(1.0 / (V * V));
    if (V < 1.0) {
        const double integral = integrate_adaptive(
            [&psi](double s) { return psi.eval(1.0 / (s * s)); }, V, 1.0, 1e-10, 1e-8);
        rho += V * integral;
    }
    return rho;
}

}  // namespace nlslab
