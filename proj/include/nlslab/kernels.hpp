#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "nlslab/bernstein.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/operator_matrix.hpp"
#include "nlslab/quadrature.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

/// Poisson kernel of psi(-L_|D) on the two-point boundary {a, b}:
/// P(x, z) = lim_{y->z} G^psi(x, y) / V(delta(y)), realized by Richardson
/// extrapolation of the ratio at the three nodes nearest each endpoint.
struct PoissonKernel {
    Eigen::MatrixXd values;  // n x 2, column 0 = endpoint a, column 1 = endpoint b

    struct ExtrapolationDiag {
        std::array<double, 3> deltas{};   // boundary distances of the nodes used
        double max_residual = 0.0;        // worst 3- vs 2-point extrapolation gap
        bool monotone_warning = false;    // ratio sequence not monotone somewhere
    };
    std::array<ExtrapolationDiag, 2> diagnostics;
};

/// Boundary data: atoms of the measure zeta on {a, b}. The surface measure
/// sigma corresponds to (1, 1).
struct BoundaryData {
    double zeta_a = 0.0;
    double zeta_b = 0.0;

    static BoundaryData sigma() { return {1.0, 1.0}; }
};

inline PoissonKernel poisson_kernel(const OperatorMatrix& Gpsi, const Grid& grid,
                                    const std::function<double(double)>& V) {
    if (grid.n < 16) throw config_error("poisson_kernel: grid too coarse");
    const int n = grid.n;
    PoissonKernel K;
    K.values.resize(n, 2);

    for (int side = 0; side < 2; ++side) {
        auto& diag = K.diagnostics[side];

        for (int i = 0; i < n; ++i) {
            // The 3 nodes nearest the endpoint, skipping columns within 2 of
            // the row index: there the Green kernel's diagonal singularity
            // dominates and the extrapolation in delta is meaningless.
            std::array<int, 3> idx;
            int found = 0;
            for (int step = 0; step < n && found < 3; ++step) {
                const int j = side == 0 ? step : n - 1 - step;
                if (std::abs(i - j) < 3) continue;
                idx[found++] = j;
            }
            std::array<double, 3> d;
            std::array<double, 3> Vd;
            for (int k = 0; k < 3; ++k) {
                d[k] = grid.delta[idx[k]];
                Vd[k] = V(d[k]);
            }
            if (i == n / 2) diag.deltas = d;

            std::array<double, 3> r;
            for (int k = 0; k < 3; ++k) r[k] = Gpsi.entries(i, idx[k]) / Vd[k];

            // Quadratic Lagrange extrapolation to delta = 0.
            double p3 = 0.0;
            for (int k = 0; k < 3; ++k) {
                double term = r[k];
                for (int l = 0; l < 3; ++l)
                    if (l != k) term *= (0.0 - d[l]) / (d[k] - d[l]);
                p3 += term;
            }
            const double p2 = r[0] + (r[1] - r[0]) * (0.0 - d[0]) / (d[1] - d[0]);
            const double residual = std::abs(p3 - p2) /
                                    std::max(std::abs(p3), 1e-300);
            diag.max_residual = std::max(diag.max_residual, residual);
            const bool mono = (r[0] >= r[1] && r[1] >= r[2]) ||
                              (r[0] <= r[1] && r[1] <= r[2]);
            if (!mono && i != idx[0] && i != idx[1] && i != idx[2])
                diag.monotone_warning = true;
            K.values(i, side) = p3;
        }
    }
    return K;
}

/// Poisson potential u_i = P(x_i, a) zeta_a + P(x_i, b) zeta_b.
inline Eigen::VectorXd poisson_potential(const PoissonKernel& K,
                                         const BoundaryData& zeta) {
    return K.values.col(0) * zeta.zeta_a + K.values.col(1) * zeta.zeta_b;
}

/// Sup-norm residual of psi(-L_|D) u over the interior set delta >= margin,
/// normalized by max|u| on that set. Zero for functions harmonic with
/// respect to psi(-L_|D).
inline double harmonicity_residual(const Eigen::VectorXd& u,
                                   const OperatorMatrix& psi_op, const Grid& grid,
                                   double margin) {
    if (!(margin >= 4.0 * grid.h))
        throw config_error("harmonicity_residual: margin must be >= 4h");
    const Eigen::VectorXd Lu = apply(psi_op, grid, u);
    double max_res = 0.0, max_u = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        if (grid.delta[i] < margin) continue;
        max_res = std::max(max_res, std::abs(Lu[i]));
        max_u = std::max(max_u, std::abs(u[i]));
    }
    if (max_u == 0.0) return 0.0;
    return max_res / max_u;
}

struct TimeQuadConfig {
    int nodes = 400;       // Simpson intervals on the log-spaced body
    double t_factor = 40;  // t_max = t_factor / lambda_1
};

/// Jumping kernel J_D(x_i, x_j) = int_0^inf p_D(t, x_i, x_j) nu(t) dt.
/// The heat kernel is evaluated spectrally; below the split point the
/// integrand is linearized in t (p_D(t) ~ t * p_D(t_min)/t_min), above it a
/// log-spaced Simpson rule is used, and the remainder beyond t_max is
/// bounded through lambda_1.
inline double jumping_kernel_JD(const Spectrum& spec, const BernsteinSpec& psi, int i,
                                int j, const TimeQuadConfig& cfg = {}) {
    if (i == j) throw domain_error("jumping_kernel_JD: requires i != j");
    const int n = spec.size();
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw domain_error("jumping_kernel_JD: bad node index");

    const double lambda_1 = spec.eigenvalues[0];
    const double lambda_max = spec.eigenvalues[n - 1];
    const auto p_D = [&](double t) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k)
            sum += std::exp(-spec.eigenvalues[k] * t) * spec.eigenvectors(i, k) *
                   spec.eigenvectors(j, k);
        return sum;
    };

    const double t_min = 1e-3 / lambda_max;
    const double t_max = cfg.t_factor / lambda_1;

    // Small-t piece: p_D(t) ~ c t, integrated in closed form against the
    // exact stable Levy density where available.
    const double c_lin = p_D(t_min) / t_min;
    double head;
    if (psi.family == Family::Stable) {
        const double s = psi.s;
        head = c_lin * s * std::pow(t_min, 1.0 - s) /
               ((1.0 - s) * std::tgamma(1.0 - s));
    } else {
        head = integrate_log_simpson(
            [&](double t) { return (c_lin * t) * levy_density_nu(psi, t).value; },
            t_min * 1e-6, t_min, 100);
    }

    const double body = integrate_log_simpson(
        [&](double t) { return p_D(t) * levy_density_nu(psi, t).value; }, t_min, t_max,
        cfg.nodes);

    const double value = head + body;
    if (!std::isfinite(value))
        throw numerical_error("jumping_kernel_JD: quadrature did not converge");
    return value;
}

/// Killing density of psi(-L_|D):
/// kappa(x_i) = int_0^inf (1 - P_t^D 1(x_i)) nu(t) dt, with 1 - P_t^D 1 ~ t
/// times the generator row action for small t and -> 1 for large t.
inline double killing_density_psi(const Spectrum& spec, const BernsteinSpec& psi,
                                  int i, const TimeQuadConfig& cfg = {}) {
    const int n = spec.size();
    if (i < 0 || i >= n) throw domain_error("killing_density_psi: bad node index");

    const double h = spec.grid.h;
    const double lambda_1 = spec.eigenvalues[0];
    const double lambda_max = spec.eigenvalues[n - 1];

    // Spectral coefficients of the indicator: 1_hat_j = <1, phi_j>_W.
    Eigen::VectorXd ones_hat(n);
    for (int k = 0; k < n; ++k) ones_hat[k] = spec.eigenvectors.col(k).sum() * h;

    const auto survival_defect = [&](double t) {  // 1 - P_t^D 1(x_i)
        double sum = 0.0;
        for (int k = 0; k < n; ++k)
            sum += std::exp(-spec.eigenvalues[k] * t) * spec.eigenvectors(i, k) *
                   ones_hat[k];
        return std::clamp(1.0 - sum, 0.0, 1.0);
    };

    const double t_min = 1e-3 / lambda_max;
    const double t_max = cfg.t_factor / lambda_1;

    const double c_lin = survival_defect(t_min) / t_min;
    double head;
    if (psi.family == Family::Stable) {
        const double s = psi.s;
        head = c_lin * s * std::pow(t_min, 1.0 - s) /
               ((1.0 - s) * std::tgamma(1.0 - s));
    } else {
        head = integrate_log_simpson(
            [&](double t) { return (c_lin * t) * levy_density_nu(psi, t).value; },
            t_min * 1e-6, t_min, 100);
    }

    const double body = integrate_log_simpson(
        [&](double t) { return survival_defect(t) * levy_density_nu(psi, t).value; },
        t_min, t_max, cfg.nodes);

    // Beyond t_max the defect is 1 up to e^{-lambda_1 t_max}; integrate the
    // Levy density tail directly.
    double tail;
    if (psi.family == Family::Stable) {
        const double s = psi.s;
        tail = std::pow(t_max, -s) / std::tgamma(1.0 - s);
    } else {
        tail = integrate_log_simpson(
            [&](double t) { return levy_density_nu(psi, t).value; }, t_max, t_max * 1e4,
            200);
    }

    const double value = head + body + tail;
    if (!std::isfinite(value))
        throw numerical_error("killing_density_psi: quadrature did not converge");
    return value;
}

}  // namespace nlslab
