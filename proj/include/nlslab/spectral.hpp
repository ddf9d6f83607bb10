#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "nlslab/bernstein.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/operator_matrix.hpp"

namespace nlslab {

/// Eigenpairs of the discrete generator, orthonormal under the grid inner
/// product <u,v> = sum_k u_k v_k w_k. Columns of `eigenvectors` are the
/// eigenfunctions; phi_1 is sign-normalized positive, higher modes have
/// their first nonzero component positive.
struct Spectrum {
    Grid grid;
    Eigen::VectorXd eigenvalues;   // ascending, all > 0
    Eigen::MatrixXd eigenvectors;  // column j = phi_{j+1} on the nodes

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

inline Spectrum eigendecompose(const OperatorMatrix& A, const Grid& grid) {
    if (A.kind != MatrixKind::GeneratorMinus)
        throw domain_error("eigendecompose: expects a GeneratorMinus matrix");
    const int n = grid.n;
    // Weight-symmetrized matrix W^{1/2} A W^{1/2}; uniform weights make this h*A.
    Eigen::MatrixXd B = grid.h * A.entries;
    B = 0.5 * (B + B.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
    if (solver.info() != Eigen::Success)
        throw numerical_error("eigendecompose: eigensolver failed to converge");

    Spectrum spec;
    spec.grid = grid;
    spec.eigenvalues = solver.eigenvalues();
    if (!(spec.eigenvalues[0] > 0))
        throw numerical_error(
            "eigendecompose: non-positive smallest eigenvalue; generator assembly is "
            "inconsistent");

    // Rescale l2-orthonormal vectors to grid-orthonormality.
    spec.eigenvectors = solver.eigenvectors() / std::sqrt(grid.h);
    for (int j = 0; j < n; ++j) {
        auto col = spec.eigenvectors.col(j);
        if (j == 0) {
            double s = col.sum();
            if (s < 0) col = -col;
        } else {
            for (int k = 0; k < n; ++k) {
                if (col[k] != 0.0) {
                    if (col[k] < 0) col = -col;
                    break;
                }
            }
        }
    }
    return spec;
}

/// Materializes g(-L_|D) = sum_j g(lambda_j) phi_j phi_j^T under the weight
/// convention: the result applied through W reproduces g on each eigenmode.
inline OperatorMatrix materialize(const Spectrum& spec,
                                  const std::function<double(double)>& g,
                                  MatrixKind kind) {
    const int n = spec.size();
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j) d[j] = g(spec.eigenvalues[j]);
    OperatorMatrix M;
    M.kind = kind;
    M.entries = spec.eigenvectors * d.asDiagonal() * spec.eigenvectors.transpose();
    M.entries = 0.5 * (M.entries + M.entries.transpose().eval());
    return M;
}

/// psi(-L_|D) via the spectral functional calculus.
inline OperatorMatrix apply_psi(const Spectrum& spec, const BernsteinSpec& psi) {
    if (psi.role != Role::Psi) throw domain_error("apply_psi: spec must have role Psi");
    return materialize(spec, [&psi](double l) { return psi.eval(l); },
                       MatrixKind::GeneratorMinus);
}

/// Dirichlet heat kernel p_D(t,.,.) = sum_j e^{-lambda_j t} phi_j phi_j^T.
inline OperatorMatrix heat_kernel(const Spectrum& spec, double t) {
    if (!(t > 0)) throw domain_error("heat_kernel: t must be positive");
    auto M = materialize(spec, [t](double l) { return std::exp(-l * t); },
                         MatrixKind::Heat);
    M.time = t;
    return M;
}

enum class GreenKind { G, GPsi, GPsiStar };

/// Green matrix: inverse of the generator (G), of psi(-L_|D) (GPsi), or of
/// the conjugate psi*(-L_|D) (GPsiStar).
inline OperatorMatrix green_matrix(const Spectrum& spec, GreenKind which,
                                   const BernsteinSpec& psi) {
    switch (which) {
        case GreenKind::G:
            return materialize(spec, [](double l) { return 1.0 / l; },
                               MatrixKind::Green);
        case GreenKind::GPsi:
            return materialize(spec, [&psi](double l) { return 1.0 / psi.eval(l); },
                               MatrixKind::GreenPsi);
        case GreenKind::GPsiStar: {
            auto psi_star = conjugate(psi);
            return materialize(spec, [psi_star](double l) { return 1.0 / psi_star(l); },
                               MatrixKind::GreenPsiStar);
        }
    }
    throw domain_error("green_matrix: unknown kind");
}

struct SubordinationResult {
    OperatorMatrix matrix;
    double tail_bound = 0.0;  // analytic bound on the discarded tail mass
};

/// Independent construction of the psi-Green matrix by time quadrature of
/// the subordination representation int_0^inf p_D(t) u(t) dt, where u is
/// the potential density of psi. Each eigenmode weight is the quadrature of
/// e^{-lambda t} u(t): a closed-form head below t_min, composite Simpson on
/// log-spaced nodes over [t_min, t_max], and an analytic tail bound from
/// lambda_1 and the monotonicity of u.
inline SubordinationResult green_oracle_subordination(const Spectrum& spec,
                                                      const BernsteinSpec& psi,
                                                      double t_max, int quad_nodes) {
    if (psi.role != Role::Psi)
        throw domain_error("green_oracle_subordination: spec must have role Psi");
    if (!(t_max > 0) || quad_nodes < 16)
        throw config_error("green_oracle_subordination: bad quadrature configuration");

    const double lambda_1 = spec.eigenvalues[0];
    const double lambda_max = spec.eigenvalues[spec.size() - 1];

    const auto u_density = [&psi](double t) { return potential_density_u(psi, t); };

    // Head cutoff: small enough that e^{-lambda t} ~ 1 for every mode.
    const double t_min = std::min(1e-6 / lambda_max, 1e-8);
    double head_mass;  // int_0^{t_min} u(t) dt
    if (psi.family == Family::Stable) {
        head_mass = std::pow(t_min, psi.s) / std::tgamma(psi.s + 1.0);
    } else {
        head_mass = integrate_log_simpson(u_density, t_min * 1e-8, t_min, 200);
    }

    // Tail bound: u non-increasing, so int_{t_max}^inf e^{-l t} u <= u(t_max)
    // e^{-lambda_1 t_max} / lambda_1.
    const double tail = u_density(t_max) * std::exp(-lambda_1 * t_max) / lambda_1;
    if (tail > 1e-6)
        throw numerical_error(
            "green_oracle_subordination: tail bound above tolerance; increase t_max");

    const int n = spec.size();
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j) {
        const double lam = spec.eigenvalues[j];
        const double body = integrate_log_simpson(
            [&](double t) { return std::exp(-lam * t) * u_density(t); }, t_min, t_max,
            quad_nodes);
        d[j] = head_mass + body;
    }

    SubordinationResult res;
    res.tail_bound = tail;
    res.matrix.kind = MatrixKind::GreenPsi;
    res.matrix.entries =
        spec.eigenvectors * d.asDiagonal() * spec.eigenvectors.transpose();
    res.matrix.entries =
        0.5 * (res.matrix.entries + res.matrix.entries.transpose().eval());
    return res;
}

}  // namespace nlslab
