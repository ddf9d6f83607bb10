#pragma once

#include <cmath>

#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/operator_matrix.hpp"

namespace nlslab {

/// Normalizing constant of the 1D fractional Laplacian (-Delta)^{beta/2}:
/// c_{1,beta} = beta 2^{beta-1} Gamma((1+beta)/2) / (sqrt(pi) Gamma(1-beta/2)).
/// c_{1,1} = 1/pi.
inline double frac_laplacian_constant(double beta) {
    if (!(beta > 0.0 && beta < 2.0))
        throw domain_error("frac_laplacian_constant: beta must lie in (0,2)");
    return beta * std::pow(2.0, beta - 1.0) * std::tgamma((1.0 + beta) / 2.0) /
           (std::sqrt(M_PI) * std::tgamma(1.0 - beta / 2.0));
}

/// Killing density of the killed beta-stable process at node i:
/// kappa(x) = c_{1,beta} / beta * [(x-a)^{-beta} + (b-x)^{-beta}].
inline double killing_density_phi(const Grid& grid, double beta, int i) {
    if (i < 0 || i >= grid.n) throw domain_error("killing_density_phi: bad node index");
    const double c = frac_laplacian_constant(beta);
    const double x = grid.nodes[i];
    return c / beta *
           (std::pow(x - grid.a, -beta) + std::pow(grid.b - x, -beta));
}

namespace detail {

/// Exact integral of |x_i - y|^{-1-beta} over a cell at distance r = |x_i - x_j|
/// (cell half-width hw, cell does not contain x_i).
inline double cell_kernel_integral(double r, double hw, double beta) {
    return (std::pow(r - hw, -beta) - std::pow(r + hw, -beta)) / beta;
}

}  // namespace detail

/// Assembles the matrix of -L_|D = (-Delta)^{beta/2}_|D on the grid in
/// principal-value form: exact cell-averaged kernel integrals off the
/// diagonal, a second-order Taylor correction for the singular self cell,
/// and the closed-form exterior killing term. The matrix follows the weight
/// convention of OperatorMatrix and is symmetric by construction.
inline OperatorMatrix assemble_generator(const Grid& grid, double beta) {
    const double c = frac_laplacian_constant(beta);
    const int n = grid.n;
    const double h = grid.h;
    const double hw = 0.5 * h;

    // Self-cell correction: PV over the singular cell with u expanded to
    // second order gives -u''(x_i) (h/2)^{2-beta} / (2-beta); u'' is the
    // central second difference (ghost value 0 outside D).
    const double gamma = std::pow(hw, 2.0 - beta) / (2.0 - beta);
    const double self_coupling = c * gamma / (h * h * h);

    // Kernel cell integrals depend only on |i-j| on a uniform grid.
    std::vector<double> I(n, 0.0);
    for (int k = 1; k < n; ++k)
        I[k] = detail::cell_kernel_integral(k * h, hw, beta);

    OperatorMatrix A;
    A.kind = MatrixKind::GeneratorMinus;
    A.entries = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double a_ij = -c * I[std::abs(i - j)] / h;
            if (std::abs(i - j) == 1) a_ij -= self_coupling;
            A.entries(i, j) = a_ij;
            row_sum += c * I[std::abs(i - j)];
        }
        double diag = (row_sum + 2.0 * c * gamma / (h * h) +
                       killing_density_phi(grid, beta, i)) / h;
        A.entries(i, i) = diag;
    }
    return A;
}

}  // namespace nlslab
