#pragma once

#include <memory>

#include "nlslab/bernstein.hpp"
#include "nlslab/generator.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

/// Everything the solvers and the CLI need for one (domain, beta, psi)
/// configuration, assembled once and immutable afterwards. The inner
/// subordinator is Stable(beta/2); the outer psi is arbitrary.
struct Workspace {
    Grid grid;
    double beta = 1.0;
    BernsteinSpec phi;  // Stable(beta/2), role Phi
    BernsteinSpec psi;

    OperatorMatrix generator;  // -L_|D
    Spectrum spectrum;
    OperatorMatrix psi_op;     // psi(-L_|D)
    OperatorMatrix green_psi;  // G^psi
    PoissonKernel poisson;
    Eigen::VectorXd poisson_sigma;  // reference function P^psi sigma

    double V(double t) const { return renewal_V(phi, t); }
};

inline Workspace make_workspace(double a, double b, int n, double beta,
                                const BernsteinSpec& psi) {
    Workspace ws;
    ws.grid = build_grid(a, b, n);
    ws.beta = beta;
    ws.phi = BernsteinSpec::stable(beta / 2.0, Role::Phi);
    ws.psi = psi;
    ws.generator = assemble_generator(ws.grid, beta);
    ws.spectrum = eigendecompose(ws.generator, ws.grid);
    ws.psi_op = apply_psi(ws.spectrum, psi);
    ws.green_psi = green_matrix(ws.spectrum, GreenKind::GPsi, psi);
    ws.poisson = poisson_kernel(ws.green_psi, ws.grid,
                                [&ws](double t) { return ws.V(t); });
    ws.poisson_sigma = poisson_potential(ws.poisson, BoundaryData::sigma());
    return ws;
}

/// Convenience for the interpolated fractional Laplacian
/// ((-Delta)^{beta/2}_|D)^{alpha/2}.
inline Workspace make_workspace_interpolated(double a, double b, int n, double beta,
                                             double alpha) {
    return make_workspace(a, b, n, beta,
                          BernsteinSpec::stable(alpha / 2.0, Role::Psi));
}

}  // namespace nlslab
