#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "nlslab/semilinear.hpp"
#include "nlslab/workspace.hpp"

using namespace nlslab;

namespace {

const Workspace& ws512() {
    static const Workspace ws = make_workspace_interpolated(-1.0, 1.0, 512, 1.0, 1.0);
    return ws;
}

Nonlinearity zero_f(SignClass sign) {
    Nonlinearity f;
    f.sign = sign;
    f.custom = [](double, double, double) { return 0.0; };
    return f;
}

}  // namespace

TEST_CASE("critical exponent formula") {
    CHECK(critical_exponent(1.0, 1.0, 0.0) == Catch::Approx(1.5).margin(1e-14));
    CHECK(critical_exponent(1.0, 1.0, 1.0) == Catch::Approx(2.5).margin(1e-14));
    CHECK(critical_exponent(1.0, 1.0, -0.5) == Catch::Approx(1.0).margin(1e-14));
    CHECK_THROWS_AS(critical_exponent(2.0, 1.0, 0.0), domain_error);
}

TEST_CASE("solve_linear") {
    const auto& ws = ws512();

    // Eigenrelation: u = phi_1 / psi(lambda_1).
    const Eigen::VectorXd phi1 = ws.spectrum.eigenvectors.col(0);
    const SolveReport rep = solve_linear(ws, phi1, {0.0, 0.0});
    CHECK(rep.converged);
    const double target = 1.0 / ws.psi.eval(ws.spectrum.eigenvalues[0]);
    CHECK((rep.u - target * phi1).cwiseAbs().maxCoeff() <=
          1e-10 * target * phi1.cwiseAbs().maxCoeff());

    // Weak maximum principle over a nonnegative battery.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd lam(ws.grid.n);
        for (int i = 0; i < ws.grid.n; ++i) lam[i] = unif(rng);
        const SolveReport r = solve_linear(ws, lam, {unif(rng), unif(rng)});
        CHECK(r.u.minCoeff() >= -1e-10 * r.u.maxCoeff());
    }

    // Power datum kappa = 0 at (beta, alpha) = (1, 1): exponent beta/2 with
    // the logarithmic correction detected.
    const SolveReport pw = solve_linear_power(ws, 0.0, {0.0, 0.0});
    REQUIRE(pw.boundary_fit.has_value());
    CHECK(pw.boundary_fit->exponent == Catch::Approx(0.5).margin(0.07));
    CHECK(pw.boundary_fit->log_correction_detected);

    CHECK_THROWS_AS(solve_linear_power(ws, -1.6, {0.0, 0.0}), domain_error);
}

TEST_CASE("distributional residual") {
    const auto& ws = ws512();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd lam(ws.grid.n);
    for (int i = 0; i < ws.grid.n; ++i) lam[i] = unif(rng);
    const SolveReport rep = solve_linear(ws, lam, {0.0, 0.0});

    const double centers[3] = {-0.3, 0.0, 0.4};
    const double widths[3] = {0.2, 0.3, 0.25};
    for (int bump = 0; bump < 3; ++bump) {
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(ws.grid.n);
        for (int i = 0; i < ws.grid.n; ++i) {
            const double z = (ws.grid.nodes[i] - centers[bump]) / widths[bump];
            if (std::abs(z) < 1.0) xi[i] = std::exp(-1.0 / (1.0 - z * z));
        }
        const Eigen::VectorXd psi_xi = apply(ws.psi_op, ws.grid, xi);
        double lhs = 0, rhs = 0, norm_lam = 0;
        for (int i = 0; i < ws.grid.n; ++i) {
            lhs += rep.u[i] * psi_xi[i] * ws.grid.weights[i];
            rhs += lam[i] * xi[i] * ws.grid.weights[i];
            norm_lam += std::abs(lam[i]) * ws.grid.weights[i];
        }
        CHECK(std::abs(lhs - rhs) <= 1e-8 * norm_lam);
    }
}

TEST_CASE("solve_monotone") {
    const auto& ws = ws512();

    // f == 0 returns the Poisson potential in one iteration.
    const SolveReport triv =
        solve_monotone(ws, zero_f(SignClass::NonNegative), BoundaryData::sigma());
    CHECK(triv.converged);
    CHECK(triv.iterations == 1);
    CHECK((triv.u - ws.poisson_sigma).cwiseAbs().maxCoeff() == 0.0);

    // Small-mass subcritical source with sigma data.
    Nonlinearity f;
    f.sign = SignClass::NonNegative;
    f.theta = 0.0;
    f.p = 1.2;
    f.m = 0.01;
    const SolveReport rep = solve_monotone(ws, f, BoundaryData::sigma(), 1e-10, 200);
    CHECK(rep.converged);
    CHECK(rep.monotone);
    REQUIRE(rep.boundary_fit.has_value());
    CHECK(rep.boundary_fit->exponent == Catch::Approx(-1.0).margin(0.1));

    // Oversized mass violates the smallness precondition, naming a node.
    Nonlinearity big = f;
    big.m = 100.0;
    CHECK_THROWS_WITH(solve_monotone(ws, big, BoundaryData::sigma()),
                      Catch::Matchers::ContainsSubstring("node"));

    Nonlinearity wrong = f;
    wrong.sign = SignClass::NonPositive;
    CHECK_THROWS_AS(solve_monotone(ws, wrong, BoundaryData::sigma()), domain_error);
}

TEST_CASE("solve_absorption") {
    const auto& ws = ws512();

    const SolveReport triv =
        solve_absorption(ws, zero_f(SignClass::NonPositive), BoundaryData::sigma());
    CHECK(triv.converged);
    CHECK((triv.u - ws.poisson_sigma).cwiseAbs().maxCoeff() == 0.0);

    // Moderate mass: with m large the absorption term bends the boundary
    // rate inside the fitting window, so keep the perturbative regime.
    Nonlinearity f;
    f.sign = SignClass::NonPositive;
    f.theta = 0.0;
    f.p = 1.2;
    f.m = 0.25;
    const SolveReport rep = solve_absorption(ws, f, BoundaryData::sigma(), 1e-8, 400);
    CHECK(rep.converged);
    CHECK(rep.bracket_violation <= 1e-8 * ws.poisson_sigma.maxCoeff());
    REQUIRE(rep.boundary_fit.has_value());
    CHECK(rep.boundary_fit->exponent == Catch::Approx(-1.0).margin(0.1));

    // Boundary rate transfer: same exponent as the Poisson reference.
    std::vector<double> ps(ws.poisson_sigma.data(),
                           ws.poisson_sigma.data() + ws.grid.n);
    const double ref_exp =
        fit_boundary_rate(ps, ws.grid, 2.0 * ws.grid.h, ws.grid.diameter() / 8.0,
                          ws.beta / 2.0)
            .exponent;
    CHECK(rep.boundary_fit->exponent == Catch::Approx(ref_exp).margin(0.1));

    // Supercritical p = 2: the integrability surrogate grows >= 20% per
    // grid doubling.
    std::vector<double> surrogate;
    for (int n : {256, 512}) {
        const Workspace w = make_workspace_interpolated(-1.0, 1.0, n, 1.0, 1.0);
        double s = 0;
        for (int i = 0; i < w.grid.n; ++i)
            s += std::pow(w.poisson_sigma[i], 2.0) * w.V(w.grid.delta[i]) *
                 w.grid.weights[i];
        surrogate.push_back(s);
    }
    CHECK(surrogate[1] / surrogate[0] >= 1.20);
}

TEST_CASE("solve_truncated and uniqueness") {
    const auto& ws = ws512();
    const int n = ws.grid.n;

    // f == 0 inside any bracket containing zero gives u = 0.
    const SolveReport triv = solve_truncated(
        ws, zero_f(SignClass::Signed), Eigen::VectorXd::Constant(n, -1.0),
        Eigen::VectorXd::Constant(n, 1.0));
    CHECK(triv.converged);
    CHECK(triv.u.cwiseAbs().maxCoeff() == 0.0);

    // Odd nonincreasing nonlinearity with zero datum: unique solution 0.
    Nonlinearity f;
    f.sign = SignClass::Signed;
    f.theta = 0.0;
    f.p = 1.1;
    f.m = 1.0;

    const double M = 2.0;
    Eigen::VectorXd bound(n);
    for (int i = 0; i < n; ++i) bound[i] = f.q(ws.grid.delta[i]) * f.lambda_bound(M);
    const Eigen::VectorXd super = apply(ws.green_psi, ws.grid, bound);
    const Eigen::VectorXd sub = -super;

    const double tol = 1e-10;
    const SolveReport base = solve_truncated(ws, f, sub, super, tol, 600);
    CHECK(base.converged);
    CHECK(base.u.cwiseAbs().maxCoeff() <= 1e-8);

    // Uniqueness: five random starts in the bracket agree within 10 tol.
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd start(n);
        for (int i = 0; i < n; ++i)
            start[i] = sub[i] + unif(rng) * (super[i] - sub[i]);
        const SolveReport r = solve_truncated(ws, f, sub, super, tol, 600, 0.5, start);
        CHECK(r.converged);
        CHECK((r.u - base.u).cwiseAbs().maxCoeff() <= 10.0 * tol);
    }

    // Kato check on the signed solution.
    Eigen::VectorXd f_vals(n);
    for (int i = 0; i < n; ++i)
        f_vals[i] = f(ws.grid.nodes[i], ws.grid.delta[i], base.u[i]);
    CHECK(kato_check(ws, base.u, f_vals) <=
          1e-6 * std::max(base.u.cwiseAbs().maxCoeff(), 1e-12));

    CHECK_THROWS_AS(solve_truncated(ws, f, super, sub), domain_error);
}

TEST_CASE("kato_check basics") {
    const auto& ws = ws512();
    Eigen::VectorXd g(ws.grid.n);
    for (int i = 0; i < ws.grid.n; ++i) g[i] = 1.0 + std::sin(ws.grid.nodes[i]);
    const Eigen::VectorXd u = apply(ws.green_psi, ws.grid, g);
    CHECK(std::abs(kato_check(ws, u, g)) <= 1e-10);

    const Eigen::VectorXd neg = -u;
    CHECK(kato_check(ws, neg, g) <= 1e-10);
}

TEST_CASE("weak boundary trace") {
    // Strips t in {0.2, 0.1, 0.05} need >= 8 nodes: n = 512 gives 12 at the
    // finest strip.
    const auto& ws = ws512();
    const auto test_one = [](double) { return 1.0; };

    // Poisson potential of sigma: trace -> zeta_a + zeta_b = 2.
    for (double t : {0.2, 0.1, 0.05}) {
        const double tr = boundary_trace(ws, ws.poisson_sigma, t, test_one);
        CHECK(tr == Catch::Approx(2.0).epsilon(0.10));
    }

    // Green potentials have zero trace: the strip averages shrink as the
    // strip narrows, and the finest strip is already small.
    const Eigen::VectorXd g =
        apply(ws.green_psi, ws.grid, Eigen::VectorXd::Ones(ws.grid.n));
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {0.2, 0.1, 0.05}) {
        const double tr = std::abs(boundary_trace(ws, g, t, test_one));
        CHECK(tr < prev);
        prev = tr;
    }
    CHECK(prev <= 0.10);
}

TEST_CASE("existence sweep classification") {
    const SweepTable table = existence_sweep(-1.0, 1.0, 1.0, 1.0, 0.0, {1.2, 1.8},
                                             {64, 128, 256}, 1e-8, 400);
    REQUIRE(table.rows.size() == 6);
    for (const auto& row : table.rows) {
        if (row.p == 1.2) CHECK(row.klass == "C");
        if (row.p == 1.8) CHECK(row.klass == "D");
    }
    CHECK(table.last_convergent == 1.2);
    CHECK(table.first_divergent == 1.8);
}
