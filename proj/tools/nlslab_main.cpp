// nlslab: batch front-end for the psi(-L) laboratory. Subcommands compute
// eigendata, Green/Poisson kernels, semilinear solves, existence sweeps, and
// the aggregated verification suite, emitting deterministic CSV/JSON files.

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vendor/CLI11.hpp"

#include "nlslab/analysis.hpp"
#include "nlslab/config.hpp"
#include "nlslab/io.hpp"
#include "nlslab/semilinear.hpp"
#include "nlslab/workspace.hpp"

namespace {

using namespace nlslab;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

std::string out_path(const Config& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

Nonlinearity make_nonlinearity(const Config& cfg) {
    Nonlinearity f;
    f.theta = cfg.theta;
    f.p = cfg.p;
    f.m = cfg.m;
    f.sign = cfg.sign == "nonnegative"  ? SignClass::NonNegative
             : cfg.sign == "signed"     ? SignClass::Signed
                                        : SignClass::NonPositive;
    return f;
}

json fit_to_json(const RateFit& fit) {
    return json{{"exponent", fit.exponent},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"log_correction_detected", fit.log_correction_detected},
                {"layers", fit.layers.size()}};
}

// Least-squares slope of log(y) vs log(x) over paired samples.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    return detail::least_squares(lx, ly).slope;
}

double weyl_slope(const Spectrum& spec, int j_lo = 5, int j_hi = 50) {
    std::vector<double> js, ls;
    for (int j = j_lo; j <= std::min(j_hi, spec.size()); ++j) {
        js.push_back(j);
        ls.push_back(spec.eigenvalues[j - 1]);
    }
    return loglog_slope(js, ls);
}

int cmd_eig(const Config& cfg) {
    const Workspace ws = make_workspace_interpolated(cfg.a, cfg.b, cfg.n, cfg.beta,
                                                     cfg.alpha);
    {
        CsvWriter csv(out_path(cfg, "eig.csv"), {"j", "lambda_j"});
        for (int j = 0; j < ws.spectrum.size(); ++j)
            csv.row_numbers({static_cast<double>(j + 1), ws.spectrum.eigenvalues[j]});
    }
    {
        const int k = std::min(6, ws.spectrum.size());
        std::vector<std::string> header{"x"};
        for (int j = 1; j <= k; ++j) header.push_back("phi_" + std::to_string(j));
        CsvWriter csv(out_path(cfg, "eigfun.csv"), header);
        for (int i = 0; i < ws.grid.n; ++i) {
            std::vector<double> row{ws.grid.nodes[i]};
            for (int j = 0; j < k; ++j) row.push_back(ws.spectrum.eigenvectors(i, j));
            csv.row_numbers(row);
        }
    }
    std::vector<double> phi1(ws.grid.n);
    for (int i = 0; i < ws.grid.n; ++i) phi1[i] = ws.spectrum.eigenvectors(i, 0);
    json hopf;  // null when the grid is too coarse for 5 dyadic layers
    try {
        hopf = fit_to_json(fit_boundary_rate(phi1, ws.grid, 2.0 * ws.grid.h,
                                             ws.grid.diameter() / 8.0,
                                             cfg.beta / 2.0));
    } catch (const config_error&) {
    }
    json rates{{"weyl_slope", weyl_slope(ws.spectrum)},
               {"weyl_expected", cfg.beta},
               {"hopf", hopf},
               {"hopf_expected", cfg.beta / 2.0},
               {"lambda_1", ws.spectrum.eigenvalues[0]}};
    write_json(out_path(cfg, "rates.json"), rates);
    return kExitOk;
}

int cmd_green(const Config& cfg) {
    const Workspace ws = make_workspace_interpolated(cfg.a, cfg.b, cfg.n, cfg.beta,
                                                     cfg.alpha);
    {
        CsvWriter csv(out_path(cfg, "green.csv"), {"i", "j", "x", "y", "G_psi"});
        for (int i = 0; i < ws.grid.n; ++i)
            for (int j = 0; j < ws.grid.n; ++j)
                csv.row_numbers({static_cast<double>(i), static_cast<double>(j),
                                 ws.grid.nodes[i], ws.grid.nodes[j],
                                 ws.green_psi.entries(i, j)});
    }
    const double beta = cfg.beta, alpha = cfg.alpha;
    const auto env = [&](double x, double y) {
        const double da = std::min(std::abs(x - cfg.a), std::abs(cfg.b - x));
        const double db = std::min(std::abs(y - cfg.a), std::abs(cfg.b - y));
        const double r = std::abs(x - y);
        const double Vd = std::pow(r, beta / 2.0);
        const double fa = std::min(std::pow(da, beta / 2.0) / Vd, 1.0);
        const double fb = std::min(std::pow(db, beta / 2.0) / Vd, 1.0);
        const double psi_scale = std::pow(std::pow(Vd, -2.0), alpha / 2.0);
        return fa * fb / (r * psi_scale);
    };
    const EnvelopeBand band = envelope_check(ws.green_psi, ws.grid, env, 4);
    write_json(out_path(cfg, "envelope.json"),
               json{{"c_low", band.c_low},
                    {"c_high", band.c_high},
                    {"band_ratio", band.c_high / band.c_low},
                    {"nonpositive_entries", band.nonpositive_entries},
                    {"exclusion", 4}});
    return kExitOk;
}

int cmd_poisson(const Config& cfg) {
    const Workspace ws = make_workspace_interpolated(cfg.a, cfg.b, cfg.n, cfg.beta,
                                                     cfg.alpha);
    {
        CsvWriter csv(out_path(cfg, "poisson.csv"),
                      {"x", "delta", "P_a", "P_b", "P_sigma", "residual_a",
                       "residual_b"});
        for (int i = 0; i < ws.grid.n; ++i)
            csv.row_numbers({ws.grid.nodes[i], ws.grid.delta[i],
                             ws.poisson.values(i, 0), ws.poisson.values(i, 1),
                             ws.poisson_sigma[i],
                             ws.poisson.diagnostics[0].max_residual,
                             ws.poisson.diagnostics[1].max_residual});
    }
    std::vector<double> ps(ws.poisson_sigma.data(),
                           ws.poisson_sigma.data() + ws.grid.n);
    json fit;  // null when the grid is too coarse for 5 dyadic layers
    try {
        fit = fit_to_json(fit_boundary_rate(ps, ws.grid, 2.0 * ws.grid.h,
                                            ws.grid.diameter() / 8.0,
                                            cfg.beta / 2.0));
    } catch (const config_error&) {
    }
    const double expected = -1.0 - cfg.beta / 2.0 + cfg.alpha * cfg.beta / 2.0;
    write_json(out_path(cfg, "poisson_rates.json"),
               json{{"fit", fit},
                    {"expected_exponent", expected},
                    {"monotone_warning_a", ws.poisson.diagnostics[0].monotone_warning},
                    {"monotone_warning_b", ws.poisson.diagnostics[1].monotone_warning}});
    return kExitOk;
}

int cmd_solve(const Config& cfg) {
    const Workspace ws = make_workspace_interpolated(cfg.a, cfg.b, cfg.n, cfg.beta,
                                                     cfg.alpha);
    const Nonlinearity f = make_nonlinearity(cfg);
    const BoundaryData zeta{cfg.zeta_a, cfg.zeta_b};
    SolveReport rep;
    if (f.sign == SignClass::NonNegative) {
        rep = solve_monotone(ws, f, zeta, cfg.tol, cfg.max_iter);
    } else if (f.sign == SignClass::NonPositive) {
        rep = solve_absorption(ws, f, zeta, cfg.tol, cfg.max_iter);
    } else {
        // Signed nonlinearities run through the truncated scheme with the
        // symmetric Green-potential bracket built from the growth bound.
        const double M = poisson_potential(ws.poisson, zeta).cwiseAbs().maxCoeff() + 1.0;
        Eigen::VectorXd qvec(ws.grid.n);
        for (int i = 0; i < ws.grid.n; ++i)
            qvec[i] = f.q(ws.grid.delta[i]) * f.lambda_bound(M);
        const Eigen::VectorXd super = apply(ws.green_psi, ws.grid, qvec);
        rep = solve_truncated(ws, f, -super, super, cfg.tol, cfg.max_iter);
    }
    {
        CsvWriter csv(out_path(cfg, "solution.csv"), {"x", "delta", "u"});
        for (int i = 0; i < ws.grid.n; ++i)
            csv.row_numbers({ws.grid.nodes[i], ws.grid.delta[i], rep.u[i]});
    }
    json report{{"iterations", rep.iterations},
                {"converged", rep.converged},
                {"final_residual",
                 rep.residual_trace.empty() ? 0.0 : rep.residual_trace.back()},
                {"monotone", rep.monotone},
                {"bracket_violation", rep.bracket_violation},
                {"omega", rep.omega_final},
                {"tolerance", cfg.tol}};
    if (rep.boundary_fit) report["boundary_fit"] = fit_to_json(*rep.boundary_fit);
    write_json(out_path(cfg, "report.json"), report);
    return rep.converged ? kExitOk : kExitNumerical;
}

int cmd_sweep(const Config& cfg) {
    std::vector<double> p_grid;
    for (double p = cfg.p_min; p <= cfg.p_max + 1e-12; p += cfg.p_step)
        p_grid.push_back(p);
    const SweepTable table =
        existence_sweep(cfg.a, cfg.b, cfg.alpha, cfg.beta, cfg.theta, p_grid,
                        cfg.n_levels, cfg.tol, cfg.max_iter);
    CsvWriter csv(out_path(cfg, "sweep.csv"),
                  {"p", "n", "class", "surrogate", "residual", "boundary_exponent"});
    for (const auto& r : table.rows)
        csv.row({format_number(r.p), std::to_string(r.n), r.klass,
                 format_number(r.surrogate), format_number(r.residual),
                 format_number(r.boundary_exponent)});
    write_json(out_path(cfg, "sweep_summary.json"),
               json{{"critical_exponent",
                     critical_exponent(cfg.alpha, cfg.beta, cfg.theta)},
                    {"last_convergent", table.last_convergent},
                    {"first_divergent", table.first_divergent}});
    return kExitOk;
}

struct Check {
    std::string name;
    bool pass;
    double measured;
    double expected;
    double tolerance;
};

int cmd_verify(const Config& cfg) {
    std::vector<Check> checks;
    const auto add = [&](const std::string& name, double measured, double expected,
                         double tolerance) {
        checks.push_back(
            {name, std::abs(measured - expected) <= tolerance, measured, expected,
             tolerance});
    };

    const Workspace ws = make_workspace_interpolated(cfg.a, cfg.b, cfg.n, cfg.beta,
                                                     cfg.alpha);
    const auto fit_of = [&](const Eigen::VectorXd& v) {
        std::vector<double> vals(v.data(), v.data() + v.size());
        return fit_boundary_rate(vals, ws.grid, 2.0 * ws.grid.h,
                                 ws.grid.diameter() / 8.0, cfg.beta / 2.0);
    };

    // Conjugate factorization identities.
    {
        const OperatorMatrix g = green_matrix(ws.spectrum, GreenKind::G, ws.psi);
        const OperatorMatrix g_star =
            green_matrix(ws.spectrum, GreenKind::GPsiStar, ws.psi);
        const Eigen::MatrixXd prod = compose(ws.green_psi, ws.grid, g_star);
        add("factorization_green", (prod - g.entries).norm() / g.entries.norm(), 0.0,
            1e-9);
        const OperatorMatrix psi_star_op = materialize(
            ws.spectrum,
            [ps = conjugate(ws.psi)](double l) { return ps(l); },
            MatrixKind::GeneratorMinus);
        const Eigen::MatrixXd comp = compose(ws.psi_op, ws.grid, psi_star_op);
        add("factorization_generator",
            (comp - ws.generator.entries).norm() / ws.generator.entries.norm(), 0.0,
            1e-9);
    }

    // Subordination oracle vs spectral calculus, off-diagonal relative error.
    {
        const Workspace ws_small =
            make_workspace_interpolated(cfg.a, cfg.b, std::min(cfg.n, 256), cfg.beta,
                                        cfg.alpha);
        const SubordinationResult oracle = green_oracle_subordination(
            ws_small.spectrum, ws_small.psi, 40.0 / ws_small.spectrum.eigenvalues[0],
            400);
        double worst = 0.0;
        for (int i = 0; i < ws_small.grid.n; ++i)
            for (int j = 0; j < ws_small.grid.n; ++j) {
                if (std::abs(i - j) < 2) continue;
                worst = std::max(worst,
                                 std::abs(oracle.matrix.entries(i, j) -
                                          ws_small.green_psi.entries(i, j)) /
                                     std::abs(ws_small.green_psi.entries(i, j)));
            }
        add("green_oracle_offdiag", worst, 0.0, 1e-4);
    }

    // Hopf and Weyl rates.
    add("hopf_exponent", fit_of(ws.spectrum.eigenvectors.col(0)).exponent,
        cfg.beta / 2.0, 0.05);
    add("weyl_slope", weyl_slope(ws.spectrum), cfg.beta, 0.05);

    // Poisson boundary rate.
    add("poisson_sigma_exponent", fit_of(ws.poisson_sigma).exponent,
        -1.0 - cfg.beta / 2.0 + cfg.alpha * cfg.beta / 2.0, 0.1);

    // rho-invariance: G_psi applied to the boundary weight decays like V.
    {
        Eigen::VectorXd rho(ws.grid.n);
        for (int i = 0; i < ws.grid.n; ++i)
            rho[i] = weight_rho(ws.phi, ws.psi, ws.grid.delta[i]);
        add("rho_invariance_exponent",
            fit_of(apply(ws.green_psi, ws.grid, rho)).exponent, cfg.beta / 2.0, 0.07);
    }

    // Weak maximum principle for a battery of nonnegative data.
    {
        double worst = 0.0;
        std::mt19937 rng(cfg.seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::VectorXd lam(ws.grid.n);
            for (int i = 0; i < ws.grid.n; ++i) lam[i] = unif(rng);
            const BoundaryData z{unif(rng), unif(rng)};
            const SolveReport rep = solve_linear(ws, lam, z);
            worst = std::max(worst, -rep.u.minCoeff() / rep.u.maxCoeff());
        }
        add("max_principle", std::max(worst, 0.0), 0.0, 1e-10);
    }

    // Kato equality case on a Green potential of nonnegative data.
    {
        Eigen::VectorXd g(ws.grid.n);
        for (int i = 0; i < ws.grid.n; ++i)
            g[i] = 1.0 + std::cos(ws.grid.nodes[i]);
        const Eigen::VectorXd u = apply(ws.green_psi, ws.grid, g);
        add("kato_equality", std::abs(kato_check(ws, u, g)), 0.0, 1e-10);
    }

    // Weak trace of the Poisson potential against a fixed test profile.
    {
        const auto test = [](double) { return 1.0; };
        const double target = 2.0;  // zeta_a + zeta_b for sigma, test == 1
        const double tr = boundary_trace(ws, ws.poisson_sigma, 0.05, test);
        add("weak_trace_sigma", tr / target, 1.0, 0.10);
    }

    json suites = json::array();
    bool all_pass = true;
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        suites.push_back(json{{"name", c.name},
                              {"pass", c.pass},
                              {"measured", c.measured},
                              {"expected", c.expected},
                              {"tolerance", c.tolerance}});
    }
    write_json(out_path(cfg, "verify.json"),
               json{{"all_pass", all_pass}, {"suites", suites}});
    return all_pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("NLSLAB_THREADS")) {
        const int t = std::atoi(threads);
        if (t > 0) Eigen::setNbThreads(t);
    }

    CLI::App app{"numerical laboratory for psi(-L) on an interval"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int n = -1;
    double beta = -1, alpha = -1, theta = std::numeric_limits<double>::quiet_NaN();
    double p = -1, tol = -1;
    long seed = -1;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--n", n, "grid size");
        sub->add_option("--beta", beta, "inner stable index in (0,2)");
        sub->add_option("--alpha", alpha, "outer power index in (0,2)");
        sub->add_option("--theta", theta, "boundary weight exponent");
        sub->add_option("--p", p, "nonlinearity growth exponent");
        sub->add_option("--tol", tol, "iteration tolerance");
        sub->add_option("--seed", seed, "seed for randomized batteries");
    };

    std::vector<std::string> names{"eig", "green", "poisson", "solve", "sweep",
                                   "verify"};
    for (const auto& name : names) add_common(app.add_subcommand(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        Config cfg;
        if (!config_path.empty())
            cfg = nlslab::config_from_map(nlslab::parse_key_value_file(config_path));
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (n >= 0) cfg.n = n;
        if (beta > 0) cfg.beta = beta;
        if (alpha > 0) cfg.alpha = alpha;
        if (!std::isnan(theta)) cfg.theta = theta;
        if (p > 0) cfg.p = p;
        if (tol > 0) cfg.tol = tol;
        if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
        nlslab::validate(cfg);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "eig") return cmd_eig(cfg);
        if (sub == "green") return cmd_green(cfg);
        if (sub == "poisson") return cmd_poisson(cfg);
        if (sub == "solve") return cmd_solve(cfg);
        if (sub == "sweep") return cmd_sweep(cfg);
        if (sub == "verify") return cmd_verify(cfg);
        return kExitConfig;
    } catch (const nlslab::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const nlslab::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const nlslab::numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    }
}
