#pragma once

#include <cmath>
#include <vector>

#include "nlslab/errors.hpp"

namespace nlslab {

/// Uniform midpoint discretization of the open interval (a, b).
/// Nodes x_i = a + (i - 1/2) h are strictly interior; all quadrature
/// weights equal h, so sum(w) = b - a exactly.
struct Grid {
    double a = -1.0;
    double b = 1.0;
    int n = 0;
    double h = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> delta;  // distance to the nearest endpoint

    double diameter() const { return b - a; }
};

inline Grid build_grid(double a, double b, int n) {
    if (!(a < b)) throw config_error("build_grid: requires a < b");
    if (n < 16) throw config_error("build_grid: requires n >= 16 nodes");
    Grid g;
    g.a = a;
    g.b = b;
    g.n = n;
    g.h = (b - a) / n;
    g.nodes.resize(n);
    g.weights.assign(n, g.h);
    g.delta.resize(n);
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = a + (i + 0.5) * g.h;
        g.delta[i] = std::min(g.nodes[i] - a, b - g.nodes[i]);
    }
    return g;
}

}  // namespace nlslab
