#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/operator_matrix.hpp"

namespace nlslab {

/// Result of a log-log boundary-rate fit over dyadic distance layers.
struct RateFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool log_correction_detected = false;
    std::vector<std::pair<double, double>> layers;  // (delta_layer, geometric mean)
};

namespace detail {

struct LinFit {
    double slope, intercept, ss_res, ss_tot;
};

inline LinFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const int m = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = m * sxx - sx * sx;
    LinFit f{};
    f.slope = (m * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / m;
    f.ss_res = 0;
    f.ss_tot = 0;
    const double mean_y = sy / m;
    for (int i = 0; i < m; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        f.ss_res += r * r;
        f.ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    return f;
}

}  // namespace detail

/// Fits the boundary decay exponent of |values| against the boundary
/// distance over dyadic layers [2^{-k-1}, 2^{-k}] * delta_max. Each layer
/// contributes the geometric mean of its node values at the geometric mean
/// of its node distances; the finest admitted layer is floored at 2h. A
/// multiplicative log correction v = c delta^e log(C/delta) is flagged when
/// it improves the fit residual by at least 30%. When a saturation cap is
/// supplied (the maximal boundary exponent of the kernel class at hand,
/// e.g. beta/2 for Green-type potentials) the correction is additionally
/// required to place its exponent at the cap: genuine multiplicative logs
/// appear only at that transition, while pre-asymptotic power tails away
/// from it can mimic a log over any finite window.
inline RateFit fit_boundary_rate(const std::vector<double>& values, const Grid& grid,
                                 double delta_min, double delta_max,
                                 double saturation_cap =
                                     std::numeric_limits<double>::quiet_NaN()) {
    const double floor_delta = std::max(delta_min, 2.0 * grid.h);
    if (!(floor_delta < delta_max))
        throw config_error("fit_boundary_rate: empty fitting window");

    std::vector<double> log_d, log_v;
    double upper = delta_max;
    while (upper > floor_delta) {
        const double lower = std::max(0.5 * upper, floor_delta);
        double sum_ld = 0, sum_lv = 0;
        int count = 0;
        for (int i = 0; i < grid.n; ++i) {
            const double d = grid.delta[i];
            if (d >= lower && d < upper && std::abs(values[i]) > 0) {
                sum_ld += std::log(d);
                sum_lv += std::log(std::abs(values[i]));
                ++count;
            }
        }
        if (count > 0) {
            log_d.push_back(sum_ld / count);
            log_v.push_back(sum_lv / count);
        }
        upper = lower;
    }
    if (log_d.size() < 5)
        throw config_error("fit_boundary_rate: fewer than 5 dyadic layers resolved");

    const auto plain = detail::least_squares(log_d, log_v);

    // Alternative model v = c delta^e log(C/delta). The offset C inside the
    // log shifts where the correction bends the curve, so it is scanned over
    // a short geometric grid anchored at the domain diameter.
    const double diam = grid.diameter();
    detail::LinFit with_log{};
    with_log.ss_res = std::numeric_limits<double>::infinity();
    for (double c_log = diam; c_log <= 32.0 * diam; c_log *= 2.0) {
        std::vector<double> log_v_corr(log_v);
        for (std::size_t k = 0; k < log_v.size(); ++k)
            log_v_corr[k] -= std::log(std::log(c_log / std::exp(log_d[k])));
        const auto cand = detail::least_squares(log_d, log_v_corr);
        if (cand.ss_res < with_log.ss_res) with_log = cand;
    }

    RateFit fit;
    fit.log_correction_detected =
        with_log.ss_res < 0.7 * plain.ss_res && plain.ss_res > 1e-12 &&
        (std::isnan(saturation_cap) ||
         std::abs(with_log.slope - saturation_cap) <= 0.1);
    const auto& best = fit.log_correction_detected ? with_log : plain;
    fit.exponent = best.slope;
    fit.intercept = best.intercept;
    fit.r_squared = plain.ss_tot > 0 ? 1.0 - plain.ss_res / plain.ss_tot : 1.0;
    for (std::size_t k = 0; k < log_d.size(); ++k)
        fit.layers.emplace_back(std::exp(log_d[k]), std::exp(log_v[k]));
    return fit;
}

struct EnvelopeBand {
    double c_low = 0.0;
    double c_high = 0.0;
    int nonpositive_entries = 0;  // entries skipped because M <= 0 in the included set
};

/// Extremal ratios entry / formula over the index set |i-j| >= exclusion.
inline EnvelopeBand envelope_check(const OperatorMatrix& M, const Grid& grid,
                                   const std::function<double(double, double)>& formula,
                                   int exclusion) {
    EnvelopeBand band;
    band.c_low = std::numeric_limits<double>::infinity();
    band.c_high = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            if (std::abs(i - j) < exclusion) continue;
            const double env = formula(grid.nodes[i], grid.nodes[j]);
            if (!(env > 0))
                throw domain_error("envelope_check: formula must be positive on the "
                                   "included index set");
            const double entry = M.entries(i, j);
            if (!(entry > 0)) {
                ++band.nonpositive_entries;
                continue;
            }
            const double ratio = entry / env;
            band.c_low = std::min(band.c_low, ratio);
            band.c_high = std::max(band.c_high, ratio);
        }
    }
    return band;
}

}  // namespace nlslab
