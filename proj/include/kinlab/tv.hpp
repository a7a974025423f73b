#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/particles.hpp"
#include "kinlab/phase_density.hpp"

namespace kinlab {

/// Total variation distance between grid densities: the L1 distance against
/// the reference measure, so disjoint probabilities sit at distance 2.
inline double tv_grid(const PhaseDensity& f, const PhaseDensity& g) {
    if (!f.same_grid(g)) throw DomainError("total variation needs matching grids");
    double s = 0.0;
    for (int j = 0; j < f.n_v(); ++j) s += f.q[j] * (f.values.col(j) - g.values.col(j)).abs().sum();
    return s * f.xgrid.cell_volume();
}

/// TV between the ensemble's histogram and a grid density, both aggregated
/// onto n_xbins x n_vbins bins (bin edges aligned with the grid, so cell
/// counts must divide evenly). Coarse bins trade spatial resolution for
/// sampling noise ~ sqrt(bins / N).
inline double tv_empirical(const ParticleEnsemble& e, const PhaseDensity& ref, const VelocityGrid& vg, int n_xbins,
                           int n_vbins) {
    if (ref.xgrid.d != 1) throw ConfigError("empirical TV covers 1-D grids");
    if (vg.n() != ref.n_v()) throw ConfigError("velocity grid does not match the reference density");
    if (n_xbins < 1 || ref.xgrid.n_per_dim % n_xbins != 0)
        throw ConfigError("x bins must evenly divide the grid cells");
    if (n_vbins < 1 || vg.n() % n_vbins != 0) throw ConfigError("v bins must evenly divide the velocity nodes");
    const int cx = ref.xgrid.n_per_dim / n_xbins;
    const int cv = vg.n() / n_vbins;

    Eigen::ArrayXXd rmass = Eigen::ArrayXXd::Zero(n_xbins, n_vbins);
    for (int j = 0; j < ref.n_v(); ++j)
        for (long i = 0; i < ref.n_cells(); ++i)
            rmass(int(i) / cx, j / cv) += ref.values(i, j) * ref.xgrid.cell_volume() * ref.q[j];

    Eigen::ArrayXXd emass = Eigen::ArrayXXd::Zero(n_xbins, n_vbins);
    const double wgt = 1.0 / double(e.n());
    for (long i = 0; i < e.n(); ++i) {
        int xb = int(wrap1(e.x(i, 0)) * n_xbins);
        if (xb >= n_xbins) xb = n_xbins - 1;
        int vb;
        if (vg.kind() == VelocityGrid::Kind::Discrete) {
            int nearest = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < vg.n(); ++j) {
                const double d = std::abs(e.v(i, 0) - vg.nodes()(j, 0));
                if (d < best) best = d, nearest = j;
            }
            vb = nearest / cv;
        } else {
            const double vmax = vg.ball_v_max();
            vb = int((e.v(i, 0) + vmax) / (2.0 * vmax) * n_vbins);
            if (vb < 0) vb = 0;
            if (vb >= n_vbins) vb = n_vbins - 1;
        }
        emass(xb, vb) += wgt;
    }
    return (rmass - emass).abs().sum();
}

/// Decay data with its fitted exponential rate.
struct DecayCurve {
    std::vector<double> times;
    std::vector<double> tv_values;
    double fitted_lambda = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double residual = 0.0;  // RMS of log residuals over the window
};

/// Least squares of log(tv) against t over [window_lo, window_hi];
/// fitted_lambda is minus the slope.
inline DecayCurve fit_decay(const std::vector<double>& times, const std::vector<double>& tvs, double window_lo,
                            double window_hi) {
    if (times.size() != tvs.size()) throw DomainError("decay fit needs aligned times and values");
    std::vector<double> t, y;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_lo || times[i] > window_hi) continue;
        if (!(tvs[i] > 0.0)) throw DomainError("decay fit needs positive tv values in the window");
        t.push_back(times[i]);
        y.push_back(std::log(tvs[i]));
    }
    const size_t n = t.size();
    if (n < 3) throw DomainError("decay fit needs at least 3 points in the window");
    double mt = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) mt += t[i], my += y[i];
    mt /= n, my /= n;
    double stt = 0.0, sty = 0.0;
    for (size_t i = 0; i < n; ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        sty += (t[i] - mt) * (y[i] - my);
    }
    if (stt == 0.0) throw DomainError("decay fit needs at least two distinct times");
    const double slope = sty / stt;
    const double icept = my - slope * mt;
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (icept + slope * t[i]);
        ss += r * r;
    }
    DecayCurve c;
    c.times = times;
    c.tv_values = tvs;
    c.fitted_lambda = -slope;
    c.window_lo = window_lo;
    c.window_hi = window_hi;
    c.residual = std::sqrt(ss / n);
    return c;
}

struct EnvelopeCheck {
    bool pass = false;
    double worst_margin = 0.0;  // min over checked points of envelope + eps - tv
    double worst_time = 0.0;
};

/// Verify tv(t) <= exp(-lambda (t - t_star)) * tv0 + eps at every sampled
/// t >= t_star. The bound is only claimed beyond t_star, so earlier samples
/// are ignored.
inline EnvelopeCheck envelope_check(const std::vector<double>& times, const std::vector<double>& tvs, double lambda,
                                    double t_star, double tv0, double eps = 1e-9) {
    if (times.size() != tvs.size()) throw DomainError("envelope check needs aligned times and values");
    EnvelopeCheck r;
    bool any = false;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_star - 1e-12) continue;
        const double margin = std::exp(-lambda * (times[i] - t_star)) * tv0 + eps - tvs[i];
        if (!any || margin < r.worst_margin) {
            r.worst_margin = margin;
            r.worst_time = times[i];
        }
        any = true;
    }
    if (!any) throw DomainError("envelope check needs samples at or beyond t_star");
    r.pass = r.worst_margin >= 0.0;
    return r;
}

}  // namespace kinlab
