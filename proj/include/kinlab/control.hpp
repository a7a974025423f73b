#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/flow.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/potential.hpp"
#include "kinlab/sigma.hpp"
#include "kinlab/torus.hpp"
#include "kinlab/velocity_space.hpp"

namespace kinlab {

/// Sampling resolutions for the control-condition search.
struct GccGrid {
    int n_x = 64;       // positions per torus dimension
    int n_v = 17;       // velocity nodes per dimension (odd hits 0 and extremes)
    int n_quad = 256;   // Simpson subintervals per line integral
    double v_max = 0.0; // truncation for unbounded V; 0 = auto (flow-spreading reach)
    double threshold = 1e-6;
    int refine_passes = 2;
    int refine_iters = 40;
    int workers = 1;
};

/// Outcome of the phase-space search for the control functional infimum.
struct GccReport {
    double T = 0.0;
    double kappa_hat = 0.0;
    PhasePoint argmin;
    bool satisfied = false;
    double threshold = 0.0;
    int n_x = 0;
    int n_v_nodes = 0;
    int n_quad = 0;
    double v_truncation = 0.0;       // 0 for bounded velocity spaces
    double equidistribution = 0.0;   // T * int sigma dx, the large-speed proxy (unbounded V)
};

/// int_0^T sigma(Phi_t(p0)) dt by composite Simpson along the characteristic
/// flow. n_quad subintervals (rounded up to even); O(n_quad^-4) for the
/// smooth built-in rates.
inline double line_integral(const SigmaField& sigma, const Potential& w, const PhasePoint& p0, double T,
                            int n_quad, const FlowConfig& cfg) {
    if (T <= 0.0) throw DomainError("line integral needs T > 0");
    if (n_quad < 2) throw DomainError("line integral needs at least 2 subintervals");
    const int n = n_quad + (n_quad % 2);
    const Mat pos = flow_positions(w, p0, T, n, cfg);
    double ends = sigma.value(pos.row(0).transpose()) + sigma.value(pos.row(n).transpose());
    double odd = 0.0, even = 0.0;
    for (int j = 1; j < n; j += 2) odd += sigma.value(pos.row(j).transpose());
    for (int j = 2; j < n; j += 2) even += sigma.value(pos.row(j).transpose());
    return (T / double(n)) / 3.0 * (ends + 4.0 * odd + 2.0 * even);
}

inline double line_integral(const SigmaField& sigma, const Potential& w, const PhasePoint& p0, double T,
                            int n_quad = 256) {
    return line_integral(sigma, w, p0, T, n_quad, default_flow_config(w));
}

namespace detail {

/// Mean of sigma over the torus by uniform-grid quadrature (trapezoid on a
/// periodic integrand, so spectrally accurate for the smooth built-ins).
inline double sigma_mean(const SigmaField& sigma) {
    const int d = sigma.dim();
    const int n = d == 1 ? 4096 : (d == 2 ? 256 : 32);
    const long total = static_cast<long>(std::pow(double(n), d));
    double s = 0.0;
    Vec x(d);
    for (long c = 0; c < total; ++c) {
        long rem = c;
        for (int k = 0; k < d; ++k) {
            x[k] = double(rem % n) / n;
            rem /= n;
        }
        s += sigma.value(x);
    }
    return s / double(total);
}

/// Golden-section minimization of f over [a, b]; returns (argmin, min).
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iters) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double m = 0.5 * (a + b);
    return {m, f(m)};
}

inline double auto_v_max(const Potential& w, double T) {
    const double G = w.grad_sup_bound();
    return 4.0 * (1.0 + G) + 5.0 * G * T;
}

}  // namespace detail

/// Approximate inf over phase space of the control functional: tensor-grid
/// search followed by coordinate-wise golden-section descent around the grid
/// argmin. kappa_hat can only decrease under refinement, so it stays an
/// upper estimate of the true infimum at reported resolution.
inline GccReport gcc_kappa(const SigmaField& sigma, const Potential& w, const VelocitySpace& vspace, double T,
                           const GccGrid& grid = {}) {
    if (sigma.dim() != vspace.dim() || sigma.dim() != w.dim()) throw ConfigError("dimension mismatch");
    if (grid.n_x < 1) throw ConfigError("control search needs a nonempty position grid");
    const int d = sigma.dim();
    const FlowConfig fcfg = default_flow_config(w);

    const double v_max = vspace.bounded() ? 0.0 : (grid.v_max > 0.0 ? grid.v_max : detail::auto_v_max(w, T));
    const Mat vnodes = vspace.search_nodes(grid.n_v, v_max);
    if (vnodes.rows() == 0) throw ConfigError("control search needs a nonempty velocity grid");

    const long nx_total = static_cast<long>(std::pow(double(grid.n_x), d));
    const long total = nx_total * vnodes.rows();
    std::vector<double> vals(total);

    auto point_at = [&](long c) -> PhasePoint {
        const long xi = c % nx_total;
        const long vi = c / nx_total;
        Vec x(d);
        long rem = xi;
        for (int k = 0; k < d; ++k) {
            x[k] = double(rem % grid.n_x) / grid.n_x;
            rem /= grid.n_x;
        }
        return {TorusPoint(x), vnodes.row(vi).transpose()};
    };

    parallel_chunks(total, grid.workers, [&](long i0, long i1) {
        for (long c = i0; c < i1; ++c) vals[c] = line_integral(sigma, w, point_at(c), T, grid.n_quad, fcfg);
    });

    long best = 0;
    for (long c = 1; c < total; ++c)
        if (vals[c] < vals[best]) best = c;
    double kappa = vals[best];
    PhasePoint argmin = point_at(best);

    // Local descent: golden-section per coordinate within one grid spacing,
    // velocities held fixed for discrete V.
    const bool refine_v = vspace.kind() != VelocitySpace::Kind::Discrete;
    Vec xc = argmin.x.coords();
    Vec vc = argmin.v;
    const double hx = 1.0 / grid.n_x;
    double hv = 0.0;
    if (refine_v) {
        double extent = 0.0;
        switch (vspace.kind()) {
            case VelocitySpace::Kind::Ball: extent = 2.0 * vspace.ball_radius(); break;
            case VelocitySpace::Kind::Box: extent = (vspace.box_hi() - vspace.box_lo()).maxCoeff(); break;
            default: extent = 2.0 * v_max; break;
        }
        hv = extent / double(grid.n_v - 1);
    }
    auto eval = [&](const Vec& x, const Vec& v) {
        if (!vspace.contains(v)) return std::numeric_limits<double>::infinity();
        return line_integral(sigma, w, {TorusPoint(x), v}, T, grid.n_quad, fcfg);
    };
    for (int pass = 0; pass < grid.refine_passes; ++pass) {
        for (int k = 0; k < d; ++k) {
            auto [m, fm] = detail::golden_min(
                [&](double t) {
                    Vec x = xc;
                    x[k] = t;
                    return eval(x, vc);
                },
                xc[k] - hx, xc[k] + hx, grid.refine_iters);
            if (fm < kappa) kappa = fm, xc[k] = m;
        }
        if (refine_v)
            for (int k = 0; k < d; ++k) {
                double lo = vc[k] - hv, hi = vc[k] + hv;
                if (vspace.kind() == VelocitySpace::Kind::Box) {
                    lo = std::max(lo, vspace.box_lo()[k]);
                    hi = std::min(hi, vspace.box_hi()[k]);
                } else if (vspace.kind() == VelocitySpace::Kind::Ball && d == 1) {
                    lo = std::max(lo, -vspace.ball_radius());
                    hi = std::min(hi, vspace.ball_radius());
                }
                auto [m, fm] = detail::golden_min(
                    [&](double t) {
                        Vec v = vc;
                        v[k] = t;
                        return eval(xc, v);
                    },
                    lo, hi, grid.refine_iters);
                if (fm < kappa) kappa = fm, vc[k] = m;
            }
    }

    GccReport rep;
    rep.T = T;
    rep.kappa_hat = kappa;
    rep.argmin = {TorusPoint(xc), vc};
    rep.threshold = grid.threshold;
    rep.satisfied = kappa > grid.threshold;
    rep.n_x = grid.n_x;
    rep.n_v_nodes = int(vnodes.rows());
    rep.n_quad = grid.n_quad + (grid.n_quad % 2);
    rep.v_truncation = v_max;
    if (!vspace.bounded()) rep.equidistribution = T * detail::sigma_mean(sigma);
    return rep;
}

/// Time-averaged control extrema over a list of horizons: C_minus is the best
/// (largest) grid minimum of (1/T) * integral, C_plus the best (smallest)
/// grid maximum. Both use the plain sample grid, no local refinement.
inline std::pair<double, double> spectral_constants(const SigmaField& sigma, const Potential& w,
                                                   const VelocitySpace& vspace, const std::vector<double>& T_list,
                                                   const GccGrid& grid = {}) {
    if (T_list.empty()) throw ConfigError("spectral constants need at least one horizon");
    for (size_t i = 1; i < T_list.size(); ++i)
        if (T_list[i] <= T_list[i - 1]) throw ConfigError("horizons must be strictly increasing");
    const int d = sigma.dim();
    const FlowConfig fcfg = default_flow_config(w);
    double c_minus = -std::numeric_limits<double>::infinity();
    double c_plus = std::numeric_limits<double>::infinity();
    for (double T : T_list) {
        const double v_max = vspace.bounded() ? 0.0 : (grid.v_max > 0.0 ? grid.v_max : detail::auto_v_max(w, T));
        const Mat vnodes = vspace.search_nodes(grid.n_v, v_max);
        const long nx_total = static_cast<long>(std::pow(double(grid.n_x), d));
        const long total = nx_total * vnodes.rows();
        std::vector<double> vals(total);
        parallel_chunks(total, grid.workers, [&](long i0, long i1) {
            for (long c = i0; c < i1; ++c) {
                const long xi = c % nx_total;
                const long vi = c / nx_total;
                Vec x(d);
                long rem = xi;
                for (int k = 0; k < d; ++k) {
                    x[k] = double(rem % grid.n_x) / grid.n_x;
                    rem /= grid.n_x;
                }
                vals[c] =
                    line_integral(sigma, w, {TorusPoint(x), vnodes.row(vi).transpose()}, T, grid.n_quad, fcfg) / T;
            }
        });
        double lo = vals[0], hi = vals[0];
        for (double v : vals) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        c_minus = std::max(c_minus, lo);
        c_plus = std::min(c_plus, hi);
    }
    return {c_minus, c_plus};
}

}  // namespace kinlab
