#pragma once

#include <cmath>
#include <cstdlib>

#include "kinlab/errors.hpp"
#include "kinlab/potential.hpp"
#include "kinlab/torus.hpp"

namespace kinlab {

/// Time stepping for the characteristic flow dx/dt = v, dv/dt = -grad W(x).
struct FlowConfig {
    enum class Method { ExactFree, VelocityVerlet };
    Method method = Method::VelocityVerlet;
    double dt = 1e-3;
};

/// Default step size: 1e-3 * min(1, 1/(1+G)) with G the certified gradient
/// sup, so the local error stays uniform across potentials.
inline double default_flow_dt(const Potential& w) {
    return 1e-3 * std::min(1.0, 1.0 / (1.0 + w.grad_sup_bound()));
}

inline FlowConfig default_flow_config(const Potential& w) {
    FlowConfig cfg;
    cfg.method = w.is_zero() ? FlowConfig::Method::ExactFree : FlowConfig::Method::VelocityVerlet;
    cfg.dt = default_flow_dt(w);
    return cfg;
}

namespace detail {

inline void validate_flow(const Potential& w, const FlowConfig& cfg) {
    if (cfg.dt <= 0.0) throw ConfigError("flow dt must be positive");
    if (cfg.method == FlowConfig::Method::ExactFree && !w.is_zero())
        throw ConfigError("exact free transport requested with a nonzero potential");
}

/// One velocity-Verlet step of size h (h may be negative). Volume preserving
/// and time reversible, which is what the certificate bounds lean on.
inline void verlet_step(const Potential& w, Vec& x, Vec& v, double h) {
    Vec vh = v - 0.5 * h * w.gradient(x);
    x += h * vh;
    v = vh - 0.5 * h * w.gradient(x);
}

}  // namespace detail

/// Advance (x, v) by time t (either sign) along the characteristic flow.
/// The interval is cut into equal substeps no longer than cfg.dt.
inline PhasePoint flow(const Potential& w, const PhasePoint& p, double t, const FlowConfig& cfg) {
    detail::validate_flow(w, cfg);
    if (t == 0.0) return p;
    if (w.is_zero()) return {p.x.translated(t * p.v), p.v};

    const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / cfg.dt)));
    const double h = t / double(n);
    Vec x = p.x.coords();
    Vec v = p.v;
    for (long k = 0; k < n; ++k) detail::verlet_step(w, x, v, h);
    return {TorusPoint(x), v};
}

inline PhasePoint flow(const Potential& w, const PhasePoint& p, double t) {
    return flow(w, p, t, default_flow_config(w));
}

/// Positions Phi_x(t_j) at the n+1 equally spaced times t_j = j*T/n, j=0..n,
/// marching once through the interval. Rows are wrapped torus coordinates.
inline Mat flow_positions(const Potential& w, const PhasePoint& p, double T, int n, const FlowConfig& cfg) {
    detail::validate_flow(w, cfg);
    if (n < 1) throw ConfigError("flow sampling needs at least one interval");
    Mat out(n + 1, p.x.dim());
    if (w.is_zero()) {
        for (int j = 0; j <= n; ++j) out.row(j) = wrap(p.x.coords() + (T * j / double(n)) * p.v).transpose();
        return out;
    }
    const double tau = T / double(n);
    const long m = std::max(1L, static_cast<long>(std::ceil(std::abs(tau) / cfg.dt)));
    const double h = tau / double(m);
    Vec x = p.x.coords();
    Vec v = p.v;
    out.row(0) = wrap(x).transpose();
    for (int j = 1; j <= n; ++j) {
        for (long k = 0; k < m; ++k) detail::verlet_step(w, x, v, h);
        out.row(j) = wrap(x).transpose();
    }
    return out;
}

inline Mat flow_positions(const Potential& w, const PhasePoint& p, double T, int n) {
    return flow_positions(w, p, T, n, default_flow_config(w));
}

/// Gronwall bound exp(t_max * (1 + H)) on the phase-space derivative of the
/// flow map over |t| <= t_max, with H the certified Hessian sup.
inline double flow_derivative_bound(const Potential& w, double t_max) {
    return std::exp(std::abs(t_max) * (1.0 + w.hess_sup_bound()));
}

}  // namespace kinlab
