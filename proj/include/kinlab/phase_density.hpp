#pragma once

#include <cmath>
#include <utility>

#include "kinlab/errors.hpp"
#include "kinlab/potential.hpp"
#include "kinlab/torus.hpp"
#include "kinlab/velocity_grid.hpp"

namespace kinlab {

/// Uniform cell grid on the torus, cells centred at (i + 1/2) * dx per
/// dimension. Cells are indexed flat, first dimension fastest.
struct SpaceGrid {
    int d = 1;
    int n_per_dim = 0;

    SpaceGrid(int d_, int n_) : d(d_), n_per_dim(n_) {
        if (d < 1 || d > 2) throw ConfigError("space grid covers d = 1 or 2");
        if (n_ < 2) throw ConfigError("space grid needs at least 2 cells per dimension");
    }

    long cells() const {
        long c = 1;
        for (int k = 0; k < d; ++k) c *= n_per_dim;
        return c;
    }
    double dx() const { return 1.0 / n_per_dim; }
    /// Cell measure dx^d.
    double cell_volume() const { return std::pow(dx(), d); }

    Vec center(long flat) const {
        Vec x(d);
        for (int k = 0; k < d; ++k) {
            x[k] = (double(flat % n_per_dim) + 0.5) * dx();
            flat /= n_per_dim;
        }
        return x;
    }

    long cell_of(const Vec& x) const {
        long flat = 0, stride = 1;
        for (int k = 0; k < d; ++k) {
            long i = long(std::floor(wrap1(x[k]) * n_per_dim));
            if (i >= n_per_dim) i = n_per_dim - 1;
            flat += stride * i;
            stride *= n_per_dim;
        }
        return flat;
    }

    bool operator==(const SpaceGrid& o) const { return d == o.d && n_per_dim == o.n_per_dim; }
};

/// Steady state on the grid: spatial density nu_x against dx^d (sums to 1
/// when multiplied by the cell volume) and the velocity probability per node.
struct Equilibrium {
    Vec nu_x;        // density against Lebesgue, one entry per cell
    Vec nu_v;        // probability weight per velocity node (q * m)
    Vec m;           // velocity density against q
};

/// Gridded density on phase space, relative to (cell volume) x (velocity
/// quadrature weight q). values(i, j): cell i, velocity node j; velocity
/// columns are contiguous. Mass = sum values(i,j) * vol * q_j.
struct PhaseDensity {
    Eigen::ArrayXXd values;
    SpaceGrid xgrid{1, 2};
    Vec q;
    double time = 0.0;

    PhaseDensity() = default;
    PhaseDensity(const SpaceGrid& g, const Vec& qw)
        : values(Eigen::ArrayXXd::Zero(g.cells(), qw.size())), xgrid(g), q(qw) {}

    long n_cells() const { return values.rows(); }
    int n_v() const { return int(values.cols()); }

    double mass() const {
        double s = 0.0;
        for (int j = 0; j < n_v(); ++j) s += q[j] * values.col(j).sum();
        return s * xgrid.cell_volume();
    }

    double min_value() const { return values.minCoeff(); }

    bool same_grid(const PhaseDensity& o) const {
        return xgrid == o.xgrid && q.size() == o.q.size() && (q - o.q).cwiseAbs().maxCoeff() <= 1e-15;
    }
};

/// The equilibrium as a PhaseDensity (values nu_x(i) * m(j); an exact fixed
/// point of the relaxation step and of exact-shift transport).
inline PhaseDensity equilibrium_density(const SpaceGrid& g, const VelocityGrid& vg, const Potential& w,
                                        double time = 0.0) {
    if (w.dim() != g.d) throw ConfigError("potential dimension must match the space grid");
    Vec nu_x(g.cells());
    for (long i = 0; i < g.cells(); ++i) nu_x[i] = std::exp(-w.value(g.center(i)));
    nu_x /= nu_x.sum() * g.cell_volume();
    PhaseDensity f(g, vg.quad_weights());
    for (int j = 0; j < f.n_v(); ++j) f.values.col(j) = nu_x.array() * vg.equilibrium_density()[j];
    f.time = time;
    return f;
}

inline Equilibrium make_equilibrium(const SpaceGrid& g, const VelocityGrid& vg, const Potential& w) {
    Vec nu_x(g.cells());
    for (long i = 0; i < g.cells(); ++i) nu_x[i] = std::exp(-w.value(g.center(i)));
    nu_x /= nu_x.sum() * g.cell_volume();
    Equilibrium eq;
    eq.nu_x = nu_x;
    eq.m = vg.equilibrium_density();
    eq.nu_v = vg.quad_weights().cwiseProduct(eq.m);
    return eq;
}

/// All mass in a single phase cell (a grid delta), total mass 1.
inline PhaseDensity cell_delta(const SpaceGrid& g, const VelocityGrid& vg, long cell, int vnode) {
    if (cell < 0 || cell >= g.cells() || vnode < 0 || vnode >= vg.n())
        throw ConfigError("delta cell indices out of range");
    PhaseDensity f(g, vg.quad_weights());
    f.values(cell, vnode) = 1.0 / (g.cell_volume() * vg.quad_weights()[vnode]);
    return f;
}

}  // namespace kinlab
