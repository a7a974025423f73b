#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "kinlab/certificate.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/flow.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/phase_density.hpp"
#include "kinlab/potential.hpp"
#include "kinlab/sigma.hpp"
#include "kinlab/tv.hpp"
#include "kinlab/velocity_grid.hpp"

namespace kinlab {

/// Transport-relaxation splitting solver on a fixed phase-space grid.
/// One step is Strang: half transport, exact relaxation over dt, half
/// transport. Transport is an exact circular shift whenever v*dt/(2 dx) is
/// an integer and a CFL-limited semi-Lagrangian linear interpolation
/// otherwise; with a potential, transport back-traces one reverse
/// velocity-Verlet step through phase space (1-D interval velocity grids).
class GridSolver {
  public:
    struct RunResult {
        std::vector<PhaseDensity> snapshots;
        std::vector<double> mass;
        std::vector<double> min_value;
    };
    struct Margin {
        bool pass = false;
        double margin = 0.0;
    };
    struct Contraction {
        bool pass = false;
        double ratio = 0.0;
    };

    GridSolver(const SpaceGrid& g, const VelocityGrid& vg, const SigmaField& sigma, const Potential& w, double dt,
               int workers = 1)
        : g_(g), vg_(vg), dt_(dt), workers_(workers < 1 ? 1 : workers), with_force_(!w.is_zero()) {
        if (dt <= 0.0) throw ConfigError("solver dt must be positive");
        // Thread spawns cost more than the arithmetic on small grids; results
        // are identical either way, so below this size run the step serially.
        if (g.cells() * vg.n() < (1L << 16)) workers_ = 1;
        if (sigma.dim() != g.d || w.dim() != g.d || vg.dim() != g.d)
            throw ConfigError("solver grid, rate and potential dimensions must agree");
        if (g.d == 2) {
            if (g.cells() * vg.n() > (1L << 22))
                throw ConfigError("2-D grid exceeds the desk-scale size guard (n_x^2 * n_v <= 2^22)");
            if (with_force_ || vg.kind() != VelocityGrid::Kind::Discrete)
                throw ConfigError("2-D grids support discrete velocities with no potential");
        }
        if (with_force_ && vg.kind() != VelocityGrid::Kind::UniformBall1D)
            throw ConfigError("transport with a force needs a 1-D interval velocity grid");

        sigma_sup_ = sigma.sup_norm();
        sigma_cells_ = Vec(g.cells());
        for (long i = 0; i < g.cells(); ++i) sigma_cells_[i] = sigma.value(g.center(i));
        decay_ = (-dt * sigma_cells_.array()).exp();
        eq_ = make_equilibrium(g, vg, w);

        const double h = 0.5 * dt;
        if (!with_force_) {
            // Per-velocity shift of h * v in cell units, split into exact and
            // interpolating columns.
            shifts_.resize(vg.n() * g.d);
            fracs_.assign(vg.n(), 0.0);
            for (int j = 0; j < vg.n(); ++j)
                for (int k = 0; k < g.d; ++k) {
                    const double delta = vg.nodes()(j, k) * h / g.dx();
                    const double r = std::round(delta);
                    if (std::abs(delta - r) <= 1e-9) {
                        shifts_[j * g.d + k] = long(r);
                        continue;
                    }
                    if (g.d == 2) throw ConfigError("2-D transport needs exact shifts: v*dt/(2dx) must be integer");
                    if (std::abs(delta) > 1.0 + 1e-12)
                        throw ConfigError("CFL violation: |v|*dt/(2dx) > 1 for interpolating transport");
                    const double a = std::floor(delta);
                    shifts_[j] = long(a);
                    fracs_[j] = delta - a;
                }
        } else {
            build_force_stencil(w, h);
        }
    }

    const SpaceGrid& xgrid() const { return g_; }
    const VelocityGrid& vgrid() const { return vg_; }
    double dt() const { return dt_; }
    double sigma_sup() const { return sigma_sup_; }
    const Equilibrium& equilibrium() const { return eq_; }

    PhaseDensity equilibrium_state() const {
        PhaseDensity f(g_, vg_.quad_weights());
        for (int j = 0; j < vg_.n(); ++j) f.values.col(j) = eq_.nu_x.array() * eq_.m[j];
        return f;
    }

    /// One Strang step; advances f.time by dt.
    void step(PhaseDensity& f) const {
        transport_half(f);
        relax(f);
        transport_half(f);
        f.time += dt_;
    }

    /// March to t_end recording the states nearest the requested times
    /// (which must be nondecreasing and inside [f0.time, t_end]).
    RunResult run(const PhaseDensity& f0, double t_end, const std::vector<double>& snapshot_times) const {
        check_state(f0);
        if (t_end < f0.time - 1e-12) throw ConfigError("t_end precedes the initial time");
        const long n_steps = std::lround((t_end - f0.time) / dt_);
        std::vector<long> targets(snapshot_times.size());
        for (size_t s = 0; s < snapshot_times.size(); ++s) {
            targets[s] = std::lround((snapshot_times[s] - f0.time) / dt_);
            if (targets[s] < 0 || targets[s] > n_steps)
                throw ConfigError("snapshot times must lie within [start, t_end]");
            if (s > 0 && targets[s] < targets[s - 1]) throw ConfigError("snapshot times must be nondecreasing");
        }
        RunResult out;
        PhaseDensity f = f0;
        size_t next = 0;
        auto record = [&](long k) {
            while (next < targets.size() && targets[next] == k) {
                out.snapshots.push_back(f);
                out.mass.push_back(f.mass());
                out.min_value.push_back(f.min_value());
                ++next;
            }
        };
        record(0);
        for (long k = 1; k <= n_steps; ++k) {
            step(f);
            record(k);
        }
        return out;
    }

    /// min over phase cells of f / equilibrium.
    double minorization_ratio(const PhaseDensity& f) const {
        check_state(f);
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < vg_.n(); ++j)
            m = std::min(m, (f.values.col(j) / (eq_.nu_x.array() * eq_.m[j])).minCoeff());
        return m;
    }

    /// Evolve f0 both with collisions and as pure transport; the collisional
    /// solution must dominate exp(-t ||sigma||) times the transported one,
    /// cell by cell, up to eps.
    Margin duhamel_lower_bound_check(const PhaseDensity& f0, double t, double eps = 1e-10) const {
        check_state(f0);
        const long n = std::lround(t / dt_);
        PhaseDensity full = f0, free = f0;
        for (long k = 0; k < n; ++k) step(full);
        for (long k = 0; k < n; ++k) {
            transport_half(free);
            transport_half(free);
            free.time += dt_;
        }
        const double factor = std::exp(-double(n) * dt_ * sigma_sup_);
        const double margin = (full.values - factor * free.values).minCoeff();
        return {margin >= -eps, margin};
    }

    /// TV contraction factor over one minorization interval t_star, checked
    /// against 1 - alpha + eps.
    Contraction contraction_check(const PhaseDensity& a, const PhaseDensity& b, double alpha, double t_star,
                                  double eps = 1e-3) const {
        check_state(a);
        check_state(b);
        const double tv0 = tv_grid(a, b);
        if (tv0 == 0.0) throw DomainError("contraction ratio undefined for identical densities");
        const long n = std::lround(t_star / dt_);
        PhaseDensity fa = a, fb = b;
        for (long k = 0; k < n; ++k) {
            step(fa);
            step(fb);
        }
        const double ratio = tv_grid(fa, fb) / tv0;
        return {ratio <= 1.0 - alpha + eps, ratio};
    }

    Contraction contraction_check(const PhaseDensity& a, const PhaseDensity& b, const RateCertificate& cert,
                                  double eps = 1e-3) const {
        return contraction_check(a, b, cert.alpha, cert.t_star, eps);
    }

  private:
    void check_state(const PhaseDensity& f) const {
        if (!(f.xgrid == g_) || f.n_v() != vg_.n()) throw ConfigError("density does not match the solver grid");
    }

    /// Exact relaxation over dt: f <- e^{-sigma dt} f + (1 - e^{-sigma dt}) m_j rho.
    void relax(PhaseDensity& f) const {
        const Vec rho = f.values.matrix() * vg_.quad_weights();
        parallel_chunks(vg_.n(), workers_, [&](long j0, long j1) {
            for (long j = j0; j < j1; ++j)
                f.values.col(j) =
                    decay_ * f.values.col(j) + eq_.m[j] * ((1.0 - decay_) * rho.array());
        });
    }

    void transport_half(PhaseDensity& f) const {
        if (with_force_) {
            transport_force(f);
            return;
        }
        const long n = g_.n_per_dim;
        parallel_chunks(vg_.n(), workers_, [&](long j0, long j1) {
            Eigen::ArrayXd buf;
            for (long j = j0; j < j1; ++j) {
                buf = f.values.col(j);
                auto col = f.values.col(j);
                if (g_.d == 1) {
                    const long s = shifts_[j];
                    const double wfr = fracs_[j];
                    if (wfr == 0.0) {
                        for (long i = 0; i < n; ++i) col[i] = buf[mod(i - s, n)];
                    } else {
                        for (long i = 0; i < n; ++i)
                            col[i] = (1.0 - wfr) * buf[mod(i - s, n)] + wfr * buf[mod(i - s - 1, n)];
                    }
                } else {
                    const long s0 = shifts_[j * 2], s1 = shifts_[j * 2 + 1];
                    for (long i1 = 0; i1 < n; ++i1) {
                        const long src1 = mod(i1 - s1, n) * n;
                        const long dst1 = i1 * n;
                        for (long i0 = 0; i0 < n; ++i0) col[dst1 + i0] = buf[src1 + mod(i0 - s0, n)];
                    }
                }
            }
        });
    }

    /// Semi-Lagrangian step through phase space: bilinear gather along the
    /// precomputed reverse-Verlet stencil. Mass leaving the velocity
    /// interval is dropped (drift is reported by run, never hidden).
    void transport_force(PhaseDensity& f) const {
        const Eigen::ArrayXXd buf = f.values;
        const double* src = buf.data();
        parallel_chunks(vg_.n(), workers_, [&](long j0, long j1) {
            for (long j = j0; j < j1; ++j) {
                auto col = f.values.col(j);
                const long base = j * g_.cells();
                for (long i = 0; i < g_.cells(); ++i) {
                    const long c = base + i;
                    double acc = 0.0;
                    for (int k = 0; k < 4; ++k) {
                        const double w = st_w_[4 * c + k];
                        if (w != 0.0) acc += w * src[st_idx_[4 * c + k]];
                    }
                    col[i] = acc;
                }
            }
        });
    }

    void build_force_stencil(const Potential& w, double h) {
        const long cells = g_.cells();
        const long n_v = vg_.n();
        const double dx = g_.dx();
        const double v_max = vg_.ball_v_max();
        const double dv = 2.0 * v_max / n_v;
        if (vg_.node_speed_max() * h / dx > 1.0 + 1e-12)
            throw ConfigError("CFL violation: |v|*dt/(2dx) > 1 for interpolating transport");
        if (w.grad_sup_bound() * h / dv > 1.0 + 1e-12)
            throw ConfigError("CFL violation: |grad W|*dt/(2dv) > 1 for the force step");
        st_idx_.assign(size_t(4 * cells * n_v), 0);
        st_w_.assign(size_t(4 * cells * n_v), 0.0);
        for (long j = 0; j < n_v; ++j)
            for (long i = 0; i < cells; ++i) {
                Vec x = g_.center(i);
                Vec v = vg_.nodes().row(j).transpose();
                detail::verlet_step(w, x, v, -h);
                const double fi = wrap1(x[0]) / dx - 0.5;
                const long i0 = long(std::floor(fi));
                const double wx = fi - double(i0);
                const double fj = (v[0] + v_max) / dv - 0.5;
                const long jlo = long(std::floor(fj));
                const double wv = fj - double(jlo);
                const long c = j * cells + i;
                int slot = 0;
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        const long jj = jlo + b;
                        if (jj < 0 || jj >= n_v) continue;  // outside the velocity interval
                        const long ii = mod(i0 + a, cells);
                        const double wt = (a ? wx : 1.0 - wx) * (b ? wv : 1.0 - wv);
                        st_idx_[4 * c + slot] = jj * cells + ii;
                        st_w_[4 * c + slot] = wt;
                        ++slot;
                    }
            }
    }

    static long mod(long a, long n) {
        const long r = a % n;
        return r < 0 ? r + n : r;
    }

    SpaceGrid g_;
    VelocityGrid vg_;
    double dt_;
    int workers_;
    bool with_force_;
    double sigma_sup_ = 0.0;
    Vec sigma_cells_;
    Eigen::ArrayXd decay_;
    Equilibrium eq_;
    std::vector<long> shifts_;
    std::vector<double> fracs_;
    std::vector<int64_t> st_idx_;
    std::vector<double> st_w_;
};

}  // namespace kinlab
