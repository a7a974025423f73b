#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/flow.hpp"
#include "kinlab/parallel.hpp"
#include "kinlab/potential.hpp"
#include "kinlab/rng.hpp"
#include "kinlab/sigma.hpp"
#include "kinlab/torus.hpp"
#include "kinlab/velocity_space.hpp"

namespace kinlab {

/// N phase-space samples of the jump process, with per-particle jump counts.
/// Particle i draws from the stream (seed, 2i) while being sampled and
/// (seed, 2i+1) while being simulated, so the two uses never share draws.
struct ParticleEnsemble {
    Mat x;  // N x d, wrapped
    Mat v;  // N x d
    std::vector<long> jumps;
    uint64_t seed = 0;
    double time = 0.0;

    long n() const { return x.rows(); }
    int dim() const { return int(x.cols()); }
};

struct SimConfig {
    FlowConfig flow;
    int workers = 1;
};

/// One draw from the equilibrium velocity law on V: uniform for balls and
/// boxes, the stored weights for discrete sets, standard Maxwellian for the
/// full space.
inline Vec sample_velocity(const VelocitySpace& vs, RngStream& rng) {
    const int d = vs.dim();
    Vec v(d);
    switch (vs.kind()) {
        case VelocitySpace::Kind::Ball:
            if (d == 1) {
                v[0] = vs.ball_radius() * (2.0 * rng.uniform() - 1.0);
                return v;
            }
            for (;;) {  // rejection from the bounding box
                for (int k = 0; k < d; ++k) v[k] = vs.ball_radius() * (2.0 * rng.uniform() - 1.0);
                if (v.norm() <= vs.ball_radius()) return v;
            }
        case VelocitySpace::Kind::Box:
            for (int k = 0; k < d; ++k)
                v[k] = vs.box_lo()[k] + (vs.box_hi()[k] - vs.box_lo()[k]) * rng.uniform();
            return v;
        case VelocitySpace::Kind::Discrete:
            return vs.atoms().row(rng.categorical(vs.weights())).transpose();
        case VelocitySpace::Kind::Full:
            for (int k = 0; k < d; ++k) v[k] = rng.normal();
            return v;
    }
    std::abort();
}

/// N independent samples of nu = (e^{-W}/Z) (x) times the velocity law:
/// inverse CDF on a fine grid in d=1, rejection against the coefficient
/// majorant of e^{-W} in d>=2.
inline ParticleEnsemble sample_equilibrium(long N, const Potential& w, const VelocitySpace& vs, uint64_t seed,
                                           int workers = 1) {
    const int d = w.dim();
    if (vs.dim() != d) throw ConfigError("potential and velocity space dimensions must agree");
    ParticleEnsemble e;
    e.x = Mat(N, d);
    e.v = Mat(N, d);
    e.jumps.assign(N, 0);
    e.seed = seed;

    // d=1: piecewise-linear CDF of the Gibbs density on a fine cell grid.
    const int n_grid = 4096;
    Vec cdf;
    if (d == 1 && !w.is_zero()) {
        cdf = Vec(n_grid + 1);
        cdf[0] = 0.0;
        Vec xc(1);
        for (int i = 0; i < n_grid; ++i) {
            xc[0] = (i + 0.5) / n_grid;
            cdf[i + 1] = cdf[i] + std::exp(-w.value(xc));
        }
        cdf /= cdf[n_grid];
    }
    double density_majorant = 1.0;
    if (d >= 2 && !w.is_zero()) {
        double abs_sum = 0.0;
        for (const auto& t : w.terms()) abs_sum += std::abs(t.amplitude);
        density_majorant = std::exp(abs_sum);  // e^{-W} <= e^{sum |a_i|}
    }

    parallel_chunks(N, workers, [&](long i0, long i1) {
        Vec xp(d);
        for (long i = i0; i < i1; ++i) {
            RngStream rng(seed, uint64_t(2 * i));
            if (d == 1) {
                const double u = rng.uniform();
                if (w.is_zero()) {
                    xp[0] = u;
                } else {
                    // invert the piecewise-linear CDF
                    long lo = 0, hi = n_grid;
                    while (hi - lo > 1) {
                        const long mid = (lo + hi) / 2;
                        (cdf[mid] <= u ? lo : hi) = mid;
                    }
                    xp[0] = (double(lo) + (u - cdf[lo]) / (cdf[lo + 1] - cdf[lo])) / n_grid;
                }
            } else {
                for (;;) {
                    for (int k = 0; k < d; ++k) xp[k] = rng.uniform();
                    if (w.is_zero() || rng.uniform() * density_majorant <= std::exp(-w.value(xp))) break;
                }
            }
            e.x.row(i) = wrap(xp).transpose();
            e.v.row(i) = sample_velocity(vs, rng).transpose();
        }
    });
    return e;
}

/// Evolve the ensemble by flight plus thinned jumps: proposals at the
/// constant rate sup ||sigma||, accepted with probability sigma(x)/sup, and
/// the velocity redrawn from the equilibrium law on acceptance. Exact in law
/// for W = 0; with a potential, jump positions inherit the O(dt^2)
/// integrator bias. Returns the ensemble at each requested time.
inline std::vector<ParticleEnsemble> simulate(const ParticleEnsemble& start, const SigmaField& sigma,
                                              const Potential& w, const VelocitySpace& vs, double t_end,
                                              const std::vector<double>& snapshot_times, const SimConfig& cfg) {
    if (sigma.dim() != start.dim() || vs.dim() != start.dim())
        throw ConfigError("ensemble, rate and velocity space dimensions must agree");
    for (size_t s = 0; s < snapshot_times.size(); ++s) {
        if (snapshot_times[s] < start.time - 1e-12 || snapshot_times[s] > t_end + 1e-12)
            throw ConfigError("snapshot times must lie within [start, t_end]");
        if (s > 0 && snapshot_times[s] < snapshot_times[s - 1])
            throw ConfigError("snapshot times must be nondecreasing");
    }
    const double sup = sigma.sup_norm();
    const long N = start.n();
    std::vector<ParticleEnsemble> out(snapshot_times.size());
    for (size_t s = 0; s < out.size(); ++s) {
        out[s].x = Mat(N, start.dim());
        out[s].v = Mat(N, start.dim());
        out[s].jumps.assign(N, 0);
        out[s].seed = start.seed;
        out[s].time = snapshot_times[s];
    }

    parallel_chunks(N, cfg.workers, [&](long i0, long i1) {
        for (long i = i0; i < i1; ++i) {
            RngStream rng(start.seed, uint64_t(2 * i) + 1);
            PhasePoint p(Vec(start.x.row(i).transpose()), Vec(start.v.row(i).transpose()));
            double t = start.time;
            long jumps = start.jumps.empty() ? 0 : start.jumps[i];
            double pending = sup > 0.0 ? rng.exponential(sup) : std::numeric_limits<double>::infinity();
            for (size_t s = 0; s < snapshot_times.size(); ++s) {
                const double target = snapshot_times[s];
                while (t + pending <= target) {
                    p = flow(w, p, pending, cfg.flow);
                    t += pending;
                    const double rate = sigma(p.x);
                    if (rate > sup * (1.0 + 1e-12))
                        throw NumericalError("jump rate exceeded its certified sup bound");
                    if (rng.uniform() * sup < rate) {
                        p.v = sample_velocity(vs, rng);
                        ++jumps;
                    }
                    pending = rng.exponential(sup);
                }
                const double fly = target - t;
                if (fly > 0.0) {
                    p = flow(w, p, fly, cfg.flow);
                    pending -= fly;
                    t = target;
                }
                out[s].x.row(i) = p.x.coords().transpose();
                out[s].v.row(i) = p.v.transpose();
                out[s].jumps[i] = jumps;
            }
        }
    });
    return out;
}

}  // namespace kinlab
