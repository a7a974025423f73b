#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "kinlab/errors.hpp"
#include "kinlab/potential.hpp"
#include "kinlab/sigma.hpp"
#include "kinlab/velocity_space.hpp"

namespace kinlab {

/// Decreasing radial profile M(s) = c * (2*pi)^(-d/2) * exp(-s^2/2), c in (0,1].
struct MaxwellianProfile {
    int dim = 1;
    double c = 1.0;

    double operator()(double s) const {
        return c * std::pow(2.0 * std::numbers::pi, -0.5 * dim) * std::exp(-0.5 * s * s);
    }
};

/// Which lower bound the scattering kernel is assumed to satisfy. R1: a flat
/// bound gamma on a velocity ball B(v0, r0). R2: a decreasing radial profile
/// (built-in Maxwellian) bounding the kernel from below.
struct RegimeSpec {
    enum class Regime { R1, R2 };
    Regime regime = Regime::R1;

    double gamma = 0.0;  // R1 kernel floor
    Vec v0;              // R1 ball center
    double r0 = 0.0;     // R1 ball radius
    MaxwellianProfile profile;  // R2

    static RegimeSpec r1(double gamma, Vec v0, double r0) {
        if (gamma <= 0.0 || r0 <= 0.0) throw DomainError("kernel floor and ball radius must be > 0");
        RegimeSpec r;
        r.regime = Regime::R1;
        r.gamma = gamma;
        r.v0 = std::move(v0);
        r.r0 = r0;
        return r;
    }

    static RegimeSpec r2(MaxwellianProfile m) {
        if (m.c <= 0.0 || m.c > 1.0) throw DomainError("profile mass fraction must lie in (0,1]");
        RegimeSpec r;
        r.regime = Regime::R2;
        r.profile = m;
        return r;
    }
};

/// A full problem instance: everything the certificate, the grid solver and
/// the particle simulation consume.
struct ScatterProblem {
    int d = 1;
    SigmaField sigma;
    Potential potential;
    VelocitySpace vspace;
    RegimeSpec regime;

    ScatterProblem(SigmaField s, Potential w, VelocitySpace v, RegimeSpec r)
        : d(s.dim()), sigma(std::move(s)), potential(std::move(w)), vspace(std::move(v)), regime(std::move(r)) {
        if (sigma.dim() != potential.dim() || sigma.dim() != vspace.dim())
            throw ConfigError("sigma, potential and velocity space dimensions must agree");
        if (regime.regime == RegimeSpec::Regime::R1) {
            if (regime.v0.size() != d) throw ConfigError("kernel ball center has wrong dimension");
            // The flat kernel bound must stay sub-probability on V.
            const double overlap = vspace.ball_overlap(regime.v0, regime.r0);
            if (regime.gamma * overlap > 1.0 + 1e-9)
                throw ConfigError("kernel floor gamma * |B(v0,r0) & V| exceeds 1");
        }
    }
};

}  // namespace kinlab
