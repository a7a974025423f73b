#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kinlab/control.hpp"
#include "kinlab/errors.hpp"
#include "kinlab/problem.hpp"

namespace kinlab {

enum class AlphaVariant { LemmaForm, TheoremForm };

/// Output of a spreading lemma: after time T_star the kernel iterates cover
/// velocity space with density at least beta relative to equilibrium.
struct Spreading {
    double T_star = 0.0;        // value the downstream bound actually uses
    double beta = 0.0;          // shipped beta
    double T_star_stated = 0.0; // flat-kernel case: the looser published value
    double beta_alt = 0.0;      // radial case: beta with the alternative exponent
};

/// Flat kernel bound gamma on B(v0, r0): beta = gamma * (r0/2)^d. The waiting
/// time is 2/r0 (the derivation needs 1/t <= r0/2); the stated r0/2 is kept
/// alongside for reference.
inline Spreading spreading_flat(double gamma, double r0, int d) {
    if (gamma <= 0.0 || r0 <= 0.0 || d < 1) throw DomainError("flat spreading needs gamma, r0 > 0 and d >= 1");
    Spreading s;
    s.beta = gamma * std::pow(0.5 * r0, d);
    s.T_star = 2.0 / r0;
    s.T_star_stated = 0.5 * r0;
    s.beta_alt = s.beta;
    return s;
}

/// Radial kernel bound with profile M: T_star = 1/2 and
/// beta = Z * exp(-(T+1)(1+H)) * M(4(1+G) + 5GT), (G, H, Z) certified from
/// the potential. beta_alt carries the variant with exponent (T+1/2), which
/// exceeds beta by exactly exp((1+H)/2); the smaller value is the shipped one.
inline Spreading spreading_radial(const Potential& w, double T, const MaxwellianProfile& m) {
    if (T <= 0.0) throw DomainError("radial spreading needs T > 0");
    const PotentialBounds b = potential_bounds(w);
    const double reach = 4.0 * (1.0 + b.grad_sup) + 5.0 * b.grad_sup * T;
    Spreading s;
    s.T_star = 0.5;
    s.T_star_stated = 0.5;
    s.beta = b.gibbs_mass * std::exp(-(T + 1.0) * (1.0 + b.hess_sup)) * m(reach);
    s.beta_alt = s.beta * std::exp(0.5 * (1.0 + b.hess_sup));
    return s;
}

/// Doeblin constant: alpha = beta * kappa^2 * exp(-t_star * sigma_sup), with
/// an extra gamma^2 in the TheoremForm variant. Inputs consistent with a
/// certificate always land in [0, 1); anything else is rejected.
inline double doeblin_alpha(double beta, double kappa, double t_star, double sigma_sup, AlphaVariant variant,
                            double gamma = 1.0) {
    if (beta <= 0.0 || beta >= 1.0) throw DomainError("spreading constant must lie in (0,1)");
    if (kappa < 0.0) throw DomainError("control constant must be >= 0");
    if (t_star <= 0.0) throw DomainError("minorization time must be > 0");
    if (sigma_sup < 0.0) throw DomainError("sigma sup bound must be >= 0");
    double a = beta * kappa * kappa * std::exp(-t_star * sigma_sup);
    if (variant == AlphaVariant::TheoremForm) {
        if (gamma <= 0.0) throw DomainError("theorem-form alpha needs gamma > 0");
        a *= gamma * gamma;
    }
    if (a >= 1.0) throw DomainError("minorization constant reached 1; inputs are inconsistent");
    return a;
}

/// lambda = -log(1 - alpha) / t_star.
inline double rate_lambda(double alpha, double t_star) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("rate needs alpha in (0,1)");
    if (t_star <= 0.0) throw DomainError("rate needs t_star > 0");
    return -std::log1p(-alpha) / t_star;
}

/// Envelope value exp(-lambda (t - t_star)) * tv0; only claimed for t >= t_star.
inline double decay_envelope(double lambda, double t_star, double tv0, double t) {
    return std::exp(-lambda * (t - t_star)) * tv0;
}

/// Every constant of the quantitative convergence statement, reproducible
/// from its own fields.
struct RateCertificate {
    RegimeSpec::Regime regime = RegimeSpec::Regime::R1;
    AlphaVariant variant = AlphaVariant::TheoremForm;
    double T = 0.0;
    double kappa = 0.0;
    double T_star = 0.0;
    double T_star_stated = 0.0;
    double beta = 0.0;
    double beta_alt = 0.0;
    double t_star = 0.0;      // 2T + T_star
    double gamma = 1.0;       // R1 kernel floor (1 otherwise)
    double alpha = 0.0;       // the variant actually selected
    double alpha_lemma = 0.0;
    double alpha_theorem = 0.0;  // R1 only; 0 when not applicable
    double lambda = 0.0;
    double sigma_sup = 0.0;
    double C_minus = 0.0;
    double C_plus = 0.0;
    bool upper_bound_consistent = true;  // lambda <= C_plus (flag, never fatal)
};

inline AlphaVariant default_variant(RegimeSpec::Regime regime) {
    return regime == RegimeSpec::Regime::R1 ? AlphaVariant::TheoremForm : AlphaVariant::LemmaForm;
}

/// Assemble the full certificate from a satisfied control report: spreading
/// constants, Doeblin alpha, rate lambda, and the spectral-strip extrema.
inline RateCertificate build_certificate(const ScatterProblem& prob, const GccReport& gcc, AlphaVariant variant,
                                         const GccGrid& grid = {}, const std::vector<double>& T_list = {}) {
    if (!gcc.satisfied) {
        std::string msg = "control condition not satisfied: kappa_hat = " + std::to_string(gcc.kappa_hat) +
                          " at x = (";
        for (Eigen::Index i = 0; i < gcc.argmin.x.dim(); ++i)
            msg += (i ? ", " : "") + std::to_string(gcc.argmin.x[i]);
        msg += "), v = (";
        for (Eigen::Index i = 0; i < gcc.argmin.v.size(); ++i)
            msg += (i ? ", " : "") + std::to_string(gcc.argmin.v[i]);
        msg += ")";
        throw ControlNotSatisfied(msg, gcc.kappa_hat);
    }
    if (prob.regime.regime == RegimeSpec::Regime::R2 && variant == AlphaVariant::TheoremForm)
        throw ConfigError("theorem-form alpha needs a flat kernel floor; radial regime uses the lemma form");

    RateCertificate c;
    c.regime = prob.regime.regime;
    c.variant = variant;
    c.T = gcc.T;
    c.kappa = gcc.kappa_hat;
    c.sigma_sup = prob.sigma.sup_norm();

    const Spreading s = prob.regime.regime == RegimeSpec::Regime::R1
                            ? spreading_flat(prob.regime.gamma, prob.regime.r0, prob.d)
                            : spreading_radial(prob.potential, gcc.T, prob.regime.profile);
    c.T_star = s.T_star;
    c.T_star_stated = s.T_star_stated;
    c.beta = s.beta;
    c.beta_alt = s.beta_alt;
    c.t_star = 2.0 * gcc.T + s.T_star;

    c.alpha_lemma = doeblin_alpha(c.beta, c.kappa, c.t_star, c.sigma_sup, AlphaVariant::LemmaForm);
    if (prob.regime.regime == RegimeSpec::Regime::R1) {
        c.gamma = prob.regime.gamma;
        c.alpha_theorem = doeblin_alpha(c.beta, c.kappa, c.t_star, c.sigma_sup, AlphaVariant::TheoremForm, c.gamma);
    }
    c.alpha = variant == AlphaVariant::TheoremForm ? c.alpha_theorem : c.alpha_lemma;
    c.lambda = rate_lambda(c.alpha, c.t_star);

    auto [cm, cp] = spectral_constants(prob.sigma, prob.potential, prob.vspace,
                                       T_list.empty() ? std::vector<double>{gcc.T} : T_list, grid);
    c.C_minus = cm;
    c.C_plus = cp;
    c.upper_bound_consistent = c.lambda <= c.C_plus + 1e-12;
    return c;
}

inline RateCertificate build_certificate(const ScatterProblem& prob, const GccReport& gcc) {
    return build_certificate(prob, gcc, default_variant(prob.regime.regime));
}

}  // namespace kinlab
