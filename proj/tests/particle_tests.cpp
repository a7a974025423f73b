#include <cmath>

#include "doctest.h"
#include "kinlab/particles.hpp"

using namespace kinlab;

namespace {

SimConfig free_sim(int workers = 1) {
    SimConfig cfg;
    cfg.flow = default_flow_config(Potential::zero(1));
    cfg.workers = workers;
    return cfg;
}

Potential tilted_potential() {
    CosineTerm t;
    t.amplitude = 0.3;
    t.wave = Eigen::VectorXi::Ones(1);
    return Potential::cosine_sum(1, {t});
}

// Gibbs bin probability by composite Simpson, independent of the sampler's
// piecewise-linear inverse CDF.
double gibbs_bin_prob(const Potential& w, double a, double b, int n) {
    double acc = 0.0;
    const double h = (b - a) / n;
    Vec x(1);
    for (int i = 0; i < n; ++i) {
        x[0] = a + i * h;
        const double fa = std::exp(-w.value(x));
        x[0] = a + (i + 0.5) * h;
        const double fm = std::exp(-w.value(x));
        x[0] = a + (i + 1) * h;
        const double fb = std::exp(-w.value(x));
        acc += (fa + 4.0 * fm + fb) * h / 6.0;
    }
    return acc;
}

}  // namespace

TEST_CASE("equilibrium positions follow the Gibbs law") {
    Potential w = tilted_potential();
    const long N = 40000;
    ParticleEnsemble e = sample_equilibrium(N, w, VelocitySpace::ball(1, 1.0), 2024u);

    const int bins = 16;
    Vec p(bins);
    for (int k = 0; k < bins; ++k) p[k] = gibbs_bin_prob(w, k / double(bins), (k + 1) / double(bins), 256);
    p /= p.sum();
    Vec counts = Vec::Zero(bins);
    for (long i = 0; i < N; ++i) {
        int k = int(e.x(i, 0) * bins);
        if (k == bins) k = bins - 1;
        counts[k] += 1.0;
    }
    double chi2 = 0.0;
    for (int k = 0; k < bins; ++k) chi2 += std::pow(counts[k] - N * p[k], 2) / (N * p[k]);
    // 0.999 quantile of chi-square with 15 degrees of freedom.
    CHECK(chi2 < 37.69729821835383);
}

TEST_CASE("equilibrium velocities are uniform on the ball") {
    const long N = 40000;
    ParticleEnsemble e = sample_equilibrium(N, Potential::zero(1), VelocitySpace::ball(1, 1.0), 7u);
    CHECK(e.v.cwiseAbs().maxCoeff() <= 1.0);
    const double mean = e.v.col(0).mean();
    const double m2 = e.v.col(0).array().square().mean();
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(3.0 * N));
    CHECK(std::abs(m2 - 1.0 / 3.0) <= 4.0 * std::sqrt(4.0 / 45.0 / N));
}

TEST_CASE("discrete velocity sampling uses the atom weights") {
    Mat atoms(2, 1);
    atoms << -1.0, 1.0;
    Vec wts(2);
    wts << 0.5, 0.5;
    const long N = 40000;
    ParticleEnsemble e = sample_equilibrium(N, Potential::zero(1), VelocitySpace::discrete(atoms, wts), 11u);
    for (long i = 0; i < N; ++i) CHECK(std::abs(e.v(i, 0)) == 1.0);
    CHECK(std::abs(e.v.col(0).mean()) <= 4.0 / std::sqrt(double(N)));
}

TEST_CASE("unit rate produces unit mean jumps over unit time") {
    const long N = 40000;
    ParticleEnsemble e0 = sample_equilibrium(N, Potential::zero(1), VelocitySpace::ball(1, 1.0), 123u);
    auto snaps = simulate(e0, SigmaField::constant(1, 1.0), Potential::zero(1), VelocitySpace::ball(1, 1.0), 1.0,
                          {1.0}, free_sim());
    REQUIRE(snaps.size() == 1);
    double total = 0.0;
    long zero = 0;
    for (long i = 0; i < N; ++i) {
        total += double(snaps[0].jumps[i]);
        if (snaps[0].jumps[i] == 0) ++zero;
    }
    CHECK(std::abs(total / N - 1.0) <= 4.0 / std::sqrt(double(N)));
    const double p0 = std::exp(-1.0);
    CHECK(std::abs(zero / double(N) - p0) <= 4.0 * std::sqrt(p0 * (1.0 - p0) / N));
}

TEST_CASE("zero rate means pure transport") {
    const long N = 100;
    ParticleEnsemble e0 = sample_equilibrium(N, Potential::zero(1), VelocitySpace::ball(1, 1.0), 5u);
    auto snaps = simulate(e0, SigmaField::constant(1, 0.0), Potential::zero(1), VelocitySpace::ball(1, 1.0), 2.0,
                          {2.0}, free_sim());
    for (long i = 0; i < N; ++i) {
        CHECK(snaps[0].jumps[i] == 0);
        const double want = wrap1(e0.x(i, 0) + 2.0 * e0.v(i, 0));
        CHECK(torus_dist(Vec::Constant(1, snaps[0].x(i, 0)), Vec::Constant(1, want)) <= 1e-14);
        CHECK(snaps[0].v(i, 0) == e0.v(i, 0));
    }
}

TEST_CASE("sampling and simulation are identical across worker counts") {
    Potential w = tilted_potential();
    ParticleEnsemble a = sample_equilibrium(5000, w, VelocitySpace::ball(1, 1.0), 77u, 1);
    ParticleEnsemble b = sample_equilibrium(5000, w, VelocitySpace::ball(1, 1.0), 77u, 4);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.v - b.v).cwiseAbs().maxCoeff() == 0.0);

    Mat c(1, 1);
    c << 0.5;
    Vec r(1), h(1);
    r << 0.25;
    h << 1.0;
    SigmaField s = SigmaField::bumps(1, c, r, h);
    auto s1 = simulate(a, s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 2.0, {1.0, 2.0}, free_sim(1));
    auto s4 = simulate(a, s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 2.0, {1.0, 2.0}, free_sim(4));
    for (size_t k = 0; k < 2; ++k) {
        CHECK((s1[k].x - s4[k].x).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s1[k].v - s4[k].v).cwiseAbs().maxCoeff() == 0.0);
        CHECK(s1[k].jumps == s4[k].jumps);
    }
}

TEST_CASE("intermediate snapshots do not change the jump history") {
    ParticleEnsemble e0 = sample_equilibrium(2000, Potential::zero(1), VelocitySpace::ball(1, 1.0), 313u);
    SigmaField s = SigmaField::constant(1, 1.5);
    auto both = simulate(e0, s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 2.0, {1.0, 2.0}, free_sim());
    auto last = simulate(e0, s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 2.0, {2.0}, free_sim());
    CHECK(both[1].jumps == last[0].jumps);
    CHECK((both[1].v - last[0].v).cwiseAbs().maxCoeff() == 0.0);
    // Flight segments are associative only up to roundoff, so positions agree
    // to torus distance rather than bitwise.
    for (long i = 0; i < e0.n(); ++i)
        CHECK(torus_dist(Vec::Constant(1, both[1].x(i, 0)), Vec::Constant(1, last[0].x(i, 0))) <= 1e-12);
}

TEST_CASE("simulation rejects malformed snapshot schedules") {
    ParticleEnsemble e0 = sample_equilibrium(10, Potential::zero(1), VelocitySpace::ball(1, 1.0), 1u);
    SigmaField s = SigmaField::constant(1, 1.0);
    CHECK_THROWS_AS(
        simulate(e0, s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 1.0, {2.0}, free_sim()), ConfigError);
    CHECK_THROWS_AS(
        simulate(e0, s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 2.0, {1.5, 0.5}, free_sim()),
        ConfigError);
    CHECK_THROWS_AS(
        simulate(e0, SigmaField::constant(2, 1.0), Potential::zero(1), VelocitySpace::ball(1, 1.0), 1.0, {1.0},
                 free_sim()),
        ConfigError);
}
