#include <cmath>

#include "doctest.h"
#include "kinlab/tv.hpp"

using namespace kinlab;

namespace {

VelocityGrid two_speeds() {
    Mat atoms(2, 1);
    atoms << -1.0, 1.0;
    Vec w(2);
    w << 0.5, 0.5;
    return VelocityGrid::discrete(atoms, w);
}

}  // namespace

TEST_CASE("disjoint probability densities sit at distance two") {
    SpaceGrid g(1, 32);
    VelocityGrid vg = two_speeds();
    PhaseDensity a = cell_delta(g, vg, 3, 0);
    PhaseDensity b = cell_delta(g, vg, 20, 1);
    CHECK(tv_grid(a, b) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(tv_grid(a, a) == 0.0);

    // Scaling mass scales the distance linearly.
    PhaseDensity half = a;
    half.values *= 0.5;
    CHECK(tv_grid(half, a) == doctest::Approx(0.5).epsilon(1e-14));

    SpaceGrid g2(1, 64);
    PhaseDensity c(g2, vg.quad_weights());
    CHECK_THROWS_AS(tv_grid(a, c), DomainError);
}

TEST_CASE("decay fit recovers a synthetic exponential rate") {
    std::vector<double> t, y;
    for (int k = 0; k <= 40; ++k) {
        t.push_back(0.25 * k);
        y.push_back(1.7 * std::exp(-0.7 * 0.25 * k));
    }
    const DecayCurve c = fit_decay(t, y, 0.0, 10.0);
    CHECK(c.fitted_lambda == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(c.residual <= 1e-12);

    // Restricting the window uses only the covered points.
    const DecayCurve cw = fit_decay(t, y, 2.0, 5.0);
    CHECK(cw.fitted_lambda == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(cw.window_lo == 2.0);
    CHECK(cw.window_hi == 5.0);
}

TEST_CASE("decay fit rejects unusable windows") {
    std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    std::vector<double> y{1.0, 0.5, 0.25, 0.125};
    CHECK_THROWS_AS(fit_decay(t, y, 2.5, 10.0), DomainError);           // two points only
    CHECK_THROWS_AS(fit_decay(t, {1.0, 0.5}, 0.0, 3.0), DomainError);   // length mismatch
    CHECK_THROWS_AS(fit_decay(t, {1.0, 0.5, 0.0, 0.1}, 0.0, 3.0), DomainError);  // nonpositive tv
    CHECK_THROWS_AS(fit_decay({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 0.0, 2.0), DomainError);  // one distinct time
}

TEST_CASE("envelope check flags the first violated sample") {
    const double lambda = 0.5, t_star = 1.0, tv0 = 2.0;
    std::vector<double> t{0.5, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> good(t.size()), bad(t.size());
    for (size_t i = 0; i < t.size(); ++i) {
        const double env = std::exp(-lambda * (t[i] - t_star)) * tv0;
        good[i] = 0.9 * env;
        bad[i] = env * (t[i] == 3.0 ? 1.5 : 0.9);
    }
    // The pre-t_star sample is above the envelope but outside its claim.
    good[0] = 10.0;
    bad[0] = 10.0;

    const EnvelopeCheck ok = envelope_check(t, good, lambda, t_star, tv0);
    CHECK(ok.pass);
    CHECK(ok.worst_margin > 0.0);

    const EnvelopeCheck viol = envelope_check(t, bad, lambda, t_star, tv0);
    CHECK(!viol.pass);
    CHECK(viol.worst_time == 3.0);
    CHECK_THROWS_AS(envelope_check({0.1, 0.2}, {1.0, 1.0}, lambda, t_star, tv0), DomainError);
}

TEST_CASE("empirical histogram distance vanishes on an exact replication") {
    SpaceGrid g(1, 32);
    VelocityGrid vg = two_speeds();
    // 64 particles laid out to replicate a two-cell density exactly.
    PhaseDensity ref(g, vg.quad_weights());
    ref.values(4, 0) = 0.5 / (g.cell_volume() * vg.quad_weights()[0]);
    ref.values(20, 1) = 0.5 / (g.cell_volume() * vg.quad_weights()[1]);
    ParticleEnsemble e;
    e.x = Mat(64, 1);
    e.v = Mat(64, 1);
    e.jumps.assign(64, 0);
    for (long i = 0; i < 64; ++i) {
        const bool first = i < 32;
        e.x(i, 0) = first ? (4 + 0.5) / 32.0 : (20 + 0.5) / 32.0;
        e.v(i, 0) = first ? -1.0 : 1.0;
    }
    CHECK(tv_empirical(e, ref, vg, 16, 2) == 0.0);
    // Move half the particles one coarse x-bin over: mass 0.5 misplaced.
    for (long i = 0; i < 32; ++i) e.x(i, 0) = (6 + 0.5) / 32.0;
    CHECK(tv_empirical(e, ref, vg, 16, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empirical histogram rejects bins that do not tile the grid") {
    SpaceGrid g(1, 32);
    VelocityGrid vg = two_speeds();
    PhaseDensity ref = cell_delta(g, vg, 0, 0);
    ParticleEnsemble e;
    e.x = Mat::Zero(4, 1);
    e.v = Mat::Ones(4, 1);
    e.jumps.assign(4, 0);
    CHECK_THROWS_AS(tv_empirical(e, ref, vg, 5, 2), ConfigError);
    CHECK_THROWS_AS(tv_empirical(e, ref, vg, 16, 3), ConfigError);
}
