#include "doctest.h"
#include "kinlab/control.hpp"

using namespace kinlab;

namespace {

SigmaField bump_half() {
    Mat c(1, 1);
    c << 0.5;
    Vec r(1), h(1);
    r << 0.2;
    h << 1.0;
    return SigmaField::bumps(1, c, r, h);
}

// Composite Simpson over one period, independent of the library quadrature.
double simpson_circle(const SigmaField& s, int n) {
    double acc = 0.0;
    const double h = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        Vec a(1), m(1), b(1);
        a << i * h;
        m << (i + 0.5) * h;
        b << (i + 1) * h;
        acc += (s.value(a) + 4.0 * s.value(m) + s.value(b)) * h / 6.0;
    }
    return acc;
}

}  // namespace

TEST_CASE("constant rate: kappa is sigma0 T and both spectral constants are sigma0") {
    SigmaField s = SigmaField::constant(1, 2.0);
    Potential w = Potential::zero(1);
    VelocitySpace v = VelocitySpace::ball(1, 1.0);
    GccGrid grid;
    const GccReport rep = gcc_kappa(s, w, v, 1.0, grid);
    CHECK(rep.satisfied);
    CHECK(std::abs(rep.kappa_hat - 2.0) <= 1e-10);
    const auto [cm, cp] = spectral_constants(s, w, v, {1.0, 2.0}, grid);
    CHECK(std::abs(cm - 2.0) <= 1e-6);
    CHECK(std::abs(cp - 2.0) <= 1e-6);
}

TEST_CASE("degenerate rate with a resting observer fails the control condition") {
    Vec lo(1), hi(1);
    lo << 0.0;
    hi << 0.5;
    SigmaField s = SigmaField::mollified_box(1, lo, hi, 0.05);
    const GccReport rep = gcc_kappa(s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 1.0);
    CHECK(!rep.satisfied);
    CHECK(rep.kappa_hat < 1e-8);
}

TEST_CASE("full revolution integrates the bump mass from every start") {
    SigmaField s = bump_half();
    Mat atom(1, 1);
    atom << 1.0;  // speed 1: one revolution over T = 1
    VelocitySpace v = VelocitySpace::discrete(atom, Vec::Ones(1));
    const GccReport rep = gcc_kappa(s, Potential::zero(1), v, 1.0);
    const double mass = simpson_circle(s, 4096);
    CHECK(rep.satisfied);
    CHECK(rep.kappa_hat == doctest::Approx(mass).epsilon(1e-6));
}

TEST_CASE("window shorter than the gap gives zero control") {
    SigmaField s = bump_half();  // support length 0.4, complement 0.6
    Mat atom(1, 1);
    atom << 0.5;  // covers half the circle in T = 1
    VelocitySpace v = VelocitySpace::discrete(atom, Vec::Ones(1));
    const GccReport rep = gcc_kappa(s, Potential::zero(1), v, 1.0);
    CHECK(!rep.satisfied);
    CHECK(rep.kappa_hat < 1e-8);
}

TEST_CASE("equidistribution proxy reports T times the spatial mean") {
    SigmaField s = bump_half();
    GccGrid grid;
    grid.v_max = 3.0;
    const GccReport rep = gcc_kappa(s, Potential::zero(1), VelocitySpace::full(1), 2.0, grid);
    CHECK(rep.v_truncation == 3.0);
    CHECK(rep.equidistribution == doctest::Approx(2.0 * simpson_circle(s, 4096)).epsilon(1e-6));
}

TEST_CASE("refinement stays inside the velocity space and below the grid floor") {
    SigmaField s = bump_half();
    const GccReport rep = gcc_kappa(s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 1.0);
    CHECK(std::abs(rep.argmin.v[0]) <= 1.0 + 1e-12);
    CHECK(rep.kappa_hat >= 0.0);
}

TEST_CASE("evaluation is identical across worker counts") {
    SigmaField s = bump_half();
    GccGrid g1, g4;
    g4.workers = 4;
    const GccReport a = gcc_kappa(s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 1.0, g1);
    const GccReport b = gcc_kappa(s, Potential::zero(1), VelocitySpace::ball(1, 1.0), 1.0, g4);
    CHECK(a.kappa_hat == b.kappa_hat);
    CHECK(a.argmin.x[0] == b.argmin.x[0]);
    CHECK(a.argmin.v[0] == b.argmin.v[0]);
}

TEST_CASE("spectral horizons must increase strictly") {
    SigmaField s = SigmaField::constant(1, 1.0);
    CHECK_THROWS_AS(
        spectral_constants(s, Potential::zero(1), VelocitySpace::ball(1, 1.0), {1.0, 1.0}),
        ConfigError);
    CHECK_THROWS_AS(spectral_constants(s, Potential::zero(1), VelocitySpace::ball(1, 1.0), {}), ConfigError);
}
