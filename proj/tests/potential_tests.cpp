#include "doctest.h"
#include "kinlab/potential.hpp"

using namespace kinlab;

namespace {
// Frozen reference values, computed with 50-digit arithmetic ahead of time.
// gibbs_mass for a cos(2 pi x) equals the modified Bessel value I0(a).
constexpr double kBesselI0_01 = 1.0025015629340956014;
constexpr double kBesselI0_05 = 1.063483370741323519263;
constexpr double kBesselI0_10 = 1.266065877752008335598;
constexpr double kGradSup01 = 0.6283185307179586476925;  // 0.2 pi
constexpr double kHessSup01 = 3.947841760435743447534;   // 0.4 pi^2
}  // namespace

TEST_CASE("zero potential has trivial bounds") {
    Potential w = Potential::zero(2);
    Vec x(2);
    x << 0.3, 0.7;
    CHECK(w.value(x) == 0.0);
    CHECK(w.gradient(x).norm() == 0.0);
    const PotentialBounds b = potential_bounds(w);
    CHECK(b.grad_sup == 0.0);
    CHECK(b.hess_sup == 0.0);
    CHECK(b.gibbs_mass == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single cosine values and derivatives") {
    Potential w = Potential::cosine_sum(1, {CosineTerm{0.1, Eigen::VectorXi::Constant(1, 1), 0.0}});
    Vec x(1);
    x << 0.0;
    CHECK(w.value(x) == doctest::Approx(0.1).epsilon(1e-15));
    x << 0.25;
    CHECK(w.value(x) == doctest::Approx(0.0).epsilon(1e-15));

    // gradient against central differences at several points
    for (double xc : {0.05, 0.37, 0.81}) {
        x << xc;
        const double h = 1e-6;
        Vec xp(1), xm(1);
        xp << xc + h;
        xm << xc - h;
        const double fd = (w.value(xp) - w.value(xm)) / (2.0 * h);
        CHECK(w.gradient(x)[0] == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("certified bounds match closed forms for one harmonic") {
    Potential w = Potential::cosine_sum(1, {CosineTerm{0.1, Eigen::VectorXi::Constant(1, 1), 0.0}});
    const PotentialBounds b = potential_bounds(w);
    CHECK(b.grad_sup == doctest::Approx(kGradSup01).epsilon(1e-12));
    CHECK(b.hess_sup == doctest::Approx(kHessSup01).epsilon(1e-12));
    CHECK(b.gibbs_mass == doctest::Approx(kBesselI0_01).epsilon(1e-12));
}

TEST_CASE("gibbs mass reproduces Bessel values across amplitudes") {
    for (auto [a, i0] : {std::pair{0.5, kBesselI0_05}, std::pair{1.0, kBesselI0_10}}) {
        Potential w = Potential::cosine_sum(1, {CosineTerm{a, Eigen::VectorXi::Constant(1, 1), 0.0}});
        CHECK(potential_bounds(w).gibbs_mass == doctest::Approx(i0).epsilon(1e-12));
    }
}

TEST_CASE("certified sup bounds dominate sampled derivative norms") {
    std::vector<CosineTerm> terms;
    CosineTerm t1{0.07, Eigen::VectorXi::Constant(1, 2), 0.3};
    CosineTerm t2{-0.03, Eigen::VectorXi::Constant(1, 5), 1.1};
    terms.push_back(t1);
    terms.push_back(t2);
    Potential w = Potential::cosine_sum(1, terms);
    const PotentialBounds b = potential_bounds(w);
    for (int i = 0; i < 257; ++i) {
        Vec x(1);
        x << double(i) / 257.0;
        CHECK(w.gradient(x).norm() <= b.grad_sup + 1e-12);
        CHECK(std::abs(w.hessian(x)(0, 0)) <= b.hess_sup + 1e-12);
    }
}

TEST_CASE("two dimensional cosine gradient direction") {
    Eigen::VectorXi k(2);
    k << 1, -2;
    Potential w = Potential::cosine_sum(2, {CosineTerm{0.2, k, 0.0}});
    Vec x(2);
    x << 0.1, 0.2;
    const double h = 1e-6;
    for (int c = 0; c < 2; ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        CHECK(w.gradient(x)[c] == doctest::Approx((w.value(xp) - w.value(xm)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("zero wave vector is rejected") {
    CHECK_THROWS_AS(Potential::cosine_sum(1, {CosineTerm{0.1, Eigen::VectorXi::Zero(1), 0.0}}), ConfigError);
}
