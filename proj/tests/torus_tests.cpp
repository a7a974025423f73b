#include "doctest.h"
#include "kinlab/torus.hpp"

using namespace kinlab;

TEST_CASE("wrap1 lands in [0,1) and respects periodicity") {
    CHECK(wrap1(0.0) == 0.0);
    CHECK(wrap1(1.0) == 0.0);
    CHECK(wrap1(-0.25) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(wrap1(3.75) == doctest::Approx(0.75).epsilon(1e-15));
    // The subtraction y - floor(y) can round up to exactly 1 for tiny negative
    // inputs; the wrap must still return a representative below 1.
    CHECK(wrap1(-1e-18) < 1.0);
    CHECK(wrap1(-1e-18) >= 0.0);
    for (double y : {-7.3, -0.5, 0.1, 0.9999999, 123.456}) {
        const double w = wrap1(y);
        CHECK(w >= 0.0);
        CHECK(w < 1.0);
        CHECK(std::abs(std::remainder(w - y, 1.0)) < 1e-12);
    }
}

TEST_CASE("circle_delta is the signed displacement in [-1/2, 1/2)") {
    CHECK(circle_delta(0.1, 0.9) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(circle_delta(0.9, 0.1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(circle_delta(0.25, 0.75) == -0.5);
    for (double a : {0.0, 0.3, 0.77}) {
        for (double b : {0.1, 0.49, 0.951}) {
            const double d = circle_delta(a, b);
            CHECK(d >= -0.5);
            CHECK(d < 0.5);
            CHECK(wrap1(a + d) == doctest::Approx(wrap1(b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("torus distance is a metric on samples") {
    Vec a(2), b(2), c(2);
    a << 0.1, 0.9;
    b << 0.9, 0.1;
    c << 0.5, 0.5;
    CHECK(torus_dist(a, a) == 0.0);
    CHECK(torus_dist(a, b) == doctest::Approx(torus_dist(b, a)).epsilon(1e-15));
    CHECK(torus_dist(a, b) <= torus_dist(a, c) + torus_dist(c, b) + 1e-15);
    // max separation per coordinate is 1/2
    CHECK(torus_dist(a, b) <= std::sqrt(2.0) / 2.0 + 1e-15);
}

TEST_CASE("TorusPoint wraps on construction and under translation") {
    Vec y(2);
    y << 1.25, -0.5;
    TorusPoint p(y);
    CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
    Vec dy(2);
    dy << 0.9, 0.9;
    TorusPoint q = p.translated(dy);
    CHECK(q[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.4).epsilon(1e-12));
}
