#include "doctest.h"
#include "kinlab/velocity_grid.hpp"
#include "kinlab/velocity_space.hpp"

using namespace kinlab;

namespace {
Mat gt_atoms() {
    Mat a(2, 1);
    a << -1.0, 1.0;
    return a;
}
}  // namespace

TEST_CASE("membership per kind") {
    VelocitySpace ball = VelocitySpace::ball(2, 1.0);
    Vec v(2);
    v << 0.6, 0.6;
    CHECK(ball.contains(v));
    v << 0.8, 0.8;
    CHECK(!ball.contains(v));

    Vec lo(1), hi(1);
    lo << -1.0;
    hi << 2.0;
    VelocitySpace box = VelocitySpace::box(lo, hi);
    Vec u(1);
    u << 1.5;
    CHECK(box.contains(u));
    u << 2.1;
    CHECK(!box.contains(u));

    VelocitySpace gt = VelocitySpace::discrete(gt_atoms(), Vec::Constant(2, 0.5));
    u << 1.0;
    CHECK(gt.contains(u));
    u << 0.5;
    CHECK(!gt.contains(u));

    CHECK(VelocitySpace::full(3).contains(Vec::Constant(3, 100.0)));
}

TEST_CASE("volumes in one and two dimensions") {
    CHECK(VelocitySpace::ball(1, 1.0).volume() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(VelocitySpace::ball(2, 2.0).volume() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
    Vec lo(2), hi(2);
    lo << 0.0, -1.0;
    hi << 0.5, 1.0;
    CHECK(VelocitySpace::box(lo, hi).volume() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ball overlap closed form in d = 1") {
    VelocitySpace v = VelocitySpace::ball(1, 1.0);
    Vec c(1);
    c << 0.0;
    CHECK(v.ball_overlap(c, 2.0) == doctest::Approx(2.0).epsilon(1e-14));  // covers V
    CHECK(v.ball_overlap(c, 0.25) == doctest::Approx(0.5).epsilon(1e-14));
    c << 0.9;
    CHECK(v.ball_overlap(c, 0.2) == doctest::Approx(0.3).epsilon(1e-14));  // clipped at 1
}

TEST_CASE("ball overlap quadrature in d = 2 approximates known areas") {
    VelocitySpace v = VelocitySpace::ball(2, 2.0);
    Vec c(2);
    c << 0.0, 0.0;
    // B(0,1) inside B(0,2): area pi
    CHECK(v.ball_overlap(c, 1.0) == doctest::Approx(std::numbers::pi).epsilon(2e-3));
}

TEST_CASE("discrete overlap counts weight mass") {
    VelocitySpace gt = VelocitySpace::discrete(gt_atoms(), Vec::Constant(2, 0.5));
    Vec c(1);
    c << 1.0;
    CHECK(gt.ball_overlap(c, 0.5) == 0.5);
    CHECK(gt.ball_overlap(c, 2.0) == 1.0);
}

TEST_CASE("search nodes: inclusive grid, ball filter, atoms passthrough") {
    VelocitySpace ball = VelocitySpace::ball(1, 1.0);
    const Mat n1 = ball.search_nodes(5, 0.0);
    REQUIRE(n1.rows() == 5);
    CHECK(n1(0, 0) == doctest::Approx(-1.0));
    CHECK(n1(4, 0) == doctest::Approx(1.0));
    CHECK(n1(2, 0) == doctest::Approx(0.0));

    VelocitySpace disc = VelocitySpace::discrete(gt_atoms(), Vec::Constant(2, 0.5));
    CHECK(disc.search_nodes(99, 0.0).rows() == 2);

    VelocitySpace b2 = VelocitySpace::ball(2, 1.0);
    const Mat n2 = b2.search_nodes(5, 0.0);
    for (long i = 0; i < n2.rows(); ++i) CHECK(n2.row(i).norm() <= 1.0 + 1e-12);
    CHECK(n2.rows() < 25);  // corners filtered out
    CHECK(n2.rows() >= 13);

    VelocitySpace full = VelocitySpace::full(1);
    CHECK_THROWS_AS(full.search_nodes(5, 0.0), ConfigError);
    CHECK(full.search_nodes(5, 3.0).rows() == 5);
}

TEST_CASE("velocity grid quadrature is a probability with unit density mass") {
    VelocityGrid g = VelocityGrid::uniform_ball_1d(1.0, 16);
    CHECK(g.n() == 16);
    CHECK(g.quad_weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((g.quad_weights().array() * g.equilibrium_density().array()).sum() ==
          doctest::Approx(1.0).epsilon(1e-13));
    // symmetric centers
    CHECK(g.nodes()(0, 0) == doctest::Approx(-g.nodes()(15, 0)).epsilon(1e-14));

    VelocityGrid m = VelocityGrid::uniform_ball_1d(4.0, 32, VelocityGrid::Profile::Maxwellian);
    CHECK((m.quad_weights().array() * m.equilibrium_density().array()).sum() ==
          doctest::Approx(1.0).epsilon(1e-13));
    // Maxwellian density decreases toward the truncation edge
    CHECK(m.equilibrium_density()[16] > m.equilibrium_density()[31]);
}

TEST_CASE("discrete grid renormalizes tiny weight drift and rejects bad input") {
    Vec w(2);
    w << 0.5 + 4e-13, 0.5 - 4e-13;
    VelocityGrid g = VelocityGrid::discrete(gt_atoms(), w);
    CHECK(g.quad_weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
    w << 0.7, 0.6;
    CHECK_THROWS_AS(VelocityGrid::discrete(gt_atoms(), w), ConfigError);
}

TEST_CASE("grid construction from the velocity space") {
    VelocityGrid gb = VelocityGrid::for_space(VelocitySpace::ball(1, 1.0), 8);
    CHECK(gb.n() == 8);
    CHECK(gb.node_speed_max() < 1.0);

    VelocityGrid gd = VelocityGrid::for_space(VelocitySpace::discrete(gt_atoms(), Vec::Constant(2, 0.5)), 0);
    CHECK(gd.n() == 2);

    // unbounded space needs an explicit truncation
    CHECK_THROWS_AS(VelocityGrid::for_space(VelocitySpace::full(1), 8), ConfigError);
    VelocityGrid gf = VelocityGrid::for_space(VelocitySpace::full(1), 8, 4.0);
    CHECK(gf.n() == 8);
    CHECK((gf.quad_weights().array() * gf.equilibrium_density().array()).sum() ==
          doctest::Approx(1.0).epsilon(1e-13));
}
