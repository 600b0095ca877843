#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "limitends/errors.hpp"
#include "limitends/hyp_geom.hpp"
#include "oracles.hpp"

using namespace limitends;

namespace {

bool near(const HPoint& a, const HPoint& b, double tol) {
    return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol;
}

Horocycle random_horocycle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::normal_distribution<double> lev(0.0, 1.0);
    std::bernoulli_distribution inf(0.2);
    const IdealPoint base = inf(rng) ? IdealPoint::infinity() : IdealPoint::finite(ux(rng));
    return horocycle_at_level(base, lev(rng));
}

}  // namespace

TEST_CASE("dist closed form") {
    CHECK(dist({0, 1}, {0, std::numbers::e}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(dist({0, 1}, {0, 1}) == 0.0);
    CHECK(dist({-1, 1}, {1, 1}) == doctest::Approx(std::acosh(3.0)).epsilon(1e-15));
    CHECK(oracle::geodesic_length({-1, 1}, {1, 1}) == doctest::Approx(1.762747174039086).epsilon(1e-13));
}

TEST_CASE("dist agrees with the quadrature oracle") {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const HPoint p = oracle::random_point(rng), q = oracle::random_point(rng);
        const double d = dist(p, q);
        worst = std::max(worst, std::abs(d - oracle::geodesic_length(p, q)) / d);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("dist is a metric on random triples") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 500; ++i) {
        const HPoint a = oracle::random_point(rng), b = oracle::random_point(rng), c = oracle::random_point(rng);
        CHECK(dist(a, b) == dist(b, a));
        CHECK(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9);
        CHECK(dist(a, b) > 0.0);
    }
}

TEST_CASE("busemann values") {
    CHECK(busemann(IdealPoint::infinity(), kP0) == 0.0);
    CHECK(busemann(IdealPoint::infinity(), {5, std::numbers::e}) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(busemann(IdealPoint::finite(0), {0, 2}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(oracle::busemann_finite(0.0, {0, 2}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (double a : {-3.0, -0.5, 0.0, 0.7, 4.0}) CHECK(std::abs(busemann(IdealPoint::finite(a), kP0)) < 1e-15);
}

TEST_CASE("busemann agrees with the distance-to-horocycle oracle") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ua(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        const double a = ua(rng);
        const HPoint p = oracle::random_point(rng, 3.0);
        worst = std::max(worst, std::abs(busemann(IdealPoint::finite(a), p) - oracle::busemann_finite(a, p)));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("busemann level differences are distances between horocycles") {
    const IdealPoint base = IdealPoint::finite(0.3);
    const HPoint top{0.3, 4.0};
    const HPoint low{0.3, 0.5};
    CHECK(busemann(base, top) - busemann(base, low) == doctest::Approx(dist(top, low)).epsilon(1e-13));
}

TEST_CASE("horocycle_at") {
    const Horocycle h1 = horocycle_at(IdealPoint::finite(1), kP0);
    CHECK(h1.radius() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h1.level == 0.0);
    const Horocycle hinf = horocycle_at(IdealPoint::infinity(), kP0);
    CHECK(hinf.height() == 1.0);
    CHECK(horocycle_at(IdealPoint::infinity(), {7, 0.5}).height() == 0.5);
    for (double a : {-2.0, -0.5, 0.25, 3.0})
        CHECK(horocycle_at(IdealPoint::finite(a), kP0).radius() == doctest::Approx((a * a + 1) / 2).epsilon(1e-15));
}

TEST_CASE("horocycle_at stores the level of its point") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> ua(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const IdealPoint base = i % 5 == 0 ? IdealPoint::infinity() : IdealPoint::finite(ua(rng));
        const HPoint p = oracle::random_point(rng, 3.0);
        const Horocycle h = horocycle_at(base, p);
        CHECK(std::abs(h.level - busemann(base, p)) < 1e-12);
        CHECK(horocycle_residual(h, p) < 1e-12 * std::max(1.0, h.size));
    }
}

TEST_CASE("points on a horocycle share its level") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> ut(-4.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const Horocycle h = random_horocycle(rng);
        for (int j = 0; j < 5; ++j) CHECK(std::abs(busemann(h.base, horocycle_point(h, ut(rng))) - h.level) < 1e-9);
    }
}

TEST_CASE("horocycle intersections") {
    const Horocycle hm = horocycle_at(IdealPoint::finite(-0.5), kP0);
    const Horocycle hp = horocycle_at(IdealPoint::finite(0.5), kP0);
    auto pts = horocycle_intersection(hm, hp);
    REQUIRE(pts.size() == 2);
    CHECK(near(pts[0], {0, 0.25}, 1e-14));
    CHECK(near(pts[1], {0, 1}, 1e-14));

    for (double a : {-1.5, 0.5, 2.0}) {
        pts = horocycle_intersection(horocycle_at(IdealPoint::infinity(), kP0), horocycle_at(IdealPoint::finite(a), kP0));
        REQUIRE(pts.size() == 2);
        const HPoint other = std::abs(pts[0].x) < 1e-12 ? pts[1] : pts[0];
        CHECK(near(other, {2 * a, 1}, 1e-12));
    }

    pts = horocycle_intersection(horocycle_at(IdealPoint::finite(-1), kP0), horocycle_at(IdealPoint::finite(1), kP0));
    REQUIRE(pts.size() == 1);
    CHECK(near(pts[0], kP0, 1e-9));

    CHECK_THROWS_AS(horocycle_intersection(hp, horocycle_at(IdealPoint::finite(0.5), {0, 3})), SameBase);
}

TEST_CASE("horocycle intersections satisfy both incidence equations") {
    std::mt19937_64 rng(16);
    int found = 0;
    for (int i = 0; i < 500; ++i) {
        const Horocycle a = random_horocycle(rng);
        Horocycle b = random_horocycle(rng);
        while (b.base.same_as(a.base, 1e-9)) b = random_horocycle(rng);
        for (const HPoint& p : horocycle_intersection(a, b)) {
            ++found;
            CHECK(horocycle_residual(a, p) < 1e-10);
            CHECK(horocycle_residual(b, p) < 1e-10);
        }
    }
    CHECK(found > 300);
}

TEST_CASE("second_intersection reflects the known point") {
    const Horocycle hm = horocycle_at(IdealPoint::finite(-0.5), kP0);
    const Horocycle hp = horocycle_at(IdealPoint::finite(0.5), kP0);
    CHECK(near(second_intersection(hm, hp, kP0), {0, 0.25}, 1e-15));
    CHECK_THROWS_AS(second_intersection(horocycle_at(IdealPoint::finite(-1), kP0),
                                        horocycle_at(IdealPoint::finite(1), kP0), kP0),
                    DegenerateIntersection);
}

TEST_CASE("geodesic_through") {
    Geodesic g = geodesic_through(HPoint{0, 1}, HPoint{0, 2});
    CHECK(g.is_vertical());
    CHECK(g.center == 0.0);

    g = geodesic_through(IdealPoint::finite(-1), IdealPoint::finite(1));
    CHECK(!g.is_vertical());
    CHECK(g.center == doctest::Approx(0.0));
    CHECK(g.radius == doctest::Approx(1.0));

    g = geodesic_through(HPoint{1, 1}, IdealPoint::finite(0.5));
    CHECK(g.center == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(g.radius == doctest::Approx(1.25).epsilon(1e-15));

    CHECK_THROWS_AS(geodesic_through(HPoint{1, 1}, HPoint{1, 1}), CoincidentPoints);
    CHECK_THROWS_AS(geodesic_through(IdealPoint::infinity(), IdealPoint::infinity()), CoincidentPoints);
}

TEST_CASE("geodesic_through contains its anchors") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(-4.0, 4.0);
    for (int i = 0; i < 300; ++i) {
        const HPoint p = oracle::random_point(rng, 4.0);
        const HPoint q = oracle::random_point(rng, 4.0);
        const IdealPoint a = IdealPoint::finite(ux(rng));
        Geodesic g = geodesic_through(p, q);
        CHECK(side_of(g, p) == 0);
        CHECK(side_of(g, q) == 0);
        g = geodesic_through(p, a);
        CHECK(side_of(g, p) == 0);
        const auto [e0, e1] = ideal_endpoints(g);
        CHECK((e0.same_as(a, 1e-9) || e1.same_as(a, 1e-9)));
        g = geodesic_through(p, IdealPoint::infinity());
        CHECK(g.is_vertical());
        CHECK(side_of(g, p) == 0);
    }
}

TEST_CASE("ideal endpoints") {
    auto [a, b] = ideal_endpoints(Geodesic::vertical(3));
    CHECK(a == IdealPoint::finite(3));
    CHECK(b.is_infinity());
    std::tie(a, b) = ideal_endpoints(Geodesic::semicircle(0, 1));
    CHECK(a.x() == -1.0);
    CHECK(b.x() == 1.0);
    std::tie(a, b) = ideal_endpoints(Geodesic::semicircle(1.75, 1.25));
    CHECK(a.x() == 0.5);
    CHECK(b.x() == 3.0);
}

TEST_CASE("hyp_length") {
    const std::vector<HPoint> vert{{0, 1}, {0, std::numbers::e}};
    CHECK(hyp_length(vert) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<HPoint> horiz{{0, 1}, {2, 1}};
    CHECK(hyp_length(horiz, SegmentKind::Euclidean) == doctest::Approx(2.0).epsilon(1e-15));
    const std::vector<HPoint> arc{{-1, 1}, {1, 1}};
    CHECK(hyp_length(arc) == doctest::Approx(std::acosh(3.0)).epsilon(1e-15));
}

TEST_CASE("Euclidean segment length agrees with quadrature") {
    std::mt19937_64 rng(18);
    for (int i = 0; i < 200; ++i) {
        const HPoint p = oracle::random_point(rng), q = oracle::random_point(rng);
        const double l = euclidean_segment_length(p, q);
        CHECK(std::abs(l - oracle::segment_length(p, q)) < 1e-9 * l);
        CHECK(l >= dist(p, q) - 1e-12);
    }
}

TEST_CASE("side_of") {
    CHECK(side_of(Geodesic::vertical(0), HPoint{1, 1}) == 1);
    CHECK(side_of(Geodesic::semicircle(0, 1), HPoint{0, 1}) == 0);
    CHECK(side_of(Geodesic::semicircle(0, 1), HPoint{0, 2}) == 1);
    CHECK(side_of(Geodesic::semicircle(0, 1), HPoint{0, 0.5}) == -1);
}

TEST_CASE("geodesic coordinate is arclength") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 200; ++i) {
        const HPoint p = oracle::random_point(rng), q = oracle::random_point(rng);
        const Geodesic g = geodesic_through(p, q);
        const double s = std::abs(geodesic_coordinate(g, p) - geodesic_coordinate(g, q));
        CHECK(s == doctest::Approx(dist(p, q)).epsilon(1e-9));
        const HPoint back = geodesic_point(g, geodesic_coordinate(g, p));
        CHECK(dist(back, p) < 1e-7);
    }
}

TEST_CASE("point_at_level and level_coordinate agree") {
    const Geodesic g = Geodesic::semicircle(1.75, 1.25);
    const IdealPoint end = IdealPoint::finite(0.5);
    for (double level : {-6.0, -2.0, 0.0, 1.5}) {
        const HPoint p = point_at_level(g, end, level);
        CHECK(busemann(end, p) == doctest::Approx(level).epsilon(1e-10));
        CHECK(side_of(g, p) == 0);
        CHECK(level_coordinate(g, end, level) == doctest::Approx(geodesic_coordinate(g, p)).epsilon(1e-10));
    }
}

TEST_CASE("disk transform is an isometry") {
    const auto o = to_disk(kP0);
    CHECK(std::abs(o.first) < 1e-15);
    CHECK(std::abs(o.second) < 1e-15);
    std::mt19937_64 rng(20);
    for (int i = 0; i < 100; ++i) {
        const HPoint p = oracle::random_point(rng, 2.0), q = oracle::random_point(rng, 2.0);
        CHECK(oracle::disk_distance(to_disk(p), to_disk(q)) == doctest::Approx(dist(p, q)).epsilon(1e-7));
    }
}
