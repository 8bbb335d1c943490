#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flatsurf/format.hpp"
#include "flatsurf/triangulation.hpp"

using namespace flatsurf;

namespace {

double total_angle(const FlatSurface& s) {
    double a = 0;
    for (const auto& cp : cone_points(s)) a += cp.angle;
    return a;
}

double max_aspect(const TriSurface& ts) {
    double worst = 0;
    for (const auto& t : ts.tris) {
        double longest = 0;
        for (int s = 0; s < 3; ++s) longest = std::max(longest, t.side_vec(s).norm());
        worst = std::max(worst, longest * longest / t.area());
    }
    return worst;
}

}  // namespace

TEST_CASE("triangle input is already triangulated") {
    auto base = triangulate(gen_torus(0));
    auto again = triangulate(base);
    CHECK(again.polygons.size() == base.polygons.size());
    CHECK(area(again) == doctest::Approx(area(base)));
}

TEST_CASE("square torus triangulates to 2 triangles") {
    auto t = triangulate(gen_torus(0));
    CHECK(t.polygons.size() == 2);
    CHECK(area(t) == doctest::Approx(1.0));
    auto cps = cone_points(t);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].angle == doctest::Approx(2 * kPi));
    CHECK(cps[0].marked);
    CHECK(validate(t).empty());
}

TEST_CASE("L-shape triangulates with cone angle preserved") {
    auto s = gen_lshape(2, 2);
    auto t = triangulate(s);
    // Euler count forces 6 triangles for the genus-2 L-shape
    CHECK(t.polygons.size() == 6);
    CHECK(area(t) == doctest::Approx(3.0));
    auto cps = cone_points(t);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].angle == doctest::Approx(6 * kPi).epsilon(1e-9));
    CHECK(validate(t).empty());
}

TEST_CASE("pillowcase triangulation keeps cone data") {
    auto t = triangulate(gen_pillowcase());
    CHECK(t.polygons.size() == 4);
    auto cps = cone_points(t);
    REQUIRE(cps.size() == 4);
    for (const auto& cp : cps) CHECK(cp.angle == doctest::Approx(kPi));
    CHECK(validate(t).empty());
    CHECK(total_angle(t) == doctest::Approx(4 * kPi));
}

TEST_CASE("degenerate polygon is rejected") {
    FlatSurface s;
    Polygon p{"p", {{0, 0}, {1, 0}, {2, 0}, {1, 1e-15}}};
    s.polygons.push_back(p);
    CHECK(!validate(s).empty());
}

TEST_CASE("already Delaunay square torus has zero flips") {
    auto [t, flips] = delaunay_normalize(triangulate(gen_torus(0)));
    CHECK(flips == 0);
    CHECK(area(t) == doctest::Approx(1.0));
}

TEST_CASE("sheared torus normalizes to bounded aspect") {
    auto sheared = apply_matrix(gen_torus(0), Mat2{1, 0, 3, 1});
    TriSurface before(sheared);
    double aspect_before = max_aspect(before);
    TriSurface after(sheared);
    int flips = after.make_delaunay();
    CHECK(flips > 0);
    CHECK(max_aspect(after) <= aspect_before);
    CHECK(after.area() == doctest::Approx(1.0));
    auto cps = cone_points(after.to_flat_surface());
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].angle == doctest::Approx(2 * kPi).epsilon(1e-9));
}

TEST_CASE("delaunay flips preserve area exactly and angles") {
    auto s = apply_matrix(gen_lshape(2, 2), Mat2{1, 0.7, 0, 1});
    auto [t, flips] = delaunay_normalize(s);
    (void)flips;
    CHECK(area(t) == doctest::Approx(3.0).epsilon(1e-12));
    auto cps = cone_points(t);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].angle == doctest::Approx(6 * kPi).epsilon(1e-9));
    TriSurface ts(t);
    for (int tr = 0; tr < (int)ts.tris.size(); ++tr)
        for (int sd = 0; sd < 3; ++sd) CHECK(ts.edge_delaunay(tr, sd));
}

TEST_CASE("locate and distance to sigma on the square torus") {
    TriSurface ts(gen_torus(0));
    auto pt = ts.locate("sq", {0.5, 0.5});
    double d = ts.distance_to_sigma(pt, 10.0, true);
    CHECK(d == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    // with marked points outside Sigma there is nothing to hit: capped
    CHECK(ts.distance_to_sigma(pt, 10.0, false) == doctest::Approx(10.0));

    auto edge_pt = ts.locate("sq", {0.25, 0.0});
    CHECK(ts.distance_to_sigma(edge_pt, 10.0, true) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("distance to sigma on the pillowcase") {
    TriSurface ts(gen_pillowcase());
    auto pt = ts.locate("a", {0.5, 0.5});
    CHECK(ts.distance_to_sigma(pt, 10.0, false) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    auto pt2 = ts.locate("b", {1.5, 0.5});
    CHECK(ts.distance_to_sigma(pt2, 10.0, false) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}
