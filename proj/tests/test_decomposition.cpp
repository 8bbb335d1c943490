#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatsurf/decomposition.hpp"
#include "flatsurf/format.hpp"

using namespace flatsurf;

namespace {

// brute-force clearance oracle on a dense chart grid: distance to the nearest
// singular point image, scanning lattice translates of the pillowcase chart
double pillowcase_clearance(const Vec2& p) {
    // singular classes at (0,0),(1,0),(1,1),(0,1) modulo the identifications
    // z ~ z+(2,0) and z ~ -z+(2,0)/(2,2); images repeat on the integer grid
    double best = 1e9;
    for (int i = -2; i <= 4; ++i)
        for (int j = -2; j <= 3; ++j) best = std::min(best, dist(p, {double(i), double(j)}));
    return best;
}

}  // namespace

TEST_CASE("square torus thick part at eps 0.1") {
    auto d = thick_thin_decomposition(gen_torus(0), 0.1, 0.01);
    CHECK(d.C == 1);
    CHECK(d.removed_area <= kPi * 0.01 + 0.01);
    CHECK(d.removed_area >= kPi * 0.01 * 0.5);
    CHECK(d.delta == std::numeric_limits<double>::infinity());
    // torus diameter is sqrt(2)/2; graph estimate within the h-correction
    CHECK(d.components[0].diameter >= std::sqrt(0.5) - 1e-6);
    CHECK(d.components[0].diameter <= std::sqrt(0.5) + 0.2);
}

TEST_CASE("pillowcase components merge through edge midpoints at eps 0.45") {
    // clearance at every chart point (x, 0.5) is >= 0.5, so the mid-height
    // circle stays thick and the two squares connect: C = 1
    auto d = thick_thin_decomposition(gen_pillowcase(), 0.45, 0.045);
    CHECK(d.C == 1);
    CHECK(d.delta == std::numeric_limits<double>::infinity());
}

TEST_CASE("pillowcase separates at eps 0.55 with delta 0.5") {
    auto d = thick_thin_decomposition(gen_pillowcase(), 0.55, 0.02);
    CHECK(d.C == 2);
    // oracle: the bottleneck crossing is an edge midpoint with clearance 1/2
    CHECK(d.delta == doctest::Approx(0.5).epsilon(0.05));
    CHECK(d.delta <= 0.5 + 1e-9);
    for (const auto& c : d.components) {
        CHECK(c.area > 0.1);
        CHECK(c.diameter > 0);
    }
    // grid oracle for clearance sanity at a few probe points
    CHECK(pillowcase_clearance({0.5, 0.5}) == doctest::Approx(std::sqrt(0.5)));
    CHECK(pillowcase_clearance({1.0, 0.5}) == doctest::Approx(0.5));
}

TEST_CASE("eps larger than the diameter errors") {
    CHECK_THROWS_AS(thick_thin_decomposition(gen_pillowcase(), 0.8, 0.05), Error);
}

TEST_CASE("removed area grows with eps") {
    auto d1 = thick_thin_decomposition(gen_lshape(2, 2), 0.1, 0.02);
    auto d2 = thick_thin_decomposition(gen_lshape(2, 2), 0.3, 0.05);
    CHECK(d1.C == 1);
    CHECK(d2.C == 1);
    CHECK(d1.removed_area < d2.removed_area);
    // 6 pi cone: removed disk area = 3 pi eps^2
    CHECK(d1.removed_area == doctest::Approx(3 * kPi * 0.01).epsilon(0.2));
}
