#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatsurf/format.hpp"
#include "flatsurf/geodesics.hpp"
#include "flatsurf/teich.hpp"

using namespace flatsurf;

TEST_CASE("straight closed geodesic is unchanged by tightening") {
    // horizontal loop at height 0.3 on the square torus
    CurvePath loop;
    loop.closed = true;
    loop.segs.push_back({"sq", {0, 0.3}, {1, 0.3}});
    auto res = tighten_curve(gen_torus(0), loop);
    CHECK(!res.trivial);
    CHECK(res.length == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zigzag tightens to the (1,0) loop") {
    CurvePath zig;
    zig.closed = true;
    zig.segs.push_back({"sq", {0, 0.3}, {0.4, 0.8}});
    zig.segs.push_back({"sq", {0.4, 0.8}, {0.7, 0.2}});
    zig.segs.push_back({"sq", {0.7, 0.2}, {1.0, 0.3}});
    auto res = tighten_curve(gen_torus(0), zig);
    CHECK(!res.trivial);
    CHECK(res.length == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("contractible loop collapses") {
    CurvePath tiny;
    tiny.closed = true;
    tiny.segs.push_back({"sq", {0.4, 0.4}, {0.6, 0.4}});
    tiny.segs.push_back({"sq", {0.6, 0.4}, {0.5, 0.6}});
    tiny.segs.push_back({"sq", {0.5, 0.6}, {0.4, 0.4}});
    auto res = tighten_curve(gen_torus(0), tiny);
    CHECK(res.trivial);
}

TEST_CASE("contractible loop around two triangles collapses") {
    // a loop around the midpoint of the diagonal of the square torus: it
    // crosses the diagonal twice and is null-homotopic
    CurvePath loop;
    loop.closed = true;
    loop.segs.push_back({"sq", {0.35, 0.45}, {0.65, 0.45}});
    loop.segs.push_back({"sq", {0.65, 0.45}, {0.65, 0.62}});
    loop.segs.push_back({"sq", {0.65, 0.62}, {0.35, 0.62}});
    loop.segs.push_back({"sq", {0.35, 0.62}, {0.35, 0.45}});
    auto res = tighten_curve(gen_torus(0), loop);
    CHECK(res.trivial);
}

TEST_CASE("systole of the square torus") {
    auto est = systole_estimate(gen_torus(0));
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(est.kind == SystoleKind::CylinderCore);
    CHECK(est.lower_confidence);
}

TEST_CASE("systole of g_1 torus") {
    auto s = apply_matrix(gen_torus(0), Mat2::g_t(1.0));
    auto est = systole_estimate(s);
    CHECK(est.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("systole of the L-shape") {
    auto est = systole_estimate(gen_lshape(2, 2));
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(est.lower_confidence);
}

TEST_CASE("pillowcase systole equals the brute-force candidate minimum") {
    // oracle: exhaustive candidate classes at depth 2 over connections up to
    // L = 3: cylinder cores and pairs of connections between pi-points.  All
    // connections have length >= 1, every banana doubles one, and both
    // cylinders have circumference 2, so the oracle minimum is 2.
    auto s = gen_pillowcase();
    double oracle = std::numeric_limits<double>::infinity();
    for (const auto& c : detect_cylinders(s, 3.0)) oracle = std::min(oracle, c.circumference);
    auto scs = enumerate_saddle_connections(s, 3.0);
    for (const auto& a : scs)
        for (const auto& b : scs)
            if (a.start_class == b.end_class && a.end_class == b.start_class)
                oracle = std::min(oracle, a.length() + b.length());
    CHECK(oracle == doctest::Approx(2.0));

    auto est = systole_estimate(s, 2);
    CHECK(est.value == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(est.lower_confidence);
}

TEST_CASE("systole certificate tightens to itself") {
    for (const FlatSurface& s :
         {gen_torus(0), gen_torus(0.5), gen_lshape(2, 2), gen_pillowcase()}) {
        auto est = systole_estimate(s);
        REQUIRE(!est.certificate.segs.empty());
        auto res = tighten_curve(s, est.certificate);
        CHECK(std::abs(res.length - est.value) < 1e-9);
    }
}

TEST_CASE("golden torus systole matches the lattice oracle under the flow") {
    double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto s = gen_torus(g);
    double n = std::sqrt(1 + g * g);
    for (double t : {0.0, 0.7, 1.5}) {
        auto st = apply_matrix(s, Mat2::g_t(t));
        double oracle = std::numeric_limits<double>::infinity();
        for (int p = -40; p <= 40; ++p)
            for (int q = -40; q <= 40; ++q) {
                if (!p && !q) continue;
                // lattice vector (p,q) rotated so (1,g) is horizontal
                double x = (p + g * q) / n, y = (q - g * p) / n;
                double lx = std::exp(-t) * x, ly = std::exp(t) * y;
                oracle = std::min(oracle, std::hypot(lx, ly));
            }
        auto est = systole_estimate(st);
        CHECK(est.value == doctest::Approx(oracle).epsilon(1e-9));
    }
}
