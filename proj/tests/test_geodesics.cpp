#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "flatsurf/format.hpp"
#include "flatsurf/geodesics.hpp"
#include "flatsurf/teich.hpp"

using namespace flatsurf;

namespace {

// primitive lattice vectors of norm <= L, as the saddle connection oracle for
// the unit square torus with one marked point
std::vector<Vec2> lattice_oracle(double L) {
    std::vector<Vec2> v;
    int M = static_cast<int>(L) + 1;
    for (int p = -M; p <= M; ++p)
        for (int q = -M; q <= M; ++q) {
            if (p == 0 && q == 0) continue;
            if (std::gcd(std::abs(p), std::abs(q)) != 1) continue;
            if (p * p + q * q <= L * L * (1 + 1e-12)) v.push_back({double(p), double(q)});
        }
    return v;
}

bool same_multiset(std::vector<Vec2> a, std::vector<Vec2> b, double tol) {
    if (a.size() != b.size()) return false;
    auto lt = [](const Vec2& x, const Vec2& y) {
        return x.x != y.x ? x.x < y.x : x.y < y.y;
    };
    std::sort(a.begin(), a.end(), lt);
    std::sort(b.begin(), b.end(), lt);
    for (size_t i = 0; i < a.size(); ++i)
        if (dist(a[i], b[i]) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("square torus enumeration at L=1.5") {
    auto scs = enumerate_saddle_connections(gen_torus(0), 1.5);
    CHECK(scs.size() == 8);
    std::vector<Vec2> hol;
    for (const auto& s : scs) hol.push_back(s.holonomy);
    CHECK(same_multiset(hol, lattice_oracle(1.5), 1e-9));
}

TEST_CASE("square torus enumeration matches lattice oracle at L=10") {
    auto scs = enumerate_saddle_connections(gen_torus(0), 10.0);
    auto oracle = lattice_oracle(10.0);
    CHECK(scs.size() == oracle.size());
    std::vector<Vec2> hol;
    for (const auto& s : scs) hol.push_back(s.holonomy);
    CHECK(same_multiset(hol, oracle, 1e-8));
}

TEST_CASE("enumeration below the shortest connection is empty") {
    CHECK(enumerate_saddle_connections(gen_torus(0), 0.5).empty());
    CHECK(enumerate_saddle_connections(gen_pillowcase(), 0.9).empty());
}

TEST_CASE("pillowcase enumeration matches the branched double cover oracle") {
    // oracle: directed segments between branch points of R^2/(2Z)^2 without
    // interior branch points, divided by the deck fold at the start point
    auto count_oracle = [](double L) {
        int n = 0;
        int M = static_cast<int>(L) + 2;
        for (int bx = 0; bx <= 1; ++bx)
            for (int by = 0; by <= 1; ++by)
                for (int vx = -M; vx <= M; ++vx)
                    for (int vy = -M; vy <= M; ++vy) {
                        if (vx == 0 && vy == 0) continue;
                        if (vx * vx + vy * vy > L * L * (1 + 1e-12)) continue;
                        int g = std::gcd(std::abs(vx), std::abs(vy));
                        if (g > 1) continue;  // interior branch/lattice point
                        (void)bx;
                        (void)by;
                        ++n;
                    }
        return n / 2;
    };
    for (double L : {1.05, 1.5}) {
        auto scs = enumerate_saddle_connections(gen_pillowcase(), L);
        CHECK((int)scs.size() == count_oracle(L));
    }
    auto scs = enumerate_saddle_connections(gen_pillowcase(), 1.05);
    for (const auto& s : scs) CHECK(s.length() == doctest::Approx(1.0));
}

TEST_CASE("reversal symmetry of holonomies") {
    for (const FlatSurface& s : {gen_torus(0.618), gen_lshape(2, 2)}) {
        auto scs = enumerate_saddle_connections(s, 2.5);
        REQUIRE(!scs.empty());
        for (const auto& sc : scs) {
            bool found = false;
            for (const auto& other : scs)
                if (dist(other.holonomy, -sc.holonomy) < 1e-9) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("paths develop to the holonomy") {
    auto scs = enumerate_saddle_connections(gen_lshape(2, 2), 2.2);
    REQUIRE(!scs.empty());
    for (const auto& sc : scs) {
        REQUIRE(!sc.path.segs.empty());
        double plen = sc.path.length();
        CHECK(plen == doctest::Approx(sc.length()).epsilon(1e-9));
    }
}

TEST_CASE("shortest saddle connection") {
    CHECK(shortest_saddle_connection(gen_torus(0)).length() == doctest::Approx(1.0));
    auto g = apply_matrix(gen_torus(0), Mat2::g_t(std::log(2.0)));
    CHECK(shortest_saddle_connection(g).length() == doctest::Approx(0.5));
    CHECK(shortest_saddle_connection(gen_lshape(2, 2)).length() == doctest::Approx(1.0));
}

TEST_CASE("delaunay normalization preserves the shortest connection") {
    auto moved = apply_matrix(gen_torus(0), Mat2::g_t(3.0));
    auto before = shortest_saddle_connection(moved).length();
    auto [norm, flips] = delaunay_normalize(moved);
    (void)flips;
    auto after = shortest_saddle_connection(norm).length();
    CHECK(std::abs(before - after) < 1e-9);
}

TEST_CASE("square torus horizontal cylinder") {
    auto cyls = detect_cylinders(gen_torus(0), 1.5);
    int horizontal = 0;
    for (const auto& c : cyls) {
        if (std::abs(c.core_holonomy.y) < 1e-9) {
            ++horizontal;
            CHECK(c.circumference == doctest::Approx(1.0));
            CHECK(c.height == doctest::Approx(1.0));
        }
    }
    CHECK(horizontal == 1);
}

TEST_CASE("slope-1/2 torus horizontal cylinder") {
    auto s = gen_torus(0.5);
    auto cyls = detect_cylinders(s, 2.5);
    int horizontal = 0;
    for (const auto& c : cyls)
        if (std::abs(c.core_holonomy.y) < 1e-9) {
            ++horizontal;
            CHECK(c.circumference == doctest::Approx(std::sqrt(5.0)));
            CHECK(c.height == doctest::Approx(1.0 / std::sqrt(5.0)));
        }
    CHECK(horizontal == 1);
}

TEST_CASE("golden torus has no horizontal cylinder") {
    double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto cyls = detect_cylinders(gen_torus(g), 10.0);
    for (const auto& c : cyls) CHECK(std::abs(c.core_holonomy.y) > 1e-9);
}

TEST_CASE("pillowcase cylinders") {
    auto cyls = detect_cylinders(gen_pillowcase(), 2.5);
    int horizontal = 0, vertical = 0;
    for (const auto& c : cyls) {
        if (std::abs(c.core_holonomy.y) < 1e-9) {
            ++horizontal;
            CHECK(c.circumference == doctest::Approx(2.0));
            CHECK(c.height == doctest::Approx(1.0));
        }
        if (std::abs(c.core_holonomy.x) < 1e-9) {
            ++vertical;
            CHECK(c.circumference == doctest::Approx(2.0));
        }
    }
    CHECK(horizontal == 1);
    CHECK(vertical == 1);
}

TEST_CASE("cylinder boundaries are parallel to the core") {
    for (const auto& c : detect_cylinders(gen_lshape(2, 2), 2.2)) {
        for (const auto& b : c.boundary) {
            double crossv = std::abs(cross(b.holonomy, c.core_holonomy));
            CHECK(crossv <= 1e-7 * b.holonomy.norm() * c.core_holonomy.norm());
        }
    }
}
