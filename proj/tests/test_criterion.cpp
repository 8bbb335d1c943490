#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatsurf/criterion.hpp"
#include "flatsurf/format.hpp"
#include "flatsurf/geodesics.hpp"

using namespace flatsurf;

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

// lattice oracle for the systole of the rotated torus under g_t
double torus_systole_oracle(double slope, double t, int box = 600) {
    double n = std::sqrt(1 + slope * slope);
    double best = 1e300;
    for (int p = -box; p <= box; ++p)
        for (int q = -box; q <= box; ++q) {
            if (!p && !q) continue;
            double xx = (p + slope * q) / n, yy = (q - slope * p) / n;
            best = std::min(best, std::hypot(std::exp(-t) * xx, std::exp(t) * yy));
        }
    return best;
}
}  // namespace

TEST_CASE("empty horizon gives a single zero row") {
    auto track = build_flow_track(gen_torus(kGolden), 0.0, 0.1, true);
    auto rep = criterion_integral(track);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].integral == 0.0);
    CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("golden torus diverges linearly and matches the lattice oracle") {
    auto track = build_flow_track(gen_torus(kGolden), 5.0, 0.25, true);
    auto rep = criterion_integral(track);
    CHECK(rep.verdict == Verdict::DivergesLinearly);
    CHECK(rep.rows.back().integral >= 0.1 * 5.0);
    for (const auto& r : rep.rows) {
        double oracle = torus_systole_oracle(kGolden, r.t, 200);
        CHECK(r.kappa == doctest::Approx(oracle).epsilon(1e-6));
        CHECK(r.delta_sc == doctest::Approx(oracle).epsilon(1e-6));
    }
    // integral is nondecreasing
    for (size_t i = 1; i < rep.rows.size(); ++i)
        CHECK(rep.rows[i].integral >= rep.rows[i - 1].integral - 1e-15);
}

TEST_CASE("rational slope converges numerically") {
    auto track = build_flow_track(gen_torus(0.5), 8.0, 0.5, true);
    auto rep = criterion_integral(track);
    CHECK(rep.verdict == Verdict::ConvergesNumerically);
    CHECK(rep.rows.back().integrand <= 2e-4);
    // kappa(t) ~ sqrt(5) e^{-t} for t >= 2
    for (const auto& r : rep.rows) {
        if (r.t < 2) continue;
        CHECK(r.kappa / std::exp(-r.t) == doctest::Approx(std::sqrt(5.0)).epsilon(0.05));
    }
}

TEST_CASE("envelope agrees with re-enumeration on the normalized samples") {
    auto track = build_flow_track(gen_torus(kGolden), 6.0, 1.0, true);
    auto rep = criterion_integral(track);
    for (size_t i = 0; i < track.samples.size(); ++i) {
        double direct = shortest_saddle_connection(track.samples[i].surface).length();
        CHECK(rep.rows[i].delta_sc == doctest::Approx(direct).epsilon(1e-6));
    }
}

TEST_CASE("halving dt moves the integral by less than 2 percent") {
    auto t1 = build_flow_track(gen_torus(kGolden), 4.0, 0.2, true);
    auto t2 = build_flow_track(gen_torus(kGolden), 4.0, 0.1, true);
    double i1 = criterion_integral(t1).rows.back().integral;
    double i2 = criterion_integral(t2).rows.back().integral;
    CHECK(std::abs(i1 - i2) / i2 < 0.02);
}

TEST_CASE("theorem 3 on the golden torus: one component, linear integral") {
    auto track = build_flow_track(gen_torus(kGolden), 3.0, 0.5, true);
    auto rep = theorem3_report(track, 2.0, [](double) { return 0.1; }, 0.02);
    REQUIRE(rep.rows.size() == track.samples.size());
    for (const auto& r : rep.rows) {
        CHECK(r.C == 1);
        CHECK(r.delta == std::numeric_limits<double>::infinity());
        CHECK(r.cond1);  // eta = 2 exceeds the total area: trivially true
        CHECK(r.cond2);
        // integrand = (eps^2 / sumD)^2 with D_t bounded on the golden orbit
        CHECK(r.integrand == doctest::Approx(std::pow(0.01 / r.sumD, 2)).epsilon(1e-9));
        CHECK(r.sumD < 2.0);
        // diameter oracle: the flat torus diameter is at most sqrt(area)*,
        // and at least half the covering radius; sumD must stay in range
        CHECK(r.sumD > 0.5);
    }
    // linear lower bound on the running integral
    double slope_est = rep.rows.back().integral / 3.0;
    CHECK(slope_est > 0.5 * rep.rows[1].integrand);
}

TEST_CASE("theorem 3 on the slope-1/2 torus: integrand decays like e^{-2t}") {
    auto track = build_flow_track(gen_torus(0.5), 4.0, 1.0, true);
    auto rep = theorem3_report(track, 2.0, [](double) { return 0.1; }, 0.05);
    // D_t grows like e^t (one long thin cylinder) so the integrand decays
    CHECK(rep.rows.back().sumD > rep.rows.front().sumD * 5);
    CHECK(rep.rows.back().integrand < rep.rows.front().integrand / 100);
}

TEST_CASE("spec inequality: delta >= kappa/(2|Sigma|) - h on decompositions with C > 1") {
    // pillowcase at eps past the separation threshold
    auto dec = thick_thin_decomposition(gen_pillowcase(), 0.55, 0.02);
    REQUIRE(dec.C == 2);
    double kappa = systole_estimate(gen_pillowcase()).value;
    int sigma = 4;
    CHECK(dec.delta >= kappa / (2 * sigma) - dec.h_effective);
}
