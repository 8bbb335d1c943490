#include "flatsurf/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "flatsurf/geodesics.hpp"

namespace flatsurf {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::DivergesLinearly: return "DivergesLinearly";
        case Verdict::ConvergesNumerically: return "ConvergesNumerically";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

// incremental (|x|,|y|)-Pareto front: its members realize every g_t minimum
struct ParetoFront {
    std::vector<Vec2> pts;  // sorted by x asc, y strictly desc

    void insert(Vec2 v) {
        v = {std::abs(v.x), std::abs(v.y)};
        auto it = std::lower_bound(pts.begin(), pts.end(), v,
                                   [](const Vec2& a, const Vec2& b) { return a.x < b.x; });
        if (it != pts.begin() && std::prev(it)->y <= v.y) return;  // dominated
        // erase newly dominated members
        auto jt = it;
        while (jt != pts.end() && jt->y >= v.y) ++jt;
        it = pts.erase(it, jt);
        pts.insert(it, v);
    }
    bool empty() const { return pts.empty(); }
    double eval(double t) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : pts) best = std::min(best, holonomy_length_at(v, t));
        return best;
    }
};

Verdict classify(const std::vector<CriterionRow>& rows) {
    size_t n = rows.size();
    if (n < 4) return Verdict::Inconclusive;
    size_t q = std::max<size_t>(1, n / 4);
    double first = 0, last = 0;
    for (size_t i = 0; i < q; ++i) first += rows[i].integrand;
    for (size_t i = n - q; i < n; ++i) last += rows[i].integrand;
    first /= q;
    last /= q;

    bool tail_small = rows.back().integrand < 1e-4;
    bool tail_monotone = true;
    for (size_t i = n - q; i + 1 < n; ++i)
        if (rows[i + 1].integrand > rows[i].integrand * (1 + 1e-9)) tail_monotone = false;
    if (tail_small && tail_monotone) return Verdict::ConvergesNumerically;
    if (last >= 0.5 * first && last > 0) return Verdict::DivergesLinearly;
    return Verdict::Inconclusive;
}

}  // namespace

CriterionReport criterion_integral(const FlowTrack& track, const CriterionOptions& opts) {
    CriterionReport rep;
    if (track.samples.empty()) return rep;

    // candidate holonomies at t = 0 for the closed-form envelope
    double env_tmax = -1;
    for (const auto& smp : track.samples)
        if (smp.t <= opts.envelope_t_max) env_tmax = std::max(env_tmax, smp.t);

    ParetoFront sc_front, closed_front;
    bool envelope_kappa_ok = false;
    double kappa0 = -1;
    if (env_tmax >= 0) {
        TriSurface ts0(track.samples.front().surface);
        kappa0 = systole_estimate(ts0, opts.depth, opts.marked_as_singular).value;
        EnumOptions eo;
        eo.with_paths = false;
        eo.marked_as_singular = opts.marked_as_singular;
        eo.node_budget = opts.node_budget;
        // bootstrap envelopes at a small radius, then rescan inside the
        // hyperbolic candidate region until the region is self-consistent
        double L = std::max(4 * ts0.shortest_edge(), 2 * kappa0);
        for (int round = 0; round < 40; ++round) {
            sc_front = ParetoFront{};
            closed_front = ParetoFront{};
            for_each_saddle_connection(ts0, L, eo, [&](const SaddleConnection& sc) {
                sc_front.insert(sc.holonomy);
                if (sc.start_class == sc.end_class) closed_front.insert(sc.holonomy);
            });
            if (!sc_front.empty() && !closed_front.empty()) break;
            L *= 2;
        }
        for (const auto& cyl :
             detect_cylinders(ts0, std::min(L, 8 * kappa0 + 1), opts.marked_as_singular))
            closed_front.insert(cyl.core_holonomy);

        for (int round = 0; round < 40; ++round) {
            // region implied by the current envelopes
            double X = 0, Y = 0, XY = 0;
            for (const auto& smp : track.samples) {
                if (smp.t > opts.envelope_t_max) break;
                double m = std::max(sc_front.eval(smp.t), closed_front.eval(smp.t));
                X = std::max(X, std::exp(smp.t) * m);
                Y = std::max(Y, std::exp(-smp.t) * m);
                XY = std::max(XY, m * m / 2);
            }
            EnumOptions ho = eo;
            ho.hyperbolic_region = true;
            ho.x_max = X * (1 + 1e-9);
            ho.y_max = Y * (1 + 1e-9);
            ho.xy_max = XY * (1 + 1e-9);
            ParetoFront sc2, cl2;
            for_each_saddle_connection(ts0, std::hypot(X, Y) * (1 + 1e-9), ho,
                                       [&](const SaddleConnection& sc) {
                                           sc2.insert(sc.holonomy);
                                           if (sc.start_class == sc.end_class)
                                               cl2.insert(sc.holonomy);
                                       });
            for (const auto& cyl :
                 detect_cylinders(ts0, std::min(8 * kappa0 + 1, std::hypot(X, Y)),
                                  opts.marked_as_singular))
                cl2.insert(cyl.core_holonomy);
            // converged when the refined envelopes fit the region they used
            bool stable = true;
            for (const auto& smp : track.samples) {
                if (smp.t > opts.envelope_t_max) break;
                double m = std::max(sc2.eval(smp.t), cl2.eval(smp.t));
                if (std::exp(smp.t) * m > X * (1 + 1e-9) + 1e-12) stable = false;
                if (std::exp(-smp.t) * m > Y * (1 + 1e-9) + 1e-12) stable = false;
                if (m * m / 2 > XY * (1 + 1e-9) + 1e-12) stable = false;
            }
            sc_front = std::move(sc2);
            closed_front = std::move(cl2);
            if (stable) break;
        }
        // the closed-candidate classes (cores and loops) describe kappa
        // exactly when they agree with the full search at t = 0
        envelope_kappa_ok = std::abs(closed_front.eval(0.0) - kappa0) <= 1e-9;
    }

    double integral = 0;
    for (size_t i = 0; i < track.samples.size(); ++i) {
        const FlowSample& s = track.samples[i];
        CriterionRow row;
        row.t = s.t;
        bool env_here = s.t <= opts.envelope_t_max && !sc_front.empty();
        row.delta_sc = env_here
                           ? sc_front.eval(s.t)
                           : shortest_saddle_connection(s.surface, opts.marked_as_singular)
                                 .length();
        if (env_here && envelope_kappa_ok)
            row.kappa = closed_front.eval(s.t);
        else if (s.t == 0 && kappa0 >= 0)
            row.kappa = kappa0;
        else
            row.kappa = systole_estimate(s.surface, opts.depth, opts.marked_as_singular).value;
        row.d_t = -std::log(row.delta_sc);
        row.integrand = row.kappa * row.kappa;
        if (i > 0) {
            const CriterionRow& prev = rep.rows.back();
            integral += 0.5 * (prev.integrand + row.integrand) * (row.t - prev.t);
        }
        row.integral = integral;
        rep.rows.push_back(row);
    }
    rep.verdict = classify(rep.rows);
    return rep;
}

Thm3Report theorem3_report(const FlowTrack& track, double eta,
                           const std::function<double(double)>& eps_schedule, double h,
                           bool marked_as_singular, long long node_budget) {
    if (!(eta > 0)) throw Error(ErrorCode::BadParams, "eta must be positive");
    Thm3Report rep;
    double integral = 0;
    for (size_t i = 0; i < track.samples.size(); ++i) {
        const FlowSample& s = track.samples[i];
        double eps = eps_schedule(s.t);
        if (!(eps > 0)) throw Error(ErrorCode::BadParams, "eps schedule must be positive");
        auto dec = thick_thin_decomposition(s.surface, eps, h, marked_as_singular, node_budget);

        Thm3Row row;
        row.t = s.t;
        row.C = dec.C;
        for (const auto& c : dec.components) row.sumD += c.diameter;
        row.delta = dec.delta;
        double term = row.sumD / (eps * eps);
        if (dec.C > 1) term += (dec.C - 1) / dec.delta;
        row.integrand = 1.0 / (term * term);
        row.cond1 = dec.removed_area < eta;
        row.cond2 = true;  // components consist of nodes with clearance >= eps
        row.removed_area = dec.removed_area;
        row.h_effective = dec.h_effective;
        if (i > 0) {
            const Thm3Row& prev = rep.rows.back();
            integral += 0.5 * (prev.integrand + row.integrand) * (row.t - prev.t);
        }
        row.integral = integral;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace flatsurf
