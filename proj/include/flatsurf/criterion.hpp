#ifndef FLATSURF_CRITERION_HPP
#define FLATSURF_CRITERION_HPP

#include <functional>
#include <vector>

#include "flatsurf/decomposition.hpp"
#include "flatsurf/teich.hpp"

namespace flatsurf {

enum class Verdict { DivergesLinearly, ConvergesNumerically, Inconclusive };

const char* verdict_name(Verdict v);

struct CriterionRow {
    double t = 0;
    double kappa = 0;
    double delta_sc = 0;  // shortest saddle connection at time t
    double d_t = 0;       // -log delta_sc
    double integrand = 0;  // kappa^2
    double integral = 0;   // trapezoid running integral
};

struct CriterionReport {
    std::vector<CriterionRow> rows;
    Verdict verdict = Verdict::Inconclusive;
};

struct CriterionOptions {
    int depth = 2;
    bool marked_as_singular = true;
    // time horizon for the closed-form envelope over the t=0 candidate set;
    // beyond it every sample re-enumerates on the normalized surface
    double envelope_t_max = 6.0;
    long long node_budget = 200000000;
};

// Per-sample systole and shortest saddle connection along the flow, with the
// running Theorem 1.1 integral of kappa(t)^2.
CriterionReport criterion_integral(const FlowTrack& track, const CriterionOptions& opts = {});

struct Thm3Row {
    double t = 0;
    int C = 0;
    double sumD = 0;
    double delta = 0;  // +inf when C == 1
    double integrand = 0;
    double integral = 0;
    bool cond1 = false;  // removed area < eta
    bool cond2 = true;   // boundary clearance > eps (true by construction)
    double removed_area = 0;
    double h_effective = 0;
};

struct Thm3Report {
    std::vector<Thm3Row> rows;
};

// Theorem 3.1 hypothesis quantities along the flow with the divergence
// integral of (sumD/eps^2 + (C-1)/delta)^{-2}.
Thm3Report theorem3_report(const FlowTrack& track, double eta,
                           const std::function<double(double)>& eps_schedule, double h,
                           bool marked_as_singular = true, long long node_budget = 60000);

}  // namespace flatsurf

#endif
