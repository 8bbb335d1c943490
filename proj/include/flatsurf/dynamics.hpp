#ifndef FLATSURF_DYNAMICS_HPP
#define FLATSURF_DYNAMICS_HPP

#include <cstdint>
#include <vector>

#include "flatsurf/cover.hpp"
#include "flatsurf/geodesics.hpp"

namespace flatsurf {

enum class TraceEnd { LengthBudget, HitConePoint, ClosedUp };

const char* trace_end_name(TraceEnd e);

struct LeafTrace {
    SurfacePoint start;       // on the cover total
    CurvePath segments;       // chart segments on the total
    double total_length = 0;
    TraceEnd terminated_by = TraceEnd::LengthBudget;
};

// Horizontal straight-line flow on the cover total.  Stops at the budget, at
// a cone/marked point (within kEpsHit) or on exact closure.
LeafTrace trace_leaf(const CoverData& cover, const SurfacePoint& start, double length_budget);

// Vertical transversal segment on the cover total.
struct Transversal {
    std::string polygon;
    Vec2 base_point;
    double height = 0;
};

struct ReturnInterval {
    double length = 0;
    int image_index = 0;      // position of the image interval, bottom-up
    bool orientation_preserving = true;
    double return_time = 0;
};

struct ReturnMap {
    Transversal transversal;
    std::vector<ReturnInterval> intervals;  // bottom-up along the transversal
    std::vector<double> cut_points;         // offsets of the partition, size n+1
    // first-return offsets of interval midpoints (for cross-validation)
    std::vector<double> midpoint_images;
};

// First-return interval exchange of the horizontal flow on the transversal.
// The partition comes from backward separatrix traces out of every singular
// point; each interval's return is verified rigid within 1e-7.
ReturnMap first_return_map(const CoverData& cover, const Transversal& transversal,
                           double trace_budget = 0 /* 0: automatic */);

// Iterate the extracted interval map (offset within [0, height)).
double iterate_return_map(const ReturnMap& rm, double offset, int times);

struct DiscrepancyPoint {
    long long N = 0;
    double D_N = 0;
};

// Box-counting discrepancy of unit-length samples (phase 0.5) of the trace,
// projected to the base, against the G x G box partition of each polygon's
// bounding box intersected with the polygon.
std::vector<DiscrepancyPoint> box_discrepancy(const CoverData& cover, const LeafTrace& trace,
                                              int grid);

enum class UEVerdict { UELike, NonUELike, Inconclusive };
const char* ue_verdict_name(UEVerdict v);

struct PanelEntry {
    int start_id = 0;
    int box_id = 0;
    long long N = 0;
    double avg = 0;
};

struct ErgodicityReport {
    std::vector<DiscrepancyPoint> discrepancy_series;  // max over starts per N
    std::vector<PanelEntry> birkhoff_table;
    UEVerdict verdict = UEVerdict::Inconclusive;
};

// Running box-indicator averages for several start points.
ErgodicityReport birkhoff_panel(const CoverData& cover, const std::vector<SurfacePoint>& starts,
                                int grid, double budget);

// Crossing-count estimate of the transverse invariant measure of a vertical
// segment gamma on the base: (crossings by the first N units) * area / N.
double transverse_measure_estimate(const CoverData& cover, const Transversal& gamma_on_base,
                                   const LeafTrace& trace, double eps_width = 1e-9);

}  // namespace flatsurf

#endif
