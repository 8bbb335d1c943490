#ifndef FLATSURF_TEICH_HPP
#define FLATSURF_TEICH_HPP

#include <vector>

#include "flatsurf/surface.hpp"
#include "flatsurf/triangulation.hpp"

namespace flatsurf {

// Length of g_t * v in closed form.
inline double holonomy_length_at(const Vec2& v, double t) {
    double x = std::exp(-t) * v.x;
    double y = std::exp(t) * v.y;
    return std::sqrt(x * x + y * y);
}

struct FlowSample {
    double t = 0.0;
    FlatSurface surface;
    int flip_count = 0;  // flips spent normalizing this sample
};

struct FlowTrack {
    FlatSurface base_surface;
    std::vector<FlowSample> samples;
    double t_max = 0.0;
    double dt = 0.0;
    bool normalized = false;
};

// g_t action; optionally Delaunay-normalized afterwards.
FlatSurface flow_to(const FlatSurface& s, double t, bool normalize, int* flip_count = nullptr);

// Samples at t = 0, dt, 2dt, ..., t_max.  When normalizing, each sample is
// obtained from the previous one by a g_dt step plus Delaunay flips, which
// keeps the triangulation numerically fat along the whole orbit.
FlowTrack build_flow_track(const FlatSurface& s, double t_max, double dt, bool normalize);

}  // namespace flatsurf

#endif
