#include "flatsurf/teich.hpp"

#include <cmath>

namespace flatsurf {

FlatSurface flow_to(const FlatSurface& s, double t, bool normalize, int* flip_count) {
    if (flip_count) *flip_count = 0;
    FlatSurface moved = apply_matrix(s, Mat2::g_t(t));
    if (!normalize) return moved;
    TriSurface ts(moved);
    int flips = ts.make_delaunay();
    if (flip_count) *flip_count = flips;
    return ts.to_flat_surface();
}

FlowTrack build_flow_track(const FlatSurface& s, double t_max, double dt, bool normalize) {
    if (!(t_max >= 0) || !(dt > 0))
        throw Error(ErrorCode::BadParams, "flow track needs t_max >= 0 and dt > 0");
    require_valid(s);

    FlowTrack track;
    track.base_surface = s;
    track.t_max = t_max;
    track.dt = dt;
    track.normalized = normalize;

    TriSurface cur(s);
    int flips0 = normalize ? cur.make_delaunay() : 0;
    track.samples.push_back({0.0, normalize ? cur.to_flat_surface() : s, flips0});

    int steps = static_cast<int>(std::floor(t_max / dt + 1e-9));
    for (int k = 1; k <= steps; ++k) {
        cur.apply_linear(Mat2::g_t(dt));
        int flips = normalize ? cur.make_delaunay() : 0;
        track.samples.push_back({k * dt, cur.to_flat_surface(), flips});
    }
    return track;
}

}  // namespace flatsurf
