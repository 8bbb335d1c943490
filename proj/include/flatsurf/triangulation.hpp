#ifndef FLATSURF_TRIANGULATION_HPP
#define FLATSURF_TRIANGULATION_HPP

#include <array>
#include <string>
#include <vector>

#include "flatsurf/surface.hpp"

namespace flatsurf {

struct SideRef {
    int tri = -1;
    int side = -1;
    bool operator==(const SideRef& o) const { return tri == o.tri && side == o.side; }
    bool valid() const { return tri >= 0; }
};

// One triangle in its own flat chart.  Side i runs vertex i -> vertex i+1.
struct Triangle {
    std::array<Vec2, 3> v;
    std::array<SideRef, 3> opp;       // glued partner side
    std::array<bool, 3> flip{};      // transition derivative -1 across side i
    std::array<int, 3> vclass{};     // vertex class index per corner
    int src_polygon = -1;            // index into source polygon ids

    Vec2 side_start(int s) const { return v[s % 3]; }
    Vec2 side_end(int s) const { return v[(s + 1) % 3]; }
    Vec2 side_vec(int s) const { return v[(s + 1) % 3] - v[s % 3]; }
    double area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }
};

struct VertexClass {
    double angle = 0.0;
    int order_k = 0;
    bool marked = false;
    bool in_sigma(bool marked_as_singular) const {
        return order_k != 0 || (marked && marked_as_singular);
    }
};

// A surface point addressed relative to the triangulation.
struct TriPoint {
    int tri = -1;
    Vec2 p;  // chart coordinates of tris[tri]
};

// Triangulated half-translation surface: the engine representation used by
// all geodesic, flow and distance computations.
class TriSurface {
  public:
    TriSurface() = default;
    // Triangulates the polygons by ear clipping.  Surface must be valid.
    explicit TriSurface(const FlatSurface& s);

    std::vector<Triangle> tris;
    std::vector<VertexClass> classes;
    std::vector<std::string> src_ids;  // source polygon ids
    bool all_translations = false;

    double area() const;
    // Transition mapping the chart of opp(t,s) into the chart of t, matching
    // the shared edge.
    Transition transition_into(int t, int s) const;

    // Lawson flips until every edge satisfies the empty-circumdisk test.
    // Returns the number of flips; throws FlipLimitExceeded past the cap.
    int make_delaunay(int flip_cap = 100000);
    // Flip one edge; no-op (returns false) when the quad is not strictly
    // convex or the edge is self-glued.
    bool flip_edge(int t, int s);
    bool edge_delaunay(int t, int s) const;

    void apply_linear(const Mat2& m);

    // Export as a FlatSurface whose polygons are the triangles (ids t0,t1,..).
    FlatSurface to_flat_surface() const;

    // Locate a point given in the chart of a source polygon.
    TriPoint locate(const std::string& polygon_id, const Vec2& p) const;

    // Exact flat distance from a point to the set of singular/marked vertex
    // classes, computed by local development; capped at `cap` (result is
    // min(true distance, cap)).
    double distance_to_sigma(const TriPoint& start, double cap, bool marked_as_singular) const;

    int vclass_at(const TriPoint& p, double tol = kEpsHit) const;  // -1 if not at a vertex
    double shortest_edge() const;
    double longest_edge() const;
};

// Spec-facing wrappers.
FlatSurface triangulate(const FlatSurface& s);
std::pair<FlatSurface, int> delaunay_normalize(const FlatSurface& s, int flip_cap = 100000);

}  // namespace flatsurf

#endif
