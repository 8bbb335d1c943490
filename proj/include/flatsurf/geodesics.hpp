#ifndef FLATSURF_GEODESICS_HPP
#define FLATSURF_GEODESICS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flatsurf/triangulation.hpp"

namespace flatsurf {

// Piecewise-straight curve through polygon charts.
struct CurveSeg {
    std::string polygon;
    Vec2 a, b;
};

struct CurvePath {
    std::vector<CurveSeg> segs;
    bool closed = false;

    double length() const {
        double l = 0;
        for (const auto& s : segs) l += dist(s.a, s.b);
        return l;
    }
};

struct SaddleConnection {
    Vec2 holonomy;
    int start_class = -1;
    int end_class = -1;
    CurvePath path;  // may be empty when enumerated without paths
    // corner occurrence the connection leaves from
    int start_tri = -1;
    int start_corner = -1;

    double length() const { return holonomy.norm(); }
};

struct Cylinder {
    Vec2 core_holonomy;
    double circumference = 0;
    double height = 0;
    std::vector<SaddleConnection> boundary;
    CurvePath core;
};

enum class SystoleKind { CylinderCore, SingularLoop, Concatenation };

struct SystoleEstimate {
    double value = 0;
    CurvePath certificate;
    SystoleKind kind = SystoleKind::SingularLoop;
    bool lower_confidence = false;
};

struct EnumOptions {
    bool with_paths = true;
    long long node_budget = 10000000;  // development states
    bool marked_as_singular = true;    // marked points are endpoints/obstacles
    // anchor the search at every vertex class (for surfaces whose classes are
    // all regular and unmarked, where closed geodesics still exist)
    bool all_vertices_as_targets = false;
    // restrict the search to the star-shaped region
    // {|x| <= x_max, |y| <= y_max, |x*y| <= xy_max}: the candidates relevant
    // anywhere along a g_t orbit form such a hyperbolic neighborhood
    bool hyperbolic_region = false;
    double x_max = 0, y_max = 0, xy_max = 0;
};

// Complete list of saddle connections of length <= L (closed under reversal).
// Endpoints are cone points, plus marked points when marked_as_singular.
std::vector<SaddleConnection> enumerate_saddle_connections(const TriSurface& ts, double L,
                                                           const EnumOptions& opts = {});
// Streaming form: paths are never materialized and memory stays O(depth).
void for_each_saddle_connection(const TriSurface& ts, double L, const EnumOptions& opts,
                                const std::function<void(const SaddleConnection&)>& fn);
std::vector<SaddleConnection> enumerate_saddle_connections(const FlatSurface& s, double L,
                                                           const EnumOptions& opts = {});

// Doubling search; throws NoConePoints when no endpoint classes exist.
SaddleConnection shortest_saddle_connection(const FlatSurface& s,
                                            bool marked_as_singular = true);

std::vector<Cylinder> detect_cylinders(const TriSurface& ts, double L,
                                       bool marked_as_singular = true);
std::vector<Cylinder> detect_cylinders(const FlatSurface& s, double L,
                                       bool marked_as_singular = true);

SystoleEstimate systole_estimate(const FlatSurface& s, int depth = 2,
                                 bool marked_as_singular = true);
SystoleEstimate systole_estimate(const TriSurface& ts, int depth = 2,
                                 bool marked_as_singular = true);

// ---- straight-line tracing -------------------------------------------------

enum class WalkStop { None, ConePoint, Stuck };

struct WalkSeg {
    int tri = -1;
    Vec2 a, b;          // chart coordinates
    Vec2 dev_a, dev_b;  // developed coordinates (start of walk at origin-side)
    int exit_side = -1;  // side crossed at the end of the segment, -1 on stop
    double exit_u = 0;   // crossing parameter along that side
};

// Steps a straight ray across the triangulation.  Stops within kEpsHit of a
// Sigma vertex (HitConePoint semantics); passes straight through flat
// non-Sigma vertices.
class RayWalker {
  public:
    RayWalker(const TriSurface& ts, const TriPoint& start, const Vec2& dir,
              bool marked_as_singular);
    // Starting exactly at a vertex of the given class, heading into the
    // unique corner wedge containing `dir`.
    static RayWalker from_vertex(const TriSurface& ts, int tri, int corner, const Vec2& dir,
                                 bool marked_as_singular);

    // Produce the next maximal in-triangle segment.  Returns false when the
    // walk stopped (see status); the partial segment, if any, is in `out`.
    bool advance(WalkSeg& out);

    WalkStop status = WalkStop::None;
    int start_tri = -1, start_corner = -1;  // set by from_vertex
    int hit_class = -1;
    int hit_tri = -1, hit_corner = -1;  // corner occurrence of the cone hit
    Vec2 hit_dev;        // developed coordinates of the cone hit
    Vec2 hit_chart_dir;  // walk direction in the chart of hit_tri
    double traveled = 0;  // length up to the end of the last emitted segment

  private:
    RayWalker(const TriSurface& ts, bool marked_as_singular);
    const TriSurface* ts_;
    bool sigma_marked_;
    int tri_ = -1;
    Vec2 p_;       // current chart position
    Vec2 d_;       // current chart direction (unit)
    Transition dev_;  // chart -> developed plane
    int entry_side_ = -1;
    bool skip_start_vertex_check_ = true;
};

// ---- curve tightening -------------------------------------------------------

struct CurveNode {
    bool pivot = false;
    // crossing: from `tri` through `side` at parameter u in (0,1)
    int tri = -1, side = -1;
    double u = 0;
    // pivot: vertex class with entry/exit corner occurrences
    int vclass = -1;
    int etri = -1, ecorner = -1;  // incoming segment lives in etri
    int xtri = -1, xcorner = -1;  // outgoing segment lives in xtri
};

struct PiecewiseCurve {
    std::vector<CurveNode> nodes;
    bool closed = true;
};

struct TightenResult {
    PiecewiseCurve curve;
    double length = 0;
    bool trivial = false;  // collapsed below kEpsGlue
    CurvePath path;        // geometric realization
};

// Iterative shortening to a local geodesic in the homotopy class.  Corners at
// Sigma vertices are kept when both wedge angles are >= pi.
TightenResult tighten_curve(const TriSurface& ts, const PiecewiseCurve& c,
                            bool marked_as_singular = true, int max_sweeps = 10000);

// Convert a chart-level curve to its crossing word + vertex pivots.
PiecewiseCurve to_piecewise(const TriSurface& ts, const CurvePath& path,
                            bool marked_as_singular = true);

TightenResult tighten_curve(const FlatSurface& s, const CurvePath& path,
                            bool marked_as_singular = true);

CurvePath realize_path(const TriSurface& ts, const PiecewiseCurve& c);

}  // namespace flatsurf

#endif
