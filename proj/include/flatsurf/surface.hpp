#ifndef FLATSURF_SURFACE_HPP
#define FLATSURF_SURFACE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "flatsurf/errors.hpp"
#include "flatsurf/geom.hpp"

namespace flatsurf {

// Tolerances used throughout the kernel.
inline constexpr double kEpsGlue = 1e-9;      // gluing vector relations
inline constexpr double kEpsAngle = 1e-7;     // cone angle vs multiple of pi
inline constexpr double kEpsDelaunay = 1e-9;  // circumdisk margin
inline constexpr double kEpsDet = 1e-12;      // singular matrix threshold
inline constexpr double kEpsHit = 1e-9;       // cone point hit tolerance
inline constexpr double kPi = 3.14159265358979323846;

struct Polygon {
    std::string id;
    std::vector<Vec2> vertices;  // CCW

    int size() const { return static_cast<int>(vertices.size()); }
    // Edge i runs vertex i -> vertex i+1 (mod n).
    Vec2 edge_vector(int i) const {
        int n = size();
        return vertices[(i + 1) % n] - vertices[i];
    }
    double area() const { return signed_area(vertices.begin(), vertices.end()); }
};

struct EdgeRef {
    std::string polygon;
    int edge = 0;

    bool operator==(const EdgeRef& o) const { return polygon == o.polygon && edge == o.edge; }
    bool operator<(const EdgeRef& o) const {
        return polygon != o.polygon ? polygon < o.polygon : edge < o.edge;
    }
};

enum class GluingKind { Translation, Flip };

struct Gluing {
    EdgeRef a, b;
    GluingKind kind = GluingKind::Translation;
};

struct CornerRef {
    std::string polygon;
    int vertex = 0;

    bool operator==(const CornerRef& o) const { return polygon == o.polygon && vertex == o.vertex; }
    bool operator<(const CornerRef& o) const {
        return polygon != o.polygon ? polygon < o.polygon : vertex < o.vertex;
    }
};

// A flat surface presented by Euclidean polygons with edge gluings.
// Immutable in practice: operations return new values.
struct FlatSurface {
    std::vector<Polygon> polygons;
    std::vector<Gluing> gluings;
    std::set<CornerRef> marked;
    bool allow_disconnected = false;  // set for disjoint cover total spaces

    const Polygon* find_polygon(const std::string& id) const;
    int polygon_index(const std::string& id) const;  // -1 when missing
};

struct Violation {
    std::string location;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

// Vertex class of the glued complex with its cone data.
struct ConePoint {
    std::vector<CornerRef> corners;  // the identified (polygon, vertex) pairs
    double angle = 0.0;              // radians
    int order_k = 0;                 // angle == (k+2)*pi
    bool marked = false;

    bool is_singular() const { return order_k != 0; }
    // Whether the class counts as part of Sigma under the given convention.
    bool in_sigma(bool marked_as_singular) const {
        return order_k != 0 || (marked && marked_as_singular);
    }
};

// Reports every violated invariant; empty report means valid.
ValidationReport validate(const FlatSurface& s);

// Throws InvalidSurface listing the first violations when validate() is nonempty.
void require_valid(const FlatSurface& s);

// Vertex classes as orbits of the corner identification relation, with angles.
// Throws AngleNotMultipleOfPi when a class angle is not within kEpsAngle of
// an integer multiple of pi.
std::vector<ConePoint> cone_points(const FlatSurface& s);

double area(const FlatSurface& s);

// Linear action on all vertex coordinates.  det(m) < 0 reverses orientation;
// vertex orders are then reversed and gluing edge indices remapped so the
// output is again CCW.  Throws SingularMatrix when |det m| < kEpsDet.
FlatSurface apply_matrix(const FlatSurface& s, const Mat2& m);

// V - E + F of the glued complex.
int euler_characteristic(const FlatSurface& s);

// sum of order_k over all classes (Gauss-Bonnet partner of -2*chi).
int total_order(const FlatSurface& s);

namespace detail {
// Corner walk primitive shared with the triangulation: the next corner CCW
// around the vertex class, crossing the outgoing edge of (polygon, vertex).
CornerRef next_corner_around_vertex(const FlatSurface& s,
                                    const std::map<EdgeRef, EdgeRef>& partner,
                                    const CornerRef& c);
std::map<EdgeRef, EdgeRef> partner_map(const FlatSurface& s);
}  // namespace detail

}  // namespace flatsurf

#endif
