#include "flatsurf/surface.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace flatsurf {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::AngleNotMultipleOfPi: return "AngleNotMultipleOfPi";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
        case ErrorCode::FlipLimitExceeded: return "FlipLimitExceeded";
        case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
        case ErrorCode::NoConePoints: return "NoConePoints";
        case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorCode::IterationLimit: return "IterationLimit";
        case ErrorCode::PointOffSurface: return "PointOffSurface";
        case ErrorCode::BranchedCover: return "BranchedCover";
        case ErrorCode::NotClosed: return "NotClosed";
        case ErrorCode::NotSimple: return "NotSimple";
        case ErrorCode::StartAtConePoint: return "StartAtConePoint";
        case ErrorCode::CylinderDetected: return "CylinderDetected";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownEdge: return "UnknownEdge";
        case ErrorCode::DuplicateGluing: return "DuplicateGluing";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::InvalidSurface: return "InvalidSurface";
    }
    return "UnknownError";
}

const Polygon* FlatSurface::find_polygon(const std::string& id) const {
    for (const auto& p : polygons)
        if (p.id == id) return &p;
    return nullptr;
}

int FlatSurface::polygon_index(const std::string& id) const {
    for (size_t i = 0; i < polygons.size(); ++i)
        if (polygons[i].id == id) return static_cast<int>(i);
    return -1;
}

namespace {

bool polygon_is_simple(const Polygon& p, std::string& why) {
    int n = p.size();
    for (int i = 0; i < n; ++i) {
        Vec2 a = p.vertices[i], b = p.vertices[(i + 1) % n];
        if (dist(a, b) < 1e-12) {
            why = "zero-length edge " + std::to_string(i);
            return false;
        }
        // spike: the boundary doubles back on itself
        Vec2 u = p.edge_vector(i), w = p.edge_vector((i + 1) % n);
        if (std::abs(cross(u, w)) < 1e-12 * u.norm() * w.norm() && dot(u, w) < 0) {
            why = "spike at vertex " + std::to_string((i + 1) % n);
            return false;
        }
        for (int j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            Vec2 c = p.vertices[j], d = p.vertices[(j + 1) % n];
            double s, t;
            if (segment_intersect(a, b, c, d, s, t, 1e-12)) {
                why = "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect";
                return false;
            }
        }
    }
    return true;
}

}  // namespace

ValidationReport validate(const FlatSurface& s) {
    ValidationReport report;
    auto add = [&](const std::string& loc, const std::string& msg) {
        report.push_back({loc, msg});
    };

    if (s.polygons.empty()) {
        add("surface", "no polygons");
        return report;
    }

    std::set<std::string> ids;
    for (const auto& p : s.polygons) {
        std::string loc = "polygon " + p.id;
        if (p.id.empty() || p.id.find('.') != std::string::npos ||
            p.id.find_first_of(" \t\n") != std::string::npos)
            add(loc, "id must be nonempty without '.' or whitespace");
        if (!ids.insert(p.id).second) add(loc, "duplicate polygon id");
        if (p.size() < 3) {
            add(loc, "fewer than 3 vertices");
            continue;
        }
        bool finite = true;
        for (const auto& v : p.vertices)
            if (!std::isfinite(v.x) || !std::isfinite(v.y)) finite = false;
        if (!finite) {
            add(loc, "non-finite vertex coordinates");
            continue;
        }
        double a = p.area();
        if (a <= 0) add(loc, a < 0 ? "clockwise orientation (negative area)" : "zero area");
        std::string why;
        if (!polygon_is_simple(p, why)) add(loc, "not simple: " + why);
    }
    if (!report.empty()) return report;  // edge checks need sane polygons

    // every edge in exactly one gluing
    std::map<EdgeRef, int> uses;
    for (size_t gi = 0; gi < s.gluings.size(); ++gi) {
        const Gluing& g = s.gluings[gi];
        std::string loc = "gluing " + std::to_string(gi);
        for (const EdgeRef* e : {&g.a, &g.b}) {
            const Polygon* p = s.find_polygon(e->polygon);
            if (!p) {
                add(loc, "unknown polygon " + e->polygon);
                return report;
            }
            if (e->edge < 0 || e->edge >= p->size()) {
                add(loc, "edge index out of range on " + e->polygon);
                return report;
            }
            uses[*e]++;
        }
        if (g.a == g.b) add(loc, "edge glued to itself");
        Vec2 wa = s.find_polygon(g.a.polygon)->edge_vector(g.a.edge);
        Vec2 wb = s.find_polygon(g.b.polygon)->edge_vector(g.b.edge);
        if (g.kind == GluingKind::Translation) {
            if ((wa + wb).norm() > kEpsGlue)
                add(loc, "Translation requires opposite edge vectors");
        } else {
            if ((wa - wb).norm() > kEpsGlue)
                add(loc, "Flip requires equal edge vectors");
        }
    }
    for (const auto& p : s.polygons)
        for (int e = 0; e < p.size(); ++e) {
            int c = uses.count({p.id, e}) ? uses[{p.id, e}] : 0;
            if (c != 1)
                add("polygon " + p.id + " edge " + std::to_string(e),
                    c == 0 ? "edge not glued" : "edge glued more than once");
        }

    for (const auto& c : s.marked) {
        const Polygon* p = s.find_polygon(c.polygon);
        if (!p || c.vertex < 0 || c.vertex >= p->size())
            add("marked " + c.polygon + ".v" + std::to_string(c.vertex), "no such vertex");
    }

    // connectivity over the gluing graph
    if (!s.allow_disconnected && report.empty()) {
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& g : s.gluings) {
            adj[g.a.polygon].push_back(g.b.polygon);
            adj[g.b.polygon].push_back(g.a.polygon);
        }
        std::set<std::string> seen;
        std::queue<std::string> q;
        q.push(s.polygons.front().id);
        seen.insert(s.polygons.front().id);
        while (!q.empty()) {
            std::string cur = q.front();
            q.pop();
            for (const auto& nb : adj[cur])
                if (seen.insert(nb).second) q.push(nb);
        }
        if (seen.size() != s.polygons.size()) add("surface", "not connected");
    }

    if (report.empty()) {
        double total = area(s);
        if (!(total > 0) || !std::isfinite(total)) add("surface", "area not finite and positive");
    }
    return report;
}

void require_valid(const FlatSurface& s) {
    ValidationReport r = validate(s);
    if (r.empty()) return;
    std::ostringstream os;
    os << "invalid surface:";
    for (size_t i = 0; i < r.size() && i < 4; ++i) os << " [" << r[i].location << "] " << r[i].message << ";";
    throw Error(ErrorCode::InvalidSurface, os.str());
}

namespace detail {

std::map<EdgeRef, EdgeRef> partner_map(const FlatSurface& s) {
    std::map<EdgeRef, EdgeRef> m;
    for (const auto& g : s.gluings) {
        m[g.a] = g.b;
        m[g.b] = g.a;
    }
    return m;
}

CornerRef next_corner_around_vertex(const FlatSurface& s,
                                    const std::map<EdgeRef, EdgeRef>& partner,
                                    const CornerRef& c) {
    EdgeRef out{c.polygon, c.vertex};
    EdgeRef p = partner.at(out);
    const Polygon* q = s.find_polygon(p.polygon);
    return {p.polygon, (p.edge + 1) % q->size()};
}

}  // namespace detail

std::vector<ConePoint> cone_points(const FlatSurface& s) {
    auto partner = detail::partner_map(s);
    std::set<CornerRef> visited;
    std::vector<ConePoint> out;

    for (const auto& p : s.polygons) {
        for (int v = 0; v < p.size(); ++v) {
            CornerRef start{p.id, v};
            if (visited.count(start)) continue;
            ConePoint cp;
            CornerRef cur = start;
            do {
                visited.insert(cur);
                cp.corners.push_back(cur);
                const Polygon* poly = s.find_polygon(cur.polygon);
                int n = poly->size();
                cp.angle += interior_angle(poly->vertices[(cur.vertex + n - 1) % n],
                                           poly->vertices[cur.vertex],
                                           poly->vertices[(cur.vertex + 1) % n]);
                if (s.marked.count(cur)) cp.marked = true;
                cur = detail::next_corner_around_vertex(s, partner, cur);
            } while (!(cur == start));

            double m = cp.angle / kPi;
            double mr = std::round(m);
            if (std::abs(m - mr) * kPi > kEpsAngle)
                throw Error(ErrorCode::AngleNotMultipleOfPi,
                            "vertex class at " + cp.corners.front().polygon + ".v" +
                                std::to_string(cp.corners.front().vertex) + " has angle " +
                                std::to_string(cp.angle) + " rad");
            cp.order_k = static_cast<int>(mr) - 2;
            out.push_back(std::move(cp));
        }
    }
    std::sort(out.begin(), out.end(), [](const ConePoint& a, const ConePoint& b) {
        return a.corners.front() < b.corners.front();
    });
    return out;
}

double area(const FlatSurface& s) {
    double total = 0.0;
    for (const auto& p : s.polygons) total += p.area();
    return total;
}

FlatSurface apply_matrix(const FlatSurface& s, const Mat2& m) {
    double det = m.det();
    if (std::abs(det) < kEpsDet)
        throw Error(ErrorCode::SingularMatrix, "matrix determinant below tolerance");

    FlatSurface out = s;
    for (auto& p : out.polygons)
        for (auto& v : p.vertices) v = m.apply(v);

    if (det < 0) {
        // restore CCW orientation: reverse vertex loops, remap edge indices
        std::map<std::string, int> sizes;
        for (auto& p : out.polygons) {
            sizes[p.id] = p.size();
            std::vector<Vec2> rev(p.vertices.size());
            int n = p.size();
            for (int j = 0; j < n; ++j) rev[j] = p.vertices[(n - j) % n];
            p.vertices = std::move(rev);
        }
        for (auto& g : out.gluings) {
            g.a.edge = sizes[g.a.polygon] - 1 - g.a.edge;
            g.b.edge = sizes[g.b.polygon] - 1 - g.b.edge;
        }
        std::set<CornerRef> marked;
        for (const auto& c : out.marked)
            marked.insert({c.polygon, (sizes[c.polygon] - c.vertex) % sizes[c.polygon]});
        out.marked = std::move(marked);
    }
    return out;
}

int euler_characteristic(const FlatSurface& s) {
    int v = static_cast<int>(cone_points(s).size());
    int e = static_cast<int>(s.gluings.size());
    int f = static_cast<int>(s.polygons.size());
    return v - e + f;
}

int total_order(const FlatSurface& s) {
    int k = 0;
    for (const auto& cp : cone_points(s)) k += cp.order_k;
    return k;
}

}  // namespace flatsurf
