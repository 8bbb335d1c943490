#include "flatsurf/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <queue>

namespace flatsurf {

namespace {

// Ear clipping of one simple CCW polygon.  Returns triangles as triples of
// vertex indices.  Straight (angle pi) vertices are legal; they are simply
// never ears.  Throws DegeneratePolygon when no ear exists.
std::vector<std::array<int, 3>> ear_clip(const Polygon& poly) {
    int n = poly.size();
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<std::array<int, 3>> out;

    double scale = 0.0;
    for (const auto& v : poly.vertices) scale = std::max(scale, std::abs(v.x) + std::abs(v.y));
    double eps = 1e-12 * std::max(1.0, scale * scale);

    while (idx.size() > 3) {
        int m = static_cast<int>(idx.size());
        int best = -1;
        double best_quality = -1.0;
        for (int i = 0; i < m; ++i) {
            const Vec2& a = poly.vertices[idx[(i + m - 1) % m]];
            const Vec2& b = poly.vertices[idx[i]];
            const Vec2& c = poly.vertices[idx[(i + 1) % m]];
            double cr = cross(b - a, c - b);
            if (cr <= eps) continue;  // reflex or straight corner
            bool blocked = false;
            for (int j = 0; j < m && !blocked; ++j) {
                if (j == i || j == (i + m - 1) % m || j == (i + 1) % m) continue;
                const Vec2& p = poly.vertices[idx[j]];
                if (point_in_triangle(p, a, b, c, 0.0) ||
                    point_segment_distance(p, a, c) < 1e-12 * std::max(1.0, scale))
                    blocked = true;
            }
            if (blocked) continue;
            // prefer fat ears
            double l1 = (b - a).norm(), l2 = (c - b).norm(), l3 = (a - c).norm();
            double quality = cr / (l1 * l1 + l2 * l2 + l3 * l3);
            if (quality > best_quality) {
                best_quality = quality;
                best = i;
            }
        }
        if (best < 0)
            throw Error(ErrorCode::DegeneratePolygon,
                        "polygon " + poly.id + " has no clippable ear");
        int m2 = static_cast<int>(idx.size());
        out.push_back({idx[(best + m2 - 1) % m2], idx[best], idx[(best + 1) % m2]});
        idx.erase(idx.begin() + best);
    }
    out.push_back({idx[0], idx[1], idx[2]});
    // final triangle must be nondegenerate
    const auto& t = out.back();
    if (cross(poly.vertices[t[1]] - poly.vertices[t[0]],
              poly.vertices[t[2]] - poly.vertices[t[0]]) <= eps)
        throw Error(ErrorCode::DegeneratePolygon, "polygon " + poly.id + " leaves a degenerate final triangle");
    return out;
}

}  // namespace

TriSurface::TriSurface(const FlatSurface& s) {
    require_valid(s);
    auto cones = cone_points(s);
    classes.resize(cones.size());
    std::map<CornerRef, int> corner_class;
    for (size_t ci = 0; ci < cones.size(); ++ci) {
        classes[ci] = {cones[ci].angle, cones[ci].order_k, cones[ci].marked};
        for (const auto& c : cones[ci].corners) corner_class[c] = static_cast<int>(ci);
    }

    // triangulate each polygon; remember which triangle side carries each
    // original polygon edge
    std::map<EdgeRef, SideRef> boundary_side;
    for (size_t pi = 0; pi < s.polygons.size(); ++pi) {
        const Polygon& poly = s.polygons[pi];
        src_ids.push_back(poly.id);
        int n = poly.size();
        auto tri_idx = ear_clip(poly);

        // map of directed vertex pairs to (tri, side) for diagonal pairing
        std::map<std::pair<int, int>, SideRef> open_diag;
        for (const auto& tv : tri_idx) {
            Triangle t;
            int ti = static_cast<int>(tris.size());
            for (int k = 0; k < 3; ++k) {
                t.v[k] = poly.vertices[tv[k]];
                t.vclass[k] = corner_class.at({poly.id, tv[k]});
            }
            t.src_polygon = static_cast<int>(pi);
            tris.push_back(t);
            for (int k = 0; k < 3; ++k) {
                int u = tv[k], w = tv[(k + 1) % 3];
                if ((u + 1) % n == w) {
                    boundary_side[{poly.id, u}] = {ti, k};  // original edge u
                } else {
                    auto rev = open_diag.find({w, u});
                    if (rev != open_diag.end()) {
                        SideRef other = rev->second;
                        tris[ti].opp[k] = other;
                        tris[other.tri].opp[other.side] = {ti, k};
                        // same chart, opposite directed segments: translation
                        tris[ti].flip[k] = false;
                        tris[other.tri].flip[other.side] = false;
                        open_diag.erase(rev);
                    } else {
                        open_diag[{u, w}] = {ti, k};
                    }
                }
            }
        }
    }

    all_translations = true;
    for (const auto& g : s.gluings) {
        SideRef sa = boundary_side.at(g.a);
        SideRef sb = boundary_side.at(g.b);
        bool f = g.kind == GluingKind::Flip;
        if (f) all_translations = false;
        tris[sa.tri].opp[sa.side] = sb;
        tris[sb.tri].opp[sb.side] = sa;
        tris[sa.tri].flip[sa.side] = f;
        tris[sb.tri].flip[sb.side] = f;
    }
}

double TriSurface::area() const {
    double a = 0.0;
    for (const auto& t : tris) a += t.area();
    return a;
}

Transition TriSurface::transition_into(int t, int s) const {
    SideRef o = tris[t].opp[s];
    Vec2 a = tris[t].side_start(s);
    Vec2 b_end = tris[o.tri].side_end(o.side);
    if (tris[t].flip[s]) return {-1.0, a + b_end};
    return {1.0, a - b_end};
}

bool TriSurface::edge_delaunay(int t, int s) const {
    SideRef o = tris[t].opp[s];
    Transition phi = transition_into(t, s);
    Vec2 r = phi.apply(tris[o.tri].v[(o.side + 2) % 3]);
    const Triangle& T = tris[t];
    double det = incircle(T.v[0], T.v[1], T.v[2], r);
    double scale = std::max({(T.v[1] - T.v[0]).norm(), (T.v[2] - T.v[1]).norm(),
                             (T.v[0] - T.v[2]).norm(), (r - T.v[0]).norm()});
    double s4 = scale * scale * scale * scale;
    return det <= kEpsDelaunay * s4;
}

bool TriSurface::flip_edge(int t1, int s1) {
    SideRef o = tris[t1].opp[s1];
    int t2 = o.tri, s2 = o.side;
    if (t1 == t2) return false;  // self-glued: quad immerses non-injectively

    Transition phi = transition_into(t1, s1);
    bool fl = tris[t1].flip[s1];

    Vec2 p0 = tris[t1].v[s1];
    Vec2 p1 = tris[t1].v[(s1 + 1) % 3];
    Vec2 p2 = tris[t1].v[(s1 + 2) % 3];
    Vec2 r = phi.apply(tris[t2].v[(s2 + 2) % 3]);

    // both new triangles must be strictly CCW
    if (cross(p0 - p2, r - p2) <= 0) return false;
    if (cross(p1 - r, p2 - r) <= 0) return false;

    int c_p0 = tris[t1].vclass[s1];
    int c_p1 = tris[t1].vclass[(s1 + 1) % 3];
    int c_p2 = tris[t1].vclass[(s1 + 2) % 3];
    int c_r = tris[t2].vclass[(s2 + 2) % 3];

    // outer slots and their rewiring targets; Y slots change chart by phi
    struct Outer {
        SideRef old_slot;
        SideRef new_slot;
        bool chart_changed;
        SideRef old_partner;
        bool old_flip;
    };
    std::array<Outer, 4> outer = {{
        {{t1, (s1 + 1) % 3}, {t2, 1}, false, tris[t1].opp[(s1 + 1) % 3], tris[t1].flip[(s1 + 1) % 3]},
        {{t1, (s1 + 2) % 3}, {t1, 0}, false, tris[t1].opp[(s1 + 2) % 3], tris[t1].flip[(s1 + 2) % 3]},
        {{t2, (s2 + 1) % 3}, {t1, 1}, true, tris[t2].opp[(s2 + 1) % 3], tris[t2].flip[(s2 + 1) % 3]},
        {{t2, (s2 + 2) % 3}, {t2, 0}, true, tris[t2].opp[(s2 + 2) % 3], tris[t2].flip[(s2 + 2) % 3]},
    }};

    int src1 = tris[t1].src_polygon;
    tris[t1].v = {p2, p0, r};
    tris[t1].vclass = {c_p2, c_p0, c_r};
    tris[t1].src_polygon = src1;
    tris[t2].v = {r, p1, p2};
    tris[t2].vclass = {c_r, c_p1, c_p2};
    tris[t2].src_polygon = src1;

    // new diagonal: (t1, side 2) r->p2 vs (t2, side 2) p2->r, same chart
    tris[t1].opp[2] = {t2, 2};
    tris[t2].opp[2] = {t1, 2};
    tris[t1].flip[2] = false;
    tris[t2].flip[2] = false;

    auto find_outer = [&](const SideRef& slot) -> int {
        for (int i = 0; i < 4; ++i)
            if (outer[i].old_slot == slot) return i;
        return -1;
    };
    for (int i = 0; i < 4; ++i) {
        int j = find_outer(outer[i].old_partner);
        SideRef target = j >= 0 ? outer[j].new_slot : outer[i].old_partner;
        bool xor_other = j >= 0 ? (outer[j].chart_changed && fl) : false;
        bool kind = outer[i].old_flip ^ (outer[i].chart_changed && fl) ^ xor_other;
        tris[outer[i].new_slot.tri].opp[outer[i].new_slot.side] = target;
        tris[outer[i].new_slot.tri].flip[outer[i].new_slot.side] = kind;
        if (j < 0) {
            tris[target.tri].opp[target.side] = outer[i].new_slot;
            tris[target.tri].flip[target.side] = kind;
        }
    }
    return true;
}

int TriSurface::make_delaunay(int flip_cap) {
    int flips = 0;
    std::deque<SideRef> queue;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
        for (int s = 0; s < 3; ++s) queue.push_back({t, s});

    while (!queue.empty()) {
        SideRef e = queue.front();
        queue.pop_front();
        if (edge_delaunay(e.tri, e.side)) continue;
        if (!flip_edge(e.tri, e.side)) continue;
        if (++flips > flip_cap)
            throw Error(ErrorCode::FlipLimitExceeded,
                        "more than " + std::to_string(flip_cap) + " Delaunay flips");
        int t1 = e.tri, t2 = tris[e.tri].opp[e.side].tri;
        for (int s = 0; s < 3; ++s) {
            queue.push_back({t1, s});
            queue.push_back({t2, s});
        }
    }
    return flips;
}

void TriSurface::apply_linear(const Mat2& m) {
    for (auto& t : tris)
        for (auto& v : t.v) v = m.apply(v);
}

FlatSurface TriSurface::to_flat_surface() const {
    FlatSurface out;
    for (size_t i = 0; i < tris.size(); ++i) {
        Polygon p;
        p.id = "t" + std::to_string(i);
        p.vertices = {tris[i].v[0], tris[i].v[1], tris[i].v[2]};
        out.polygons.push_back(std::move(p));
    }
    std::set<std::pair<int, int>> done;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
        for (int s = 0; s < 3; ++s) {
            SideRef o = tris[t].opp[s];
            int key1 = t * 3 + s, key2 = o.tri * 3 + o.side;
            if (done.count({std::min(key1, key2), std::max(key1, key2)})) continue;
            done.insert({std::min(key1, key2), std::max(key1, key2)});
            out.gluings.push_back({{"t" + std::to_string(t), s},
                                   {"t" + std::to_string(o.tri), o.side},
                                   tris[t].flip[s] ? GluingKind::Flip : GluingKind::Translation});
        }
    // mark one representative corner per marked class
    std::set<int> marked_classes;
    for (size_t ci = 0; ci < classes.size(); ++ci)
        if (classes[ci].marked) marked_classes.insert(static_cast<int>(ci));
    for (int t = 0; t < static_cast<int>(tris.size()) && !marked_classes.empty(); ++t)
        for (int k = 0; k < 3; ++k)
            if (marked_classes.erase(tris[t].vclass[k]))
                out.marked.insert({"t" + std::to_string(t), k});
    return out;
}

TriPoint TriSurface::locate(const std::string& polygon_id, const Vec2& p) const {
    int pi = -1;
    for (size_t i = 0; i < src_ids.size(); ++i)
        if (src_ids[i] == polygon_id) pi = static_cast<int>(i);
    if (pi < 0) throw Error(ErrorCode::PointOffSurface, "no polygon '" + polygon_id + "'");
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        if (tris[t].src_polygon != pi) continue;
        if (point_in_triangle(p, tris[t].v[0], tris[t].v[1], tris[t].v[2], 1e-9))
            return {t, p};
    }
    throw Error(ErrorCode::PointOffSurface, "point outside polygon '" + polygon_id + "'");
}

int TriSurface::vclass_at(const TriPoint& pt, double tol) const {
    for (int k = 0; k < 3; ++k)
        if (dist(tris[pt.tri].v[k], pt.p) <= tol) return tris[pt.tri].vclass[k];
    return -1;
}

double TriSurface::shortest_edge() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : tris)
        for (int s = 0; s < 3; ++s) best = std::min(best, t.side_vec(s).norm());
    return best;
}

double TriSurface::longest_edge() const {
    double best = 0.0;
    for (const auto& t : tris)
        for (int s = 0; s < 3; ++s) best = std::max(best, t.side_vec(s).norm());
    return best;
}

double TriSurface::distance_to_sigma(const TriPoint& start, double cap,
                                     bool marked_as_singular) const {
    // The nearest singular point is reached by a straight developable segment,
    // so a pruned development search from the start point is exact.
    double best = cap;
    struct State {
        int tri;
        Transition dev;  // chart -> developed plane (start point at origin)
        int entry_side;  // -1 for the root
    };
    std::vector<State> stack;
    Transition root{1.0, -start.p};
    stack.push_back({start.tri, root, -1});
    size_t guard = 0;

    while (!stack.empty()) {
        if (++guard > 20000000)
            throw Error(ErrorCode::SearchBudgetExceeded, "distance query exceeded node cap");
        State st = stack.back();
        stack.pop_back();
        const Triangle& T = tris[st.tri];
        for (int k = 0; k < 3; ++k) {
            if (classes[T.vclass[k]].in_sigma(marked_as_singular))
                best = std::min(best, st.dev.apply(T.v[k]).norm());
        }
        for (int s = 0; s < 3; ++s) {
            if (s == st.entry_side) continue;
            Vec2 a = st.dev.apply(T.side_start(s));
            Vec2 b = st.dev.apply(T.side_end(s));
            if (st.entry_side >= 0) {
                // a straight segment from the origin can only exit through a
                // side whose line keeps the origin on the interior (left) side
                double c = cross(b - a, Vec2{0, 0} - a);
                if (c < -1e-12 * (b - a).norm() * (a.norm() + 1.0)) continue;
            }
            if (point_segment_distance({0, 0}, a, b) >= best) continue;
            SideRef o = T.opp[s];
            Transition step = transition_into(st.tri, s);
            stack.push_back({o.tri, st.dev.compose(step), o.side});
        }
    }
    return best;
}

FlatSurface triangulate(const FlatSurface& s) {
    return TriSurface(s).to_flat_surface();
}

std::pair<FlatSurface, int> delaunay_normalize(const FlatSurface& s, int flip_cap) {
    TriSurface ts(s);
    int flips = ts.make_delaunay(flip_cap);
    return {ts.to_flat_surface(), flips};
}

}  // namespace flatsurf
