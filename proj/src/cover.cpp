#include "flatsurf/cover.hpp"

#include "flatsurf/format.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace flatsurf {

namespace {

bool graph_connected(const FlatSurface& s) {
    if (s.polygons.empty()) return false;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& g : s.gluings) {
        adj[g.a.polygon].push_back(g.b.polygon);
        adj[g.b.polygon].push_back(g.a.polygon);
    }
    std::set<std::string> seen{s.polygons.front().id};
    std::queue<std::string> q;
    q.push(s.polygons.front().id);
    while (!q.empty()) {
        auto cur = q.front();
        q.pop();
        for (const auto& nb : adj[cur])
            if (seen.insert(nb).second) q.push(nb);
    }
    return seen.size() == s.polygons.size();
}

}  // namespace

CoverData build_double_cover(const FlatSurface& base) {
    require_valid(base);
    CoverData cov;
    cov.base = base;

    for (const auto& cp : cone_points(base))
        if (cp.order_k % 2 != 0) cov.branch_points.push_back(cp);

    FlatSurface total;
    total.allow_disconnected = true;
    for (int sheet = 0; sheet < 2; ++sheet) {
        for (const auto& p : base.polygons) {
            Polygon q;
            q.id = cov.lift_id(p.id, sheet);
            for (const auto& v : p.vertices) q.vertices.push_back(sheet == 0 ? v : -v);
            total.polygons.push_back(std::move(q));
            Transition to_base = sheet == 0 ? Transition{1.0, {0, 0}} : Transition{-1.0, {0, 0}};
            cov.sheet_of[cov.lift_id(p.id, sheet)] = {p.id, sheet, to_base};
            cov.deck[cov.lift_id(p.id, sheet)] = {cov.lift_id(p.id, 1 - sheet),
                                                  Transition{-1.0, {0, 0}}};
        }
    }
    for (const auto& g : base.gluings) {
        if (g.kind == GluingKind::Translation) {
            for (int sheet = 0; sheet < 2; ++sheet)
                total.gluings.push_back({{cov.lift_id(g.a.polygon, sheet), g.a.edge},
                                         {cov.lift_id(g.b.polygon, sheet), g.b.edge},
                                         GluingKind::Translation});
        } else {
            // a flip swaps sheets; with sheet 1 rotated by pi both induced
            // gluings satisfy the translation relation
            total.gluings.push_back({{cov.lift_id(g.a.polygon, 0), g.a.edge},
                                     {cov.lift_id(g.b.polygon, 1), g.b.edge},
                                     GluingKind::Translation});
            total.gluings.push_back({{cov.lift_id(g.a.polygon, 1), g.a.edge},
                                     {cov.lift_id(g.b.polygon, 0), g.b.edge},
                                     GluingKind::Translation});
        }
    }
    for (const auto& c : base.marked)
        for (int sheet = 0; sheet < 2; ++sheet)
            total.marked.insert({cov.lift_id(c.polygon, sheet), c.vertex});

    // ramification points of angle 2pi upstairs stay distinguished
    std::map<CornerRef, bool> base_branch_corner;
    for (const auto& cp : cov.branch_points)
        for (const auto& c : cp.corners) base_branch_corner[c] = true;
    for (const auto& cp : cone_points(total)) {
        if (std::abs(cp.angle - 2 * kPi) > kEpsAngle) continue;
        const CornerRef& c = cp.corners.front();
        const auto& entry = cov.sheet_of.at(c.polygon);
        if (base_branch_corner.count({entry.base_id, c.vertex}))
            total.marked.insert(*std::min_element(cp.corners.begin(), cp.corners.end()));
    }

    cov.total = std::move(total);
    cov.total_connected = graph_connected(cov.total);
    require_valid(cov.total);
    return cov;
}

SurfacePoint CoverData::involution(const SurfacePoint& pt) const {
    auto it = deck.find(pt.polygon);
    if (it == deck.end())
        throw Error(ErrorCode::PointOffSurface, "polygon not on the cover total");
    return {it->second.image_id, it->second.map.apply(pt.p)};
}

SurfacePoint CoverData::project(const SurfacePoint& pt) const {
    auto it = sheet_of.find(pt.polygon);
    if (it == sheet_of.end())
        throw Error(ErrorCode::PointOffSurface, "polygon not on the cover total");
    return {it->second.base_id, it->second.to_base.apply(pt.p)};
}

std::vector<SurfacePoint> CoverData::lift(const SurfacePoint& pt) const {
    const Polygon* p = base.find_polygon(pt.polygon);
    if (!p) throw Error(ErrorCode::PointOffSurface, "polygon not on the base");
    // branch point: the two lifts are the same surface point
    bool branch = false;
    for (const auto& cp : branch_points)
        for (const auto& c : cp.corners)
            if (c.polygon == pt.polygon &&
                dist(base.find_polygon(c.polygon)->vertices[c.vertex], pt.p) <= kEpsHit)
                branch = true;
    std::vector<SurfacePoint> out;
    for (const auto& [tid, entry] : sheet_of) {
        if (entry.base_id != pt.polygon) continue;
        out.push_back({tid, entry.to_base.inverse().apply(pt.p)});
        if (branch) break;
    }
    std::sort(out.begin(), out.end(),
              [](const SurfacePoint& a, const SurfacePoint& b) { return a.polygon < b.polygon; });
    return out;
}

CurvePath CoverData::apply_involution(const CurvePath& path) const {
    CurvePath out;
    out.closed = path.closed;
    for (const auto& seg : path.segs) {
        const auto& d = deck.at(seg.polygon);
        out.segs.push_back({d.image_id, d.map.apply(seg.a), d.map.apply(seg.b)});
    }
    return out;
}

CurvePath CoverData::project_path(const CurvePath& path) const {
    CurvePath out;
    out.closed = path.closed;
    for (const auto& seg : path.segs) {
        const auto& entry = sheet_of.at(seg.polygon);
        out.segs.push_back({entry.base_id, entry.to_base.apply(seg.a),
                            entry.to_base.apply(seg.b)});
    }
    return out;
}

CoverData lattice_double_cover_of_torus() {
    CoverData cov;
    cov.base = gen_torus(0);
    cov.total = gen_torus_cover(2);
    cov.total_connected = true;
    // squares c0 = [0,1]x[0,1], c1 = [1,2]x[0,1]; deck = shift by (1,0)
    cov.sheet_of["c0"] = {"sq", 0, Transition{1.0, {0, 0}}};
    cov.sheet_of["c1"] = {"sq", 1, Transition{1.0, {-1, 0}}};
    cov.deck["c0"] = {"c1", Transition{1.0, {1, 0}}};
    cov.deck["c1"] = {"c0", Transition{1.0, {-1, 0}}};
    return cov;
}

void require_closed_chain(const FlatSurface& s, const CurvePath& path) {
    if (path.segs.empty()) throw Error(ErrorCode::NotClosed, "empty curve");
    auto partner = detail::partner_map(s);
    size_t m = path.segs.size();
    size_t last = path.closed ? m : m - 1;
    for (size_t i = 0; i < last; ++i) {
        const CurveSeg& cur = path.segs[i];
        const CurveSeg& nxt = path.segs[(i + 1) % m];
        if (cur.polygon == nxt.polygon && dist(cur.b, nxt.a) <= kEpsGlue) continue;
        const Polygon* p = s.find_polygon(cur.polygon);
        bool ok = false;
        for (int e = 0; e < p->size() && !ok; ++e) {
            Vec2 A = p->vertices[e], B = p->vertices[(e + 1) % p->size()];
            if (point_segment_distance(cur.b, A, B) > kEpsGlue * 10) continue;
            auto it = partner.find({cur.polygon, e});
            if (it == partner.end() || it->second.polygon != nxt.polygon) continue;
            // map through the gluing: a_start <-> b_end
            const Polygon* q = s.find_polygon(it->second.polygon);
            Vec2 Be = q->vertices[(it->second.edge + 1) % q->size()];
            bool flip = false;
            for (const auto& g : s.gluings)
                if ((g.a == EdgeRef{cur.polygon, e} && g.b == it->second) ||
                    (g.b == EdgeRef{cur.polygon, e} && g.a == it->second))
                    flip = g.kind == GluingKind::Flip;
            Vec2 mapped = flip ? (Vec2{A.x + Be.x, A.y + Be.y} - cur.b)
                               : (cur.b + (Be - A));
            if (dist(mapped, nxt.a) <= kEpsGlue * 10) ok = true;
        }
        if (!ok)
            throw Error(ErrorCode::NotClosed, "segment " + std::to_string(i) +
                                                  " exit does not map to the next entry");
    }
}

CurvePath project_curve(const CoverData& cover, const CurvePath& gamma) {
    if (cover.branched())
        throw Error(ErrorCode::BranchedCover,
                    "curve projection requires an unbranched double cover");
    if (!gamma.closed || gamma.segs.empty())
        throw Error(ErrorCode::NotClosed, "projection needs a closed curve");
    require_closed_chain(cover.total, gamma);

    // arclength bookkeeping
    size_t m = gamma.segs.size();
    std::vector<double> acc(m + 1, 0);
    for (size_t i = 0; i < m; ++i) acc[i + 1] = acc[i] + dist(gamma.segs[i].a, gamma.segs[i].b);
    double total_len = acc[m];

    // simplicity: no transversal self-intersections within any chart
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j) {
            if (gamma.segs[i].polygon != gamma.segs[j].polygon) continue;
            double si, ti;
            if (!segment_intersect(gamma.segs[i].a, gamma.segs[i].b, gamma.segs[j].a,
                                   gamma.segs[j].b, si, ti, 1e-12))
                continue;
            double s_arc = acc[i] + si * (acc[i + 1] - acc[i]);
            double t_arc = acc[j] + ti * (acc[j + 1] - acc[j]);
            double gap = std::min(std::abs(s_arc - t_arc),
                                  total_len - std::abs(s_arc - t_arc));
            if (gap > 1e-7 * std::max(1.0, total_len))
                throw Error(ErrorCode::NotSimple, "curve intersects itself");
        }

    // self-returns of the projection: gamma(s) = iota(gamma(r))
    CurvePath iota = cover.apply_involution(gamma);
    double best_s = std::numeric_limits<double>::infinity();
    double best_r = 0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            if (gamma.segs[i].polygon != iota.segs[j].polygon) continue;
            double si, tj;
            if (!segment_intersect(gamma.segs[i].a, gamma.segs[i].b, iota.segs[j].a,
                                   iota.segs[j].b, si, tj, 1e-12))
                continue;
            double s_arc = acc[i] + si * (acc[i + 1] - acc[i]);
            double r_arc = acc[j] + tj * (acc[j + 1] - acc[j]);
            double lo = std::min(s_arc, r_arc), hi = std::max(s_arc, r_arc);
            if (hi - lo < 1e-9 * std::max(1.0, total_len)) continue;
            if (hi < best_s - 1e-15) {
                best_s = hi;
                best_r = lo;
            }
        }

    if (!std::isfinite(best_s)) return cover.project_path(gamma);  // injective projection

    // restriction of the projection to [r, s]
    CurvePath beta;
    beta.closed = true;
    for (size_t i = 0; i < m; ++i) {
        double seg_lo = acc[i], seg_hi = acc[i + 1];
        double lo = std::max(seg_lo, best_r), hi = std::min(seg_hi, best_s);
        if (hi - lo <= 1e-12) continue;
        double len = seg_hi - seg_lo;
        Vec2 dir = (gamma.segs[i].b - gamma.segs[i].a) * (len > 0 ? 1.0 / len : 0.0);
        Vec2 a = gamma.segs[i].a + (lo - seg_lo) * dir;
        Vec2 b = gamma.segs[i].a + (hi - seg_lo) * dir;
        const auto& entry = cover.sheet_of.at(gamma.segs[i].polygon);
        beta.segs.push_back({entry.base_id, entry.to_base.apply(a), entry.to_base.apply(b)});
    }
    return beta;
}

SystoleComparison verify_systole_comparison(const FlatSurface& total, const FlatSurface& base,
                                            int depth, bool marked_as_singular) {
    SystoleComparison out;
    out.sys_total = systole_estimate(total, depth, marked_as_singular).value;
    out.sys_base = systole_estimate(base, depth, marked_as_singular).value;
    out.ok = out.sys_total >= out.sys_base - 1e-6;
    return out;
}

SystoleComparison verify_systole_comparison(const CoverData& cover, int depth,
                                            bool marked_as_singular) {
    if (cover.branched())
        throw Error(ErrorCode::BranchedCover,
                    "systole comparison requires an unbranched double cover");
    return verify_systole_comparison(cover.total, cover.base, depth, marked_as_singular);
}

}  // namespace flatsurf
