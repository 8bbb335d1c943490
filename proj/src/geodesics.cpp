#include "flatsurf/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace flatsurf {

namespace {

CurvePath reconstruct_path(const TriSurface& ts, const std::vector<struct DevState>& arena,
                           int state_idx, const Vec2& hol, int root_tri,
                           const Transition& root_dev);

struct DevState {
    int tri;
    Transition dev;  // chart -> developed plane
    int entry_side;  // side of `tri` entered through
    Vec2 lo, hi;     // direction wedge [lo, hi), subtending < pi
    int parent;      // arena index, -1 at a root (BFS/path mode only)
    int depth;       // ancestors on the DFS path (stack mode only)
};

CurvePath reconstruct_path(const TriSurface& ts, const std::vector<DevState>& arena,
                           int state_idx, const Vec2& hol, int root_tri,
                           const Transition& root_dev) {
    std::vector<const DevState*> chain;
    for (int i = state_idx; i >= 0; i = arena[i].parent) chain.push_back(&arena[i]);
    std::reverse(chain.begin(), chain.end());

    CurvePath path;
    Vec2 prev_dev{0, 0};
    int prev_tri = root_tri;
    Transition prev_inv = root_dev.inverse();
    for (const DevState* st : chain) {
        Vec2 A = st->dev.apply(ts.tris[st->tri].side_start(st->entry_side));
        Vec2 B = st->dev.apply(ts.tris[st->tri].side_end(st->entry_side));
        double s, t;
        Vec2 cross_pt = A;
        if (segment_intersect({0, 0}, hol, A, B, s, t, 1e-15)) cross_pt = s * hol;
        path.segs.push_back({ts.src_ids[ts.tris[prev_tri].src_polygon],
                             prev_inv.apply(prev_dev), prev_inv.apply(cross_pt)});
        prev_dev = cross_pt;
        prev_tri = st->tri;
        prev_inv = st->dev.inverse();
    }
    path.segs.push_back({ts.src_ids[ts.tris[prev_tri].src_polygon], prev_inv.apply(prev_dev),
                         prev_inv.apply(hol)});
    return path;
}

}  // namespace

namespace {

void enumerate_impl(const TriSurface& ts, double L, const EnumOptions& opts,
                    const std::function<void(SaddleConnection&&)>& sink) {
    if (!(L > 0)) return;
    std::vector<bool> target(ts.classes.size());
    bool any = false;
    for (size_t i = 0; i < ts.classes.size(); ++i) {
        target[i] = opts.all_vertices_as_targets || ts.classes[i].in_sigma(opts.marked_as_singular);
        any = any || target[i];
    }
    if (!any) return;

    double Ltol = L * (1 + 1e-12) + 1e-15;
    // conservative test: does a segment's bounding box meet the hyperbolic
    // candidate region?  (the region is star-shaped, so pruning is sound)
    auto region_meets = [&](const Vec2& A, const Vec2& B) {
        if (!opts.hyperbolic_region) return true;
        double xlo = std::min(A.x, B.x), xhi = std::max(A.x, B.x);
        double ylo = std::min(A.y, B.y), yhi = std::max(A.y, B.y);
        double minx = xlo > 0 ? xlo : (xhi < 0 ? -xhi : 0.0);
        double miny = ylo > 0 ? ylo : (yhi < 0 ? -yhi : 0.0);
        double tol = 1e-9;
        return minx <= opts.x_max + tol && miny <= opts.y_max + tol &&
               minx * miny <= opts.xy_max * (1 + 1e-12) + tol;
    };
    auto region_has = [&](const Vec2& v) {
        if (!opts.hyperbolic_region) return true;
        double tol = 1e-9;
        return std::abs(v.x) <= opts.x_max + tol && std::abs(v.y) <= opts.y_max + tol &&
               std::abs(v.x * v.y) <= opts.xy_max * (1 + 1e-12) + tol;
    };
    std::vector<DevState> arena;
    std::vector<std::pair<Vec2, bool>> anc;  // DFS path apexes (position, is target)
    long long nodes = 0;
    const bool stack_mode = !opts.with_paths;  // DFS keeps memory bounded

    for (int t0 = 0; t0 < static_cast<int>(ts.tris.size()); ++t0) {
        for (int c0 = 0; c0 < 3; ++c0) {
            if (!target[ts.tris[t0].vclass[c0]]) continue;
            arena.clear();
            Vec2 origin = ts.tris[t0].v[c0];
            Transition root_dev{1.0, -origin};

            Vec2 lo = root_dev.apply(ts.tris[t0].v[(c0 + 1) % 3]);
            Vec2 hi = root_dev.apply(ts.tris[t0].v[(c0 + 2) % 3]);
            // the corner's own outgoing edge is its lo boundary ray
            if (target[ts.tris[t0].vclass[(c0 + 1) % 3]] && lo.norm() <= Ltol &&
                region_has(lo)) {
                SaddleConnection sc;
                sc.holonomy = lo;
                sc.start_class = ts.tris[t0].vclass[c0];
                sc.end_class = ts.tris[t0].vclass[(c0 + 1) % 3];
                sc.start_tri = t0;
                sc.start_corner = c0;
                if (opts.with_paths)
                    sc.path.segs.push_back({ts.src_ids[ts.tris[t0].src_polygon], origin,
                                            ts.tris[t0].v[(c0 + 1) % 3]});
                sink(std::move(sc));
            }

            anc.clear();
            if (point_segment_distance({0, 0}, lo, hi) <= Ltol && region_meets(lo, hi)) {
                SideRef o = ts.tris[t0].opp[(c0 + 1) % 3];
                Transition step = ts.transition_into(t0, (c0 + 1) % 3);
                arena.push_back({o.tri, root_dev.compose(step), o.side, lo, hi, -1, 0});
            }

            size_t head = 0;
            while (stack_mode ? !arena.empty() : head < arena.size()) {
                size_t cur = stack_mode ? arena.size() - 1 : head++;
                if (++nodes > opts.node_budget)
                    throw Error(ErrorCode::SearchBudgetExceeded,
                                "saddle connection search exceeded node budget");
                DevState st = arena[cur];  // copy: arena may reallocate
                if (stack_mode) {
                    arena.pop_back();
                    anc.resize(st.depth);
                }
                const Triangle& T = ts.tris[st.tri];
                int apex = (st.entry_side + 2) % 3;
                Vec2 C = st.dev.apply(T.v[apex]);
                double cl = cross(st.lo, C);
                double ch = cross(C, st.hi);
                // strictly inside the wedge: rays along the boundary are
                // blocked by the vertex that created the boundary
                if (cl > 0 && ch > 0 && C.norm() <= Ltol && region_has(C) &&
                    target[T.vclass[apex]]) {
                    // a connection grazing an intermediate vertex within
                    // kEpsHit is treated as blocked, matching the tracing rule
                    bool blocked = false;
                    if (stack_mode) {
                        for (const auto& [P, is_target] : anc) {
                            if (!is_target) continue;
                            if (P.norm() < C.norm() - kEpsHit &&
                                point_segment_distance(P, {0, 0}, C) <= kEpsHit) {
                                blocked = true;
                                break;
                            }
                        }
                    } else {
                        for (int up = st.parent; up >= 0 && !blocked;
                             up = arena[up].parent) {
                            const DevState& a = arena[up];
                            const Triangle& AT = ts.tris[a.tri];
                            int aapex = (a.entry_side + 2) % 3;
                            if (!target[AT.vclass[aapex]]) continue;
                            Vec2 P = a.dev.apply(AT.v[aapex]);
                            if (P.norm() < C.norm() - kEpsHit &&
                                point_segment_distance(P, {0, 0}, C) <= kEpsHit)
                                blocked = true;
                        }
                    }
                    int root_lo_cls = ts.tris[t0].vclass[(c0 + 1) % 3];
                    int root_hi_cls = ts.tris[t0].vclass[(c0 + 2) % 3];
                    if (target[root_lo_cls] && lo.norm() < C.norm() - kEpsHit &&
                        point_segment_distance(lo, {0, 0}, C) <= kEpsHit)
                        blocked = true;
                    if (target[root_hi_cls] && hi.norm() < C.norm() - kEpsHit &&
                        point_segment_distance(hi, {0, 0}, C) <= kEpsHit)
                        blocked = true;
                    if (blocked) { /* fall through to children */ }
                    else {
                    SaddleConnection sc;
                    sc.holonomy = C;
                    sc.start_class = ts.tris[t0].vclass[c0];
                    sc.end_class = T.vclass[apex];
                    sc.start_tri = t0;
                    sc.start_corner = c0;
                    if (opts.with_paths)
                        sc.path = reconstruct_path(ts, arena, static_cast<int>(cur), C, t0,
                                                   root_dev);
                    sink(std::move(sc));
                    }
                }
                Vec2 A = st.dev.apply(T.side_start(st.entry_side));
                Vec2 B = st.dev.apply(T.side_end(st.entry_side));
                bool pushed = false;
                if (cl > 0) {  // child window (A,C), wedge [lo, min(C,hi))
                    Vec2 nhi = (ch > 0) ? C : st.hi;
                    int side = (st.entry_side + 1) % 3;
                    if (point_segment_distance({0, 0}, A, C) <= Ltol && region_meets(A, C)) {
                        SideRef o = T.opp[side];
                        arena.push_back({o.tri, st.dev.compose(ts.transition_into(st.tri, side)),
                                         o.side, st.lo, nhi, static_cast<int>(cur),
                                         st.depth + 1});
                        pushed = true;
                    }
                }
                if (ch > 0) {  // child window (C,B), wedge [max(C,lo), hi)
                    Vec2 nlo = (cl > 0) ? C : st.lo;
                    int side = (st.entry_side + 2) % 3;
                    if (point_segment_distance({0, 0}, C, B) <= Ltol && region_meets(C, B)) {
                        SideRef o = T.opp[side];
                        arena.push_back({o.tri, st.dev.compose(ts.transition_into(st.tri, side)),
                                         o.side, nlo, st.hi, static_cast<int>(cur),
                                         st.depth + 1});
                        pushed = true;
                    }
                }
                if (stack_mode && pushed) anc.push_back({C, target[T.vclass[apex]]});
            }
        }
    }
}

}  // namespace

void for_each_saddle_connection(const TriSurface& ts, double L, const EnumOptions& opts,
                                const std::function<void(const SaddleConnection&)>& fn) {
    enumerate_impl(ts, L, opts, [&](SaddleConnection&& sc) { fn(sc); });
}

std::vector<SaddleConnection> enumerate_saddle_connections(const TriSurface& ts, double L,
                                                           const EnumOptions& opts) {
    std::vector<SaddleConnection> out;
    enumerate_impl(ts, L, opts, [&](SaddleConnection&& sc) { out.push_back(std::move(sc)); });
    std::sort(out.begin(), out.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
        if (a.holonomy.norm2() != b.holonomy.norm2())
            return a.holonomy.norm2() < b.holonomy.norm2();
        if (a.holonomy.x != b.holonomy.x) return a.holonomy.x < b.holonomy.x;
        if (a.holonomy.y != b.holonomy.y) return a.holonomy.y < b.holonomy.y;
        if (a.start_tri != b.start_tri) return a.start_tri < b.start_tri;
        return a.start_corner < b.start_corner;
    });
    return out;
}

std::vector<SaddleConnection> enumerate_saddle_connections(const FlatSurface& s, double L,
                                                           const EnumOptions& opts) {
    return enumerate_saddle_connections(TriSurface(s), L, opts);
}

SaddleConnection shortest_saddle_connection(const FlatSurface& s, bool marked_as_singular) {
    TriSurface ts(s);
    bool any = false;
    for (const auto& c : ts.classes) any = any || c.in_sigma(marked_as_singular);
    if (!any) throw Error(ErrorCode::NoConePoints, "surface has no cone or marked points");

    EnumOptions opts;
    opts.marked_as_singular = marked_as_singular;
    double L = ts.shortest_edge();
    for (int round = 0; round < 64; ++round) {
        auto scs = enumerate_saddle_connections(ts, L, opts);
        if (!scs.empty()) return scs.front();
        L *= 2;
    }
    throw Error(ErrorCode::SearchBudgetExceeded, "no saddle connection found");
}

// ---- RayWalker --------------------------------------------------------------

RayWalker::RayWalker(const TriSurface& ts, bool marked_as_singular)
    : ts_(&ts), sigma_marked_(marked_as_singular) {}

RayWalker::RayWalker(const TriSurface& ts, const TriPoint& start, const Vec2& dir,
                     bool marked_as_singular)
    : RayWalker(ts, marked_as_singular) {
    tri_ = start.tri;
    p_ = start.p;
    double n = dir.norm();
    d_ = {dir.x / n, dir.y / n};
    dev_ = Transition{1.0, -start.p};

    // starts at a vertex delegate to the corner-fan search
    for (int k = 0; k < 3; ++k) {
        if (dist(ts.tris[start.tri].v[k], start.p) < 1e-12) {
            *this = from_vertex(ts, start.tri, k, dir, marked_as_singular);
            return;
        }
    }

    // if the start sits on an edge with the ray leaving, hop across
    for (int attempt = 0; attempt < 8; ++attempt) {
        const Triangle& T = ts_->tris[tri_];
        bool moved = false;
        for (int s = 0; s < 3; ++s) {
            Vec2 a = T.side_start(s), b = T.side_end(s);
            if (point_segment_distance(p_, a, b) < 1e-12 && cross(b - a, d_) < -1e-14) {
                SideRef o = T.opp[s];
                Transition phi_inv = ts_->transition_into(tri_, s).inverse();
                p_ = phi_inv.apply(p_);
                d_ = Vec2{phi_inv.sign * d_.x, phi_inv.sign * d_.y};
                dev_ = dev_.compose(phi_inv.inverse());
                tri_ = o.tri;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
}

RayWalker RayWalker::from_vertex(const TriSurface& ts, int tri, int corner, const Vec2& dir,
                                 bool marked_as_singular) {
    double n = dir.norm();
    Vec2 d0{dir.x / n, dir.y / n};
    // two passes: strict half-open wedges, then a tolerant retry for rays
    // that run exactly along a triangulation edge
    for (double eps : {0.0, 1e-9}) {
        Vec2 dcur = d0;
        int t = tri, c = corner;
        std::set<std::tuple<int, int, int>> visited;  // (tri, corner, sign of d)
        for (int count = 0; count < 8192; ++count) {
            int sign_flag = dot(dcur, d0) >= 0 ? 1 : -1;
            if (!visited.insert({t, c, sign_flag}).second) break;  // full cycle
            const Triangle& T = ts.tris[t];
            Vec2 v = T.v[c];
            Vec2 e1 = T.v[(c + 1) % 3] - v;
            Vec2 e2 = T.v[(c + 2) % 3] - v;
            double c1 = cross(e1, dcur) / e1.norm();
            double c2 = cross(dcur, e2) / e2.norm();
            if (c1 >= -eps && c2 > -eps) {
                RayWalker w(ts, marked_as_singular);
                w.tri_ = t;
                w.p_ = v;
                w.d_ = dcur;
                w.dev_ = Transition{1.0, -v};
                w.start_tri = t;
                w.start_corner = c;
                return w;
            }
            SideRef o = ts.tris[t].opp[(c + 2) % 3];
            Transition phi_inv = ts.transition_into(t, (c + 2) % 3).inverse();
            dcur = Vec2{phi_inv.sign * dcur.x, phi_inv.sign * dcur.y};
            t = o.tri;
            c = o.side;
        }
    }
    throw Error(ErrorCode::SearchBudgetExceeded, "vertex fan walk did not terminate");
}

bool RayWalker::advance(WalkSeg& out) {
    if (status != WalkStop::None) return false;
    const Triangle& T = ts_->tris[tri_];

    double best_tau = std::numeric_limits<double>::infinity();
    int best_side = -1;
    double best_u = 0;
    for (int s = 0; s < 3; ++s) {
        if (s == entry_side_) continue;
        Vec2 a = T.side_start(s), b = T.side_end(s);
        Vec2 e = b - a;
        double denom = cross(d_, e);
        if (std::abs(denom) < 1e-15) continue;
        double tau = cross(a - p_, e) / denom;
        double u = cross(a - p_, d_) / denom;
        if (tau <= 1e-12 || u < -1e-9 || u > 1 + 1e-9) continue;
        if (tau < best_tau) {
            best_tau = tau;
            best_side = s;
            best_u = u;
        }
    }
    if (best_side < 0) {
        status = WalkStop::Stuck;
        return false;
    }
    Vec2 q = p_ + best_tau * d_;

    // cone-point proximity along this segment
    double hit_tau = std::numeric_limits<double>::infinity();
    int hit_cls = -1, hit_vtx = -1;
    for (int k = 0; k < 3; ++k) {
        if (!ts_->classes[T.vclass[k]].in_sigma(sigma_marked_)) continue;
        Vec2 v = T.v[k];
        double along = dot(v - p_, d_);
        if (along < -kEpsHit) continue;
        if (skip_start_vertex_check_ && dist(v, p_) <= kEpsHit) continue;
        double perp = std::abs(cross(d_, v - p_));
        if (perp <= kEpsHit && along <= best_tau + kEpsHit && along < hit_tau) {
            hit_tau = along;
            hit_cls = T.vclass[k];
            hit_vtx = k;
        }
    }
    if (hit_cls >= 0) {
        Vec2 v = T.v[hit_vtx];
        out.tri = tri_;
        out.a = p_;
        out.b = v;
        out.dev_a = dev_.apply(p_);
        out.dev_b = dev_.apply(v);
        traveled += dist(p_, v);
        status = WalkStop::ConePoint;
        hit_class = hit_cls;
        hit_tri = tri_;
        hit_corner = hit_vtx;
        hit_dev = out.dev_b;
        hit_chart_dir = d_;
        return true;
    }

    out.tri = tri_;
    out.a = p_;
    out.b = q;
    out.dev_a = dev_.apply(p_);
    out.dev_b = dev_.apply(q);
    out.exit_side = best_side;
    out.exit_u = best_u;
    traveled += best_tau;
    skip_start_vertex_check_ = false;

    const double u_tol = 1e-12;
    if (best_u < u_tol || best_u > 1 - u_tol) {
        int vtx = best_u < u_tol ? best_side : (best_side + 1) % 3;
        const VertexClass& cls = ts_->classes[T.vclass[vtx]];
        if (!cls.in_sigma(sigma_marked_) && std::abs(cls.angle - 2 * kPi) < kEpsAngle) {
            // pass straight through the flat vertex
            Vec2 img = dev_.apply(T.v[vtx]);
            Vec2 dev_dir{dev_.sign * d_.x, dev_.sign * d_.y};
            RayWalker cont = from_vertex(*ts_, tri_, vtx, d_, sigma_marked_);
            double sgn = dot(dev_dir, cont.d_) > 0 ? 1.0 : -1.0;
            tri_ = cont.tri_;
            p_ = cont.p_;
            d_ = cont.d_;
            dev_ = Transition{sgn, img - Vec2{sgn * cont.p_.x, sgn * cont.p_.y}};
            entry_side_ = -1;
            skip_start_vertex_check_ = true;
            return true;
        }
        status = WalkStop::ConePoint;
        hit_class = T.vclass[vtx];
        hit_tri = tri_;
        hit_corner = vtx;
        hit_dev = dev_.apply(T.v[vtx]);
        hit_chart_dir = d_;
        return true;
    }

    SideRef o = T.opp[best_side];
    Transition phi_inv = ts_->transition_into(tri_, best_side).inverse();
    p_ = phi_inv.apply(q);
    d_ = Vec2{phi_inv.sign * d_.x, phi_inv.sign * d_.y};
    dev_ = dev_.compose(phi_inv.inverse());
    tri_ = o.tri;
    entry_side_ = o.side;
    return true;
}

// ---- cylinders ---------------------------------------------------------------

namespace {

struct ClosureResult {
    bool closed = false;
    bool cone_hit = false;
    double length = 0;
    int hit_tri = -1, hit_corner = -1;
    Vec2 hit_dev;
    Vec2 hit_chart_dir;
    CurvePath core;
};

// Trace from `start` in direction `dir` until the walk returns to the start
// point with the same direction, hits a cone point, or exceeds the budget.
ClosureResult trace_closure(const TriSurface& ts, const TriPoint& start, const Vec2& dir,
                            double budget, bool marked_as_singular, bool record,
                            double close_tol = 1e-9) {
    ClosureResult res;
    RayWalker w(ts, start, dir, marked_as_singular);
    Vec2 d0 = dir * (1.0 / dir.norm());
    WalkSeg seg;
    double done = 0;
    int guard = 0;
    while (w.advance(seg)) {
        if (++guard > 5000000) break;
        double seg_len = dist(seg.a, seg.b);
        // closure against the start point (ignore the immediate start)
        if (seg.tri == start.tri && seg_len > 0) {
            Vec2 e = seg.b - seg.a;
            Vec2 dchart{e.x / seg_len, e.y / seg_len};
            double along = dot(start.p - seg.a, dchart);
            double perp = std::abs(cross(dchart, start.p - seg.a));
            bool same_dir = dot(dchart, d0) > 0.999999;
            if (same_dir && perp <= close_tol && along >= -close_tol &&
                along <= seg_len + close_tol && done + along > close_tol) {
                res.closed = true;
                res.length = done + along;
                if (record) res.core.segs.push_back({ts.src_ids[ts.tris[seg.tri].src_polygon],
                                                     seg.a, start.p});
                res.core.closed = true;
                return res;
            }
        }
        if (record)
            res.core.segs.push_back({ts.src_ids[ts.tris[seg.tri].src_polygon], seg.a, seg.b});
        done += seg_len;
        if (w.status == WalkStop::ConePoint) {
            res.cone_hit = true;
            res.length = done;
            res.hit_tri = w.hit_tri;
            res.hit_corner = w.hit_corner;
            res.hit_dev = w.hit_dev;
            res.hit_chart_dir = w.hit_chart_dir;
            return res;
        }
        if (done > budget) {
            res.length = done;
            return res;
        }
    }
    res.length = done;
    return res;
}

Vec2 rot90(const Vec2& v) { return {-v.y, v.x}; }

}  // namespace

namespace {

struct BandState {
    int tri;
    Transition dev;
};

struct BandScan {
    double h;                     // first singular offset (or the cap)
    bool bounded = false;         // a singular vertex bounds the band
    std::vector<BandState> states;
    // boundary cone point images at offset h, sorted along the core direction
    struct BVert {
        Vec2 dev;
        int cls;
    };
    std::vector<BVert> boundary;
};

// Develop the band on the `n` side of a closed leaf (running along `u`
// through the origin with period c*u) until the first singular vertex image.
// Offsets are reduced mod the deck translation, so the scan is finite.
BandScan band_scan(const TriSurface& ts, const std::vector<BandState>& chain, const Vec2& u,
                   const Vec2& n, double c, double cap, bool marked_as_singular) {
    BandScan out;
    out.h = cap;
    Vec2 period = c * u;

    auto reduce = [&](Transition t) {
        double along = dot(t.c, u);
        t.c -= std::round(along / c) * period;
        return t;
    };
    std::map<std::pair<int, int>, std::vector<Vec2>> seen;
    std::vector<BandState> stack;
    auto push = [&](int tri, Transition dev) {
        dev = reduce(dev);
        auto key = std::make_pair(tri, dev.sign > 0 ? 1 : -1);
        auto& lst = seen[key];
        for (const auto& o : lst)
            if (dist(o, dev.c) < 1e-9 * (1 + c)) return;
        lst.push_back(dev.c);
        stack.push_back({tri, dev});
    };
    for (const auto& st : chain) push(st.tri, st.dev);

    struct Cand {
        double perp;
        Vec2 dev;
        int cls;
    };
    std::vector<Cand> cands;
    size_t guard = 0;
    while (!stack.empty()) {
        if (++guard > 2000000)
            throw Error(ErrorCode::SearchBudgetExceeded, "cylinder band search exceeded cap");
        BandState st = stack.back();
        stack.pop_back();
        out.states.push_back(st);
        const Triangle& T = ts.tris[st.tri];
        for (int k = 0; k < 3; ++k) {
            Vec2 p = st.dev.apply(T.v[k]);
            double perp = dot(n, p);
            if (perp > 1e-12 && perp <= out.h + 1e-9 &&
                ts.classes[T.vclass[k]].in_sigma(marked_as_singular)) {
                cands.push_back({perp, p, T.vclass[k]});
                if (perp < out.h - 1e-15) {
                    out.h = perp;
                    out.bounded = true;
                }
            }
        }
        for (int sd = 0; sd < 3; ++sd) {
            Vec2 A = st.dev.apply(T.side_start(sd));
            Vec2 B = st.dev.apply(T.side_end(sd));
            double plo = std::min(dot(n, A), dot(n, B));
            double phi = std::max(dot(n, A), dot(n, B));
            if (phi <= 1e-12 || plo >= out.h - 1e-12) continue;
            SideRef o = T.opp[sd];
            push(o.tri, st.dev.compose(ts.transition_into(st.tri, sd)));
        }
    }
    if (out.bounded) {
        std::map<long long, BandScan::BVert> uniq;
        for (const auto& cd : cands) {
            if (cd.perp > out.h + 1e-9) continue;
            double along = dot(u, cd.dev);
            along -= std::floor(along / c + 1e-12) * c;  // reduce to [0, c)
            uniq[llround(along * 1e9)] = {cd.dev, cd.cls};
        }
        for (auto& [k, v] : uniq) out.boundary.push_back(v);
        std::sort(out.boundary.begin(), out.boundary.end(),
                  [&](const BandScan::BVert& a, const BandScan::BVert& b) {
                      double aa = dot(u, a.dev), ab = dot(u, b.dev);
                      aa -= std::floor(aa / c + 1e-12) * c;
                      ab -= std::floor(ab / c + 1e-12) * c;
                      return aa < ab;
                  });
    }
    return out;
}

}  // namespace

std::vector<Cylinder> detect_cylinders_impl(const TriSurface& ts, double L,
                                            bool marked_as_singular, bool all_targets);

std::vector<Cylinder> detect_cylinders(const TriSurface& ts, double L, bool marked_as_singular) {
    return detect_cylinders_impl(ts, L, marked_as_singular, false);
}

std::vector<Cylinder> detect_cylinders_impl(const TriSurface& ts, double L,
                                            bool marked_as_singular, bool all_targets) {
    EnumOptions opts;
    opts.marked_as_singular = marked_as_singular;
    opts.all_vertices_as_targets = all_targets;
    opts.with_paths = true;
    auto scs = enumerate_saddle_connections(ts, L, opts);

    auto canonical_angle = [](const Vec2& v) {
        double a = std::atan2(v.y, v.x);
        if (a < 0) a += kPi;
        if (a >= kPi - 1e-12) a -= kPi;
        return a;
    };
    std::map<long long, std::vector<int>> groups;
    for (size_t i = 0; i < scs.size(); ++i) {
        long long key = llround(canonical_angle(scs[i].holonomy) * 1e9);
        groups[key].push_back(static_cast<int>(i));
    }

    std::vector<Cylinder> out;
    double total_area = ts.area();

    for (auto& [key, idxs] : groups) {
        Vec2 u = scs[idxs[0]].holonomy;
        u = u * (1.0 / u.norm());
        if (u.y < -1e-12 || (std::abs(u.y) <= 1e-12 && u.x < 0)) u = -u;
        Vec2 nl = rot90(u);  // left normal

        // probe points beside each parallel connection's midpoint
        struct Probe {
            bool valid = false;
            TriPoint pt;
        };
        std::vector<std::array<Probe, 2>> probes(idxs.size());
        for (size_t gi = 0; gi < idxs.size(); ++gi) {
            const SaddleConnection& sc = scs[idxs[gi]];
            double half = sc.length() / 2, acc = 0;
            Vec2 mid;
            std::string mid_poly;
            for (const auto& seg : sc.path.segs) {
                double l = dist(seg.a, seg.b);
                if (acc + l >= half || &seg == &sc.path.segs.back()) {
                    double t = l > 0 ? (half - acc) / l : 0;
                    mid = seg.a + t * (seg.b - seg.a);
                    mid_poly = seg.polygon;
                    break;
                }
                acc += l;
            }
            double delta = std::max(1e-9, 1e-7 * sc.length());
            for (int side = 0; side < 2; ++side) {
                Vec2 n = side == 0 ? nl : -nl;
                try {
                    probes[gi][side] = {true, ts.locate(mid_poly, mid + delta * n)};
                } catch (const Error&) {
                }
            }
        }

        std::vector<std::array<bool, 2>> consumed(idxs.size(), {false, false});
        for (size_t gi = 0; gi < idxs.size(); ++gi) {
            for (int side = 0; side < 2; ++side) {
                if (consumed[gi][side] || !probes[gi][side].valid) continue;
                consumed[gi][side] = true;
                TriPoint p0 = probes[gi][side].pt;
                auto det = trace_closure(ts, p0, u, L * (1 + 1e-9) + 1e-3, marked_as_singular,
                                         true);
                if (!det.closed || det.length > L * (1 + 1e-6)) continue;
                double c = det.length;

                // developed chain of the core leaf
                std::vector<BandState> chain;
                {
                    RayWalker w(ts, p0, u, marked_as_singular);
                    WalkSeg sg;
                    double done = 0;
                    while (done < c - 1e-9 && w.advance(sg)) {
                        Vec2 d1 = sg.b - sg.a;
                        Vec2 d2 = sg.dev_b - sg.dev_a;
                        double sign = (dot(d1, d2) >= 0) ? 1.0 : -1.0;
                        Transition dev{sign, sg.dev_a - Vec2{sign * sg.a.x, sign * sg.a.y}};
                        chain.push_back({sg.tri, dev});
                        done += d1.norm();
                        if (w.status != WalkStop::None) break;
                    }
                }
                if (chain.empty()) continue;

                double cap = total_area / c + 1;
                BandScan up = band_scan(ts, chain, u, nl, c, cap, marked_as_singular);
                BandScan dn = band_scan(ts, chain, u, -nl, c, cap, marked_as_singular);

                Cylinder cyl;
                cyl.core_holonomy = u * c;
                cyl.circumference = c;
                cyl.height = std::min(up.h + dn.h, total_area / c);
                cyl.core = det.core;
                for (const BandScan* bs : {&up, &dn}) {
                    if (!bs->bounded) continue;
                    size_t m = bs->boundary.size();
                    for (size_t j = 0; j < m; ++j) {
                        Vec2 from = bs->boundary[j].dev;
                        Vec2 to = j + 1 < m ? bs->boundary[j + 1].dev
                                            : bs->boundary[0].dev + c * u;
                        SaddleConnection bsc;
                        bsc.holonomy = to - from;
                        bsc.start_class = bs->boundary[j].cls;
                        bsc.end_class = bs->boundary[(j + 1) % m].cls;
                        cyl.boundary.push_back(bsc);
                    }
                }

                // consume every parallel probe lying inside this cylinder
                for (size_t gj = 0; gj < idxs.size(); ++gj)
                    for (int s2 = 0; s2 < 2; ++s2) {
                        if (consumed[gj][s2] || !probes[gj][s2].valid) continue;
                        const TriPoint& q = probes[gj][s2].pt;
                        bool inside = false;
                        for (const BandScan* bs : {&up, &dn}) {
                            Vec2 nn = bs == &up ? nl : -nl;
                            double hmax = bs->h;
                            for (const auto& st : bs->states) {
                                if (st.tri != q.tri) continue;
                                double perp = dot(nn, st.dev.apply(q.p));
                                if (perp > -1e-12 && perp < hmax - 1e-12) {
                                    inside = true;
                                    break;
                                }
                            }
                            if (inside) break;
                        }
                        if (inside) consumed[gj][s2] = true;
                    }

                out.push_back(std::move(cyl));
            }
        }
    }
    return out;
}

std::vector<Cylinder> detect_cylinders(const FlatSurface& s, double L, bool marked_as_singular) {
    return detect_cylinders(TriSurface(s), L, marked_as_singular);
}


// ---- systole ------------------------------------------------------------------

namespace {

struct ScWalk {
    std::vector<CurveNode> crossings;
    int end_tri = -1, end_corner = -1;
    bool ok = false;
};

// Re-walk a saddle connection from its start corner, collecting its crossing
// word and the arrival corner occurrence.
ScWalk walk_connection(const TriSurface& ts, const SaddleConnection& sc,
                       bool marked_as_singular) {
    ScWalk out;
    RayWalker w =
        RayWalker::from_vertex(ts, sc.start_tri, sc.start_corner, sc.holonomy, marked_as_singular);
    WalkSeg seg;
    int guard = 0;
    while (w.advance(seg)) {
        if (++guard > 100000) return out;
        if (w.status == WalkStop::ConePoint) {
            out.end_tri = w.hit_tri;
            out.end_corner = w.hit_corner;
            out.ok = true;
            return out;
        }
        if (w.status != WalkStop::None) return out;
        if (seg.exit_side >= 0) {
            CurveNode cn;
            cn.tri = seg.tri;
            cn.side = seg.exit_side;
            cn.u = std::min(1.0, std::max(0.0, seg.exit_u));
            out.crossings.push_back(cn);
        }
        if (w.traveled > sc.length() * (1 + 1e-6) + 1e-6) return out;
    }
    return out;
}

}  // namespace

SystoleEstimate systole_estimate(const TriSurface& ts, int depth, bool marked_as_singular) {
    bool any = false;
    for (const auto& c : ts.classes) any = any || c.in_sigma(marked_as_singular);
    bool anchors_marked = marked_as_singular;
    bool all_targets = false;
    if (!any) {
        // fall back to marked anchors, then to every vertex class: closed
        // geodesics exist on flat unmarked surfaces too
        anchors_marked = true;
        bool any2 = false;
        for (const auto& c : ts.classes) any2 = any2 || c.in_sigma(true);
        if (!any2) all_targets = true;
    }

    EnumOptions opts;
    opts.marked_as_singular = anchors_marked;
    opts.all_vertices_as_targets = all_targets;
    opts.with_paths = true;

    SystoleEstimate best;
    best.value = std::numeric_limits<double>::infinity();

    double L = 2 * ts.shortest_edge();
    for (int round = 0; round < 48; ++round) {
        best.value = std::numeric_limits<double>::infinity();
        best.lower_confidence = false;

        // (i) cylinder cores
        for (const auto& cyl : detect_cylinders_impl(ts, L, anchors_marked, all_targets)) {
            if (cyl.circumference < best.value - 1e-12) {
                best.value = cyl.circumference;
                best.kind = SystoleKind::CylinderCore;
                best.certificate = cyl.core;
            }
        }

        // (ii)+(iii) saddle connection chains through cone points
        auto scs = enumerate_saddle_connections(ts, L, opts);
        if (all_targets) scs.clear();  // flat anchors are not geodesic corners
        std::map<std::pair<int, int>, ScWalk> walks;
        auto get_walk = [&](int idx) -> const ScWalk& {
            auto key = std::make_pair(idx, 0);
            auto it = walks.find(key);
            if (it == walks.end())
                it = walks.emplace(key, walk_connection(ts, scs[idx], anchors_marked)).first;
            return it->second;
        };

        // chains of up to `depth` connections closing up class-wise
        struct Frame {
            std::vector<int> chain;
            double len;
        };
        std::vector<Frame> stack;
        for (size_t i = 0; i < scs.size(); ++i) {
            if (scs[i].length() >= best.value - 1e-12 && scs[i].start_class != scs[i].end_class)
                continue;
            stack.push_back({{static_cast<int>(i)}, scs[i].length()});
        }
        int evals = 0;
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            const SaddleConnection& last = scs[f.chain.back()];
            const SaddleConnection& first = scs[f.chain.front()];
            if (last.end_class == first.start_class && f.len < best.value + 1e-12) {
                // assemble the closed candidate with pivots at the junctions
                PiecewiseCurve pc;
                pc.closed = true;
                bool ok = true;
                size_t k = f.chain.size();
                for (size_t j = 0; j < k && ok; ++j) {
                    const ScWalk& wprev = get_walk(f.chain[(j + k - 1) % k]);
                    const SaddleConnection& cur = scs[f.chain[j]];
                    const ScWalk& wcur = get_walk(f.chain[j]);
                    ok = wprev.ok && wcur.ok;
                    if (!ok) break;
                    CurveNode piv;
                    piv.pivot = true;
                    piv.vclass = cur.start_class;
                    piv.etri = wprev.end_tri;
                    piv.ecorner = wprev.end_corner;
                    piv.xtri = cur.start_tri;
                    piv.xcorner = cur.start_corner;
                    pc.nodes.push_back(piv);
                    pc.nodes.insert(pc.nodes.end(), wcur.crossings.begin(),
                                    wcur.crossings.end());
                }
                if (ok && ++evals < 4000) {
                    try {
                        auto tightened = tighten_curve(ts, pc, marked_as_singular);
                        if (!tightened.trivial && tightened.length < best.value - 1e-12) {
                            best.value = tightened.length;
                            best.kind = f.chain.size() == 1 ? SystoleKind::SingularLoop
                                                            : SystoleKind::Concatenation;
                            best.certificate = tightened.path;
                        }
                    } catch (const Error&) {
                        // keep searching; a failed tightening only drops a candidate
                    }
                }
            }
            if (f.chain.size() < static_cast<size_t>(depth)) {
                for (size_t i = 0; i < scs.size(); ++i) {
                    double nl = f.len + scs[i].length();
                    if (nl >= best.value - 1e-12) continue;
                    if (scs[i].start_class != last.end_class) continue;
                    Frame nf = f;
                    nf.chain.push_back(static_cast<int>(i));
                    nf.len = nl;
                    stack.push_back(std::move(nf));
                }
            }
        }

        if (std::isfinite(best.value) && best.value <= L) {
            best.lower_confidence = true;
            return best;
        }
        L = std::isfinite(best.value) ? best.value * (1 + 1e-9) : 2 * L;
    }
    if (!std::isfinite(best.value))
        throw Error(ErrorCode::SearchBudgetExceeded, "no closed geodesic candidate found");
    return best;
}

SystoleEstimate systole_estimate(const FlatSurface& s, int depth, bool marked_as_singular) {
    return systole_estimate(TriSurface(s), depth, marked_as_singular);
}

}  // namespace flatsurf
