#include <algorithm>
#include <cmath>

#include "flatsurf/geodesics.hpp"

// Geodesic tightening of closed curves.  A curve is stored as its cyclic
// crossing word (which edge is crossed, at which parameter) plus pivots at
// vertices.  The word determines the homotopy class; the parameters are the
// shortening variables.  Straightening pulls each maximal crossing run taut
// inside its triangle corridor, snapping to a window vertex when the straight
// segment leaves the corridor; pivots whose wedge angle drops below pi on a
// side are released through the corner fan.

namespace flatsurf {

namespace {

int after_tri(const TriSurface& ts, const CurveNode& n) {
    if (n.pivot) return n.xtri;
    return ts.tris[n.tri].opp[n.side].tri;
}
int before_tri(const TriSurface& ts, const CurveNode& n) { return n.pivot ? n.etri : n.tri; }

// position of the node in the chart of before_tri / after_tri
Vec2 point_before(const TriSurface& ts, const CurveNode& n) {
    if (n.pivot) return ts.tris[n.etri].v[n.ecorner];
    const Triangle& T = ts.tris[n.tri];
    return T.side_start(n.side) + n.u * T.side_vec(n.side);
}
Vec2 point_after(const TriSurface& ts, const CurveNode& n) {
    if (n.pivot) return ts.tris[n.xtri].v[n.xcorner];
    SideRef o = ts.tris[n.tri].opp[n.side];
    const Triangle& T2 = ts.tris[o.tri];
    return T2.side_start(o.side) + (1 - n.u) * T2.side_vec(o.side);
}

double curve_length(const TriSurface& ts, const PiecewiseCurve& c) {
    size_t n = c.nodes.size();
    if (n == 0) return 0;
    double len = 0;
    for (size_t i = 0; i < n; ++i) {
        const CurveNode& cur = c.nodes[i];
        const CurveNode& nxt = c.nodes[(i + 1) % n];
        len += dist(point_after(ts, cur), point_before(ts, nxt));
    }
    return len;
}

double ccw_angle(const Vec2& u, const Vec2& v) {
    double a = std::atan2(cross(u, v), dot(u, v));
    if (a < 0) a += 2 * kPi;
    return a;
}

// Straighten a run of crossings between fixed endpoints.  `a` lives in the
// chart before run.front(), `b` in the chart after run.back().  Returns the
// shortest path in the corridor as crossings plus pivots at window vertices.
std::vector<CurveNode> pull_taut(const TriSurface& ts, Vec2 a, std::vector<CurveNode> run,
                                 Vec2 b, int depth = 0) {
    if (run.empty() || depth > 200) return run;
    size_t k = run.size();
    std::vector<Transition> D(k + 1);
    D[0] = Transition::identity();
    for (size_t i = 0; i < k; ++i)
        D[i + 1] = D[i].compose(ts.transition_into(run[i].tri, run[i].side));
    Vec2 bd = D[k].apply(b);

    // window i endpoints in the common chart
    double worst = -1;
    size_t worst_i = 0;
    bool worst_at_start = false;
    std::vector<double> params(k);
    for (size_t i = 0; i < k; ++i) {
        const Triangle& T = ts.tris[run[i].tri];
        Vec2 A = D[i].apply(T.side_start(run[i].side));
        Vec2 B = D[i].apply(T.side_end(run[i].side));
        double denom = cross(bd - a, B - A);
        double w;
        if (std::abs(denom) < 1e-300)
            w = run[i].u;  // degenerate; keep
        else
            w = cross(bd - a, a - A) / denom;
        params[i] = w;
        double viol = std::max(-w, w - 1.0);
        if (viol > worst) {
            worst = viol;
            worst_i = i;
            worst_at_start = (-w > w - 1.0);
        }
    }
    const double tol = 1e-12;
    if (worst <= tol) {
        for (size_t i = 0; i < k; ++i)
            run[i].u = std::min(1.0 - 1e-15, std::max(1e-15, params[i]));
        return run;
    }

    // snap to the blocking window vertex and recurse on both halves
    const CurveNode& c = run[worst_i];
    const Triangle& T = ts.tris[c.tri];
    int vtx = worst_at_start ? c.side : (c.side + 1) % 3;
    SideRef o = ts.tris[c.tri].opp[c.side];
    int vtx_after = worst_at_start ? (o.side + 1) % 3 : o.side;

    CurveNode piv;
    piv.pivot = true;
    piv.vclass = T.vclass[vtx];
    piv.etri = c.tri;
    piv.ecorner = vtx;
    piv.xtri = o.tri;
    piv.xcorner = vtx_after;

    Vec2 v_before = T.v[vtx];
    Vec2 v_after = ts.tris[o.tri].v[vtx_after];

    std::vector<CurveNode> left(run.begin(), run.begin() + worst_i);
    std::vector<CurveNode> right(run.begin() + worst_i + 1, run.end());
    left = pull_taut(ts, a, std::move(left), v_before, depth + 1);
    right = pull_taut(ts, v_after, std::move(right), b, depth + 1);

    std::vector<CurveNode> out = std::move(left);
    out.push_back(piv);
    out.insert(out.end(), right.begin(), right.end());
    return out;
}

// remove immediately cancelling crossing pairs (cross an edge and come back)
bool remove_backtracks(const TriSurface& ts, PiecewiseCurve& c) {
    bool changed = false;
    bool progress = true;
    while (progress && c.nodes.size() >= 2) {
        progress = false;
        size_t n = c.nodes.size();
        for (size_t i = 0; i < n; ++i) {
            const CurveNode& x = c.nodes[i];
            const CurveNode& y = c.nodes[(i + 1) % n];
            if (x.pivot || y.pivot) continue;
            SideRef o = ts.tris[x.tri].opp[x.side];
            if (o.tri == y.tri && o.side == y.side) {
                size_t j = (i + 1) % n;
                std::vector<CurveNode> keep;
                for (size_t t = 0; t < n; ++t)
                    if (t != i && t != j) keep.push_back(c.nodes[t]);
                c.nodes = std::move(keep);
                changed = true;
                progress = true;
                break;
            }
        }
    }
    return changed;
}

struct FanStep {
    int tri, corner;
};

// CCW fan walk from one corner occurrence of a vertex class to the next.
FanStep fan_next_ccw(const TriSurface& ts, int t, int c) {
    SideRef o = ts.tris[t].opp[(c + 2) % 3];
    return {o.tri, o.side};
}
FanStep fan_next_cw(const TriSurface& ts, int t, int c) {
    SideRef o = ts.tris[t].opp[c];
    return {o.tri, (o.side + 1) % 3};
}

// wedge angle at a pivot, sweeping CCW from the incoming ray to the outgoing
// ray; also reports the crossing sides of the CCW corridor.
double pivot_ccw_angle(const TriSurface& ts, const CurveNode& piv, const Vec2& a, const Vec2& b,
                       std::vector<CurveNode>* corridor) {
    const Triangle& Te = ts.tris[piv.etri];
    Vec2 V = Te.v[piv.ecorner];
    Vec2 da = a - V;
    Vec2 e2 = Te.v[(piv.ecorner + 2) % 3] - V;

    if (corridor) corridor->clear();
    // same-corner shortcut
    if (piv.etri == piv.xtri && piv.ecorner == piv.xcorner) {
        Vec2 db = b - V;
        double direct = ccw_angle(da, db);
        if (direct <= ccw_angle(da, e2) + 1e-14) return direct;
    }
    double total = ccw_angle(da, e2);
    int t = piv.etri, c = piv.ecorner;
    for (int guard = 0; guard < 4096; ++guard) {
        CurveNode cr;
        cr.tri = t;
        cr.side = (c + 2) % 3;
        cr.u = 1.0 - 1e-3;  // near the pivot vertex; pull_taut will move it
        if (corridor) corridor->push_back(cr);
        FanStep nx = fan_next_ccw(ts, t, c);
        t = nx.tri;
        c = nx.corner;
        const Triangle& T = ts.tris[t];
        Vec2 Vc = T.v[c];
        Vec2 e1 = T.v[(c + 1) % 3] - Vc;
        if (t == piv.xtri && c == piv.xcorner) {
            Vec2 db = b - Vc;
            return total + ccw_angle(e1, db);
        }
        Vec2 e2c = T.v[(c + 2) % 3] - Vc;
        total += ccw_angle(e1, e2c);
        if (total > 8 * kPi * 4) break;  // runaway guard
    }
    return std::numeric_limits<double>::infinity();
}

// the CW corridor sides from the pivot (entry corner back around to exit)
void pivot_cw_corridor(const TriSurface& ts, const CurveNode& piv,
                       std::vector<CurveNode>* corridor) {
    corridor->clear();
    int t = piv.etri, c = piv.ecorner;
    for (int guard = 0; guard < 4096; ++guard) {
        CurveNode cr;
        cr.tri = t;
        cr.side = c;  // outgoing edge side of this corner
        cr.u = 1e-3;
        corridor->push_back(cr);
        FanStep nx = fan_next_cw(ts, t, c);
        t = nx.tri;
        c = nx.corner;
        if (t == piv.xtri && c == piv.xcorner) return;
    }
    corridor->clear();
}

}  // namespace


// Straighten one crossing node between its neighbors; returns true when the
// node was snapped to a vertex pivot (written to *snapped).
bool straighten_node(const TriSurface& ts, CurveNode& node, const Vec2& a, const Vec2& b_after,
                     CurveNode* snapped) {
    const Triangle& T = ts.tris[node.tri];
    Transition phi = ts.transition_into(node.tri, node.side);
    Vec2 b = phi.apply(b_after);
    Vec2 A = T.side_start(node.side), B = T.side_end(node.side);
    double denom = cross(b - a, B - A);
    if (std::abs(denom) < 1e-300) return false;
    double w = cross(b - a, a - A) / denom;
    const double tol = 1e-12;
    if (w > tol && w < 1 - tol) {
        node.u = w;
        return false;
    }
    // taut path slides past an endpoint of the edge: snap to that vertex
    bool at_start = w <= tol;
    int vtx = at_start ? node.side : (node.side + 1) % 3;
    SideRef o = ts.tris[node.tri].opp[node.side];
    int vtx_after = at_start ? (o.side + 1) % 3 : o.side;
    CurveNode piv;
    piv.pivot = true;
    piv.vclass = T.vclass[vtx];
    piv.etri = node.tri;
    piv.ecorner = vtx;
    piv.xtri = o.tri;
    piv.xcorner = vtx_after;
    *snapped = piv;
    return true;
}

CurvePath realize_path(const TriSurface& ts, const PiecewiseCurve& c) {
    CurvePath path;
    path.closed = c.closed;
    size_t n = c.nodes.size();
    for (size_t i = 0; i < n; ++i) {
        const CurveNode& cur = c.nodes[i];
        const CurveNode& nxt = c.nodes[(i + 1) % n];
        int tri = after_tri(ts, cur);
        Vec2 p = point_after(ts, cur);
        Vec2 q = point_before(ts, nxt);
        if (dist(p, q) > 1e-300)
            path.segs.push_back({ts.src_ids[ts.tris[tri].src_polygon], p, q});
    }
    return path;
}

TightenResult tighten_curve(const TriSurface& ts, const PiecewiseCurve& input,
                            bool marked_as_singular, int max_sweeps) {
    PiecewiseCurve cur = input;
    if (cur.nodes.empty()) return {cur, 0, true, {}};

    auto pivot_fixed = [&](const CurveNode& piv) {
        // pivots may persist only at Sigma classes
        return ts.classes[piv.vclass].in_sigma(marked_as_singular);
    };

    double len = curve_length(ts, cur);
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        remove_backtracks(ts, cur);
        if (cur.nodes.empty()) return {cur, 0, true, {}};

        // --- straighten every crossing locally --------------------------------
        size_t n = cur.nodes.size();
        for (size_t i = 0; i < n; ++i) {
            if (cur.nodes[i].pivot) continue;
            size_t ip = (i + n - 1) % n, in2 = (i + 1) % n;
            if (ip == i) break;
            Vec2 a = point_after(ts, cur.nodes[ip]);
            Vec2 b = point_before(ts, cur.nodes[in2]);
            CurveNode snapped;
            if (straighten_node(ts, cur.nodes[i], a, b, &snapped)) {
                cur.nodes[i] = snapped;
            }
            n = cur.nodes.size();
        }
        double next_len = curve_length(ts, cur);

        // --- release pivots whose wedge angle is < pi ------------------------
        bool slid = false;
        n = cur.nodes.size();
        for (size_t i = 0; i < n && !slid; ++i) {
            CurveNode& piv = cur.nodes[i];
            if (!piv.pivot) continue;
            size_t prev = (i + n - 1) % n;
            size_t nxt = (i + 1) % n;
            if (prev == i) break;  // single pivot, nothing to do
            Vec2 a = point_after(ts, cur.nodes[prev]);
            Vec2 b = point_before(ts, cur.nodes[nxt]);
            std::vector<CurveNode> ccw_corr;
            double th_ccw = pivot_ccw_angle(ts, piv, a, b, &ccw_corr);
            double theta_total = ts.classes[piv.vclass].angle;
            double th_cw = theta_total - th_ccw;
            bool force_release = !pivot_fixed(piv) && th_ccw > 1e-9 && th_cw > 1e-9;
            std::vector<CurveNode> replacement;
            bool replace = false;
            if (th_ccw < kPi - 1e-11 && th_ccw > 1e-12) {
                replacement = pull_taut(ts, a, ccw_corr, b);
                replace = true;
            } else if (th_cw < kPi - 1e-11 && th_cw > 1e-12) {
                std::vector<CurveNode> cw_corr;
                pivot_cw_corridor(ts, piv, &cw_corr);
                if (!cw_corr.empty()) {
                    replacement = pull_taut(ts, a, cw_corr, b);
                    replace = true;
                }
            } else if (force_release && std::abs(th_ccw - kPi) <= 1e-9) {
                // flat pass-through at a non-Sigma vertex: keep but cost 0
                replace = false;
            }
            if (replace) {
                PiecewiseCurve cand;
                cand.closed = cur.closed;
                for (size_t t2 = 0; t2 < n; ++t2) {
                    if (t2 == i) {
                        cand.nodes.insert(cand.nodes.end(), replacement.begin(),
                                          replacement.end());
                    } else {
                        cand.nodes.push_back(cur.nodes[t2]);
                    }
                }
                double cand_len = curve_length(ts, cand);
                if (cand_len <= next_len + 1e-12) {
                    cur = std::move(cand);
                    next_len = cand_len;
                    slid = true;
                }
            }
        }

        if (!slid && len - next_len < 1e-10 && sweep > 2) {
            len = next_len;
            break;
        }
        len = next_len;
        if (cur.nodes.empty()) return {cur, 0, true, {}};
    }
    if (sweep >= max_sweeps)
        throw Error(ErrorCode::IterationLimit, "curve tightening did not converge");

    TightenResult res;
    res.curve = cur;
    res.length = len;
    res.trivial = len < kEpsGlue;
    res.path = realize_path(ts, cur);
    return res;
}

PiecewiseCurve to_piecewise(const TriSurface& ts, const CurvePath& path,
                            bool marked_as_singular) {
    PiecewiseCurve out;
    out.closed = path.closed;
    size_t m = path.segs.size();
    for (size_t si = 0; si < m; ++si) {
        const CurveSeg& seg = path.segs[si];
        Vec2 d = seg.b - seg.a;
        double len = d.norm();
        if (len < 1e-12) continue;
        TriPoint start = ts.locate(seg.polygon, seg.a);
        RayWalker w(ts, start, d, true);
        WalkSeg ws;
        double done = 0;
        int last_tri = start.tri;
        Vec2 last_pt = seg.a;
        while (done < len - 1e-9 && w.advance(ws)) {
            double l = dist(ws.a, ws.b);
            last_tri = ws.tri;
            if (done + l >= len - 1e-9) {
                last_pt = ws.a + ((len - done) / std::max(l, 1e-300)) * (ws.b - ws.a);
                done = len;
                break;
            }
            done += l;
            last_pt = ws.b;
            if (w.status != WalkStop::None) break;
            if (ws.exit_side >= 0) {
                CurveNode cn;
                cn.tri = ws.tri;
                cn.side = ws.exit_side;
                cn.u = std::min(1.0, std::max(0.0, ws.exit_u));
                out.nodes.push_back(cn);
            }
        }
        if (w.status == WalkStop::ConePoint && done < len - 1e-9)
            throw Error(ErrorCode::NotSimple, "curve runs into a cone point");

        // junction with the next segment: record the gluing crossing or pivot
        const CurveSeg& nseg = path.segs[(si + 1) % m];
        if (!path.closed && si + 1 == m) break;
        Vec2 jp = last_pt;
        const Triangle& T = ts.tris[last_tri];
        Vec2 nd = nseg.b - nseg.a;
        if (nd.norm() < 1e-12) continue;

        // vertex junction -> pivot
        int vk = -1;
        for (int k = 0; k < 3; ++k)
            if (dist(T.v[k], jp) <= kEpsHit) vk = k;
        if (vk >= 0 && ts.classes[T.vclass[vk]].in_sigma(marked_as_singular)) {
            CurveNode piv;
            piv.pivot = true;
            piv.vclass = T.vclass[vk];
            piv.etri = last_tri;
            piv.ecorner = vk;
            int npi = -1;
            for (size_t q = 0; q < ts.src_ids.size(); ++q)
                if (ts.src_ids[q] == nseg.polygon) npi = static_cast<int>(q);
            int xtri = -1, xcorner = -1;
            for (int t2 = 0; t2 < (int)ts.tris.size() && xtri < 0; ++t2) {
                if (ts.tris[t2].src_polygon != npi) continue;
                for (int k = 0; k < 3; ++k)
                    if (ts.tris[t2].vclass[k] == piv.vclass &&
                        dist(ts.tris[t2].v[k], nseg.a) <= kEpsHit &&
                        point_in_triangle(nseg.a + (1e-7 / nd.norm()) * nd, ts.tris[t2].v[0],
                                          ts.tris[t2].v[1], ts.tris[t2].v[2], 1e-9)) {
                        xtri = t2;
                        xcorner = k;
                    }
            }
            if (xtri < 0)
                throw Error(ErrorCode::PointOffSurface, "junction pivot exit not found");
            piv.xtri = xtri;
            piv.xcorner = xcorner;
            out.nodes.push_back(piv);
            continue;
        }

        // locate the triangle the next segment actually enters
        int npi = -1;
        for (size_t q = 0; q < ts.src_ids.size(); ++q)
            if (ts.src_ids[q] == nseg.polygon) npi = static_cast<int>(q);
        if (npi < 0) throw Error(ErrorCode::PointOffSurface, "unknown polygon " + nseg.polygon);
        int ntri = -1;
        for (int t2 = 0; t2 < (int)ts.tris.size() && ntri < 0; ++t2) {
            if (ts.tris[t2].src_polygon != npi) continue;
            const Triangle& T2 = ts.tris[t2];
            if (!point_in_triangle(nseg.a, T2.v[0], T2.v[1], T2.v[2], 1e-9)) continue;
            bool inward = true;
            for (int k = 0; k < 3; ++k) {
                if (point_segment_distance(nseg.a, T2.side_start(k), T2.side_end(k)) < 1e-10 &&
                    cross(T2.side_vec(k), nd) < -1e-12 * T2.side_vec(k).norm() * nd.norm())
                    inward = false;
            }
            if (inward) ntri = t2;
        }
        if (ntri < 0) throw Error(ErrorCode::PointOffSurface, "junction point off surface");
        if (ntri == last_tri) continue;  // interior continuation, no crossing

        // find the side of last_tri glued to ntri whose map takes jp to nseg.a
        bool recorded = false;
        for (int k = 0; k < 3 && !recorded; ++k) {
            if (point_segment_distance(jp, T.side_start(k), T.side_end(k)) > 1e-9) continue;
            SideRef o = T.opp[k];
            if (o.tri != ntri) continue;
            Vec2 mapped = ts.transition_into(last_tri, k).inverse().apply(jp);
            if (dist(mapped, nseg.a) > kEpsGlue * 10 + 1e-9) continue;
            double u = dot(jp - T.side_start(k), T.side_vec(k)) / T.side_vec(k).norm2();
            CurveNode cn;
            cn.tri = last_tri;
            cn.side = k;
            cn.u = std::min(1.0, std::max(0.0, u));
            out.nodes.push_back(cn);
            recorded = true;
        }
        if (!recorded)
            throw Error(ErrorCode::NotClosed,
                        "consecutive curve segments are not glued (exit does not map to entry)");
    }
    return out;
}

TightenResult tighten_curve(const FlatSurface& s, const CurvePath& path,
                            bool marked_as_singular) {
    TriSurface ts(s);
    auto pw = to_piecewise(ts, path, marked_as_singular);
    if (pw.nodes.empty()) {
        // curve never leaves a triangle: contractible
        TightenResult r;
        r.trivial = true;
        return r;
    }
    return tighten_curve(ts, pw, marked_as_singular);
}

}  // namespace flatsurf
