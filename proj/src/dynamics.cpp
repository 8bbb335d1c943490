#include "flatsurf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace flatsurf {

const char* trace_end_name(TraceEnd e) {
    switch (e) {
        case TraceEnd::LengthBudget: return "LengthBudget";
        case TraceEnd::HitConePoint: return "HitConePoint";
        case TraceEnd::ClosedUp: return "ClosedUp";
    }
    return "LengthBudget";
}

const char* ue_verdict_name(UEVerdict v) {
    switch (v) {
        case UEVerdict::UELike: return "UELike";
        case UEVerdict::NonUELike: return "NonUELike";
        case UEVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

// All tracing happens on the cover total, where the horizontal foliation is
// an honest flow: every transition is a translation and the direction (1,0)
// is globally defined.
struct TraceContext {
    TriSurface ts;
    explicit TraceContext(const CoverData& cover) : ts(cover.total) {
        if (!ts.all_translations)
            throw Error(ErrorCode::InvalidSurface,
                        "cover total must carry only translation gluings");
    }
};

}  // namespace

LeafTrace trace_leaf(const CoverData& cover, const SurfacePoint& start, double length_budget) {
    if (!(length_budget > 0)) throw Error(ErrorCode::BadParams, "length budget must be positive");
    TraceContext ctx(cover);
    TriPoint p0 = ctx.ts.locate(start.polygon, start.p);
    if (ctx.ts.vclass_at(p0) >= 0 &&
        ctx.ts.classes[ctx.ts.vclass_at(p0)].in_sigma(true))
        throw Error(ErrorCode::StartAtConePoint, "leaf trace may not start at a cone point");

    LeafTrace out;
    out.start = start;
    RayWalker w(ctx.ts, p0, {1, 0}, true);
    WalkSeg seg;
    double done = 0;
    while (w.advance(seg)) {
        double l = dist(seg.a, seg.b);
        // closure against the start point
        if (seg.tri == p0.tri && l > 0) {
            Vec2 d{(seg.b.x - seg.a.x) / l, (seg.b.y - seg.a.y) / l};
            double along = dot(p0.p - seg.a, d);
            double perp = std::abs(cross(d, p0.p - seg.a));
            if (d.x > 0.999999 && perp <= 1e-9 && along >= -1e-9 && along <= l + 1e-9 &&
                done + along > 1e-9) {
                out.segments.segs.push_back(
                    {ctx.ts.src_ids[ctx.ts.tris[seg.tri].src_polygon], seg.a, p0.p});
                out.total_length = done + along;
                out.terminated_by = TraceEnd::ClosedUp;
                out.segments.closed = true;
                return out;
            }
        }
        if (done + l >= length_budget) {
            double keep = length_budget - done;
            Vec2 end = seg.a + (keep / l) * (seg.b - seg.a);
            out.segments.segs.push_back(
                {ctx.ts.src_ids[ctx.ts.tris[seg.tri].src_polygon], seg.a, end});
            out.total_length = length_budget;
            out.terminated_by = TraceEnd::LengthBudget;
            return out;
        }
        out.segments.segs.push_back({ctx.ts.src_ids[ctx.ts.tris[seg.tri].src_polygon], seg.a,
                                     seg.b});
        done += l;
        if (w.status == WalkStop::ConePoint) {
            out.total_length = done;
            out.terminated_by = TraceEnd::HitConePoint;
            return out;
        }
        if (w.status != WalkStop::None) break;
    }
    out.total_length = done;
    out.terminated_by = TraceEnd::HitConePoint;
    return out;
}

namespace {

struct TransversalPieces {
    // pieces of the vertical segment in triangle charts, bottom-up
    struct Piece {
        int tri;
        Vec2 a, b;        // chart endpoints, b above a
        double off_a;     // offset of a from the transversal base
    };
    std::vector<Piece> pieces;
    double height = 0;

    // offset -> chart point
    TriPoint at(double off) const {
        for (const auto& p : pieces) {
            double len = dist(p.a, p.b);
            if (off <= p.off_a + len + 1e-12) {
                double t = std::max(0.0, (off - p.off_a) / std::max(len, 1e-300));
                return {p.tri, p.a + std::min(1.0, t) * (p.b - p.a)};
            }
        }
        return {pieces.back().tri, pieces.back().b};
    }
};

TransversalPieces clip_transversal(const TriSurface& ts, const Transversal& tr) {
    if (!(tr.height > 0))
        throw Error(ErrorCode::BadParams, "transversal height must be positive");
    TransversalPieces out;
    out.height = tr.height;
    TriPoint p0 = ts.locate(tr.polygon, tr.base_point);
    RayWalker w(ts, p0, {0, 1}, true);
    WalkSeg seg;
    double done = 0;
    while (w.advance(seg)) {
        double l = dist(seg.a, seg.b);
        if (done + l >= tr.height) {
            Vec2 end = seg.a + ((tr.height - done) / l) * (seg.b - seg.a);
            out.pieces.push_back({seg.tri, seg.a, end, done});
            return out;
        }
        out.pieces.push_back({seg.tri, seg.a, seg.b, done});
        done += l;
        if (w.status == WalkStop::ConePoint)
            throw Error(ErrorCode::BadParams, "transversal interior meets a singular point");
        if (w.status != WalkStop::None)
            throw Error(ErrorCode::BadParams, "transversal leaves the surface");
    }
    throw Error(ErrorCode::BadParams, "transversal could not be traced");
}

// first crossing of the transversal by the horizontal walk from `start`;
// returns (offset, flow time) or closure/budget outcomes
struct FirstHit {
    bool hit = false;
    bool closed = false;
    double offset = 0;
    double time = 0;
};

FirstHit first_transversal_hit(const TriSurface& ts, const TransversalPieces& tp,
                               const TriPoint& start, double budget, bool skip_zero,
                               double start_offset = -1) {
    FirstHit res;
    RayWalker w(ts, start, {1, 0}, true);
    WalkSeg seg;
    double done = 0;
    while (w.advance(seg)) {
        double l = dist(seg.a, seg.b);
        for (const auto& piece : tp.pieces) {
            if (piece.tri != seg.tri) continue;
            double s, t;
            if (!segment_intersect(seg.a, seg.b, piece.a, piece.b, s, t, 1e-14)) continue;
            double time = done + s * l;
            if (skip_zero && time <= 1e-9) continue;
            double off = piece.off_a + t * dist(piece.a, piece.b);
            if (off >= tp.height - 1e-9) continue;  // section is [0, height)
            // a leaf hitting its own start point has closed up
            if (start_offset >= 0 && std::abs(off - start_offset) <= 1e-9) {
                res.closed = true;
                res.time = time;
                return res;
            }
            if (!res.hit || time < res.time) {
                res.hit = true;
                res.time = time;
                res.offset = off;
            }
        }
        if (res.hit && res.time <= done + l + 1e-12) return res;
        // closure without crossing: periodic leaf
        if (seg.tri == start.tri && l > 0) {
            Vec2 d{(seg.b.x - seg.a.x) / l, (seg.b.y - seg.a.y) / l};
            double along = dot(start.p - seg.a, d);
            double perp = std::abs(cross(d, start.p - seg.a));
            if (d.x > 0.999999 && perp <= 1e-9 && along >= -1e-9 && along <= l + 1e-9 &&
                done + along > 1e-9) {
                res.closed = true;
                res.time = done + along;
                return res;
            }
        }
        done += l;
        if (w.status != WalkStop::None) break;
        if (done > budget)
            throw Error(ErrorCode::BudgetExceeded, "no return within the trace budget");
    }
    return res;
}

}  // namespace

ReturnMap first_return_map(const CoverData& cover, const Transversal& transversal,
                           double trace_budget) {
    TraceContext ctx(cover);
    const TriSurface& ts = ctx.ts;
    TransversalPieces tp = clip_transversal(ts, transversal);
    double area = ts.area();
    if (trace_budget <= 0) trace_budget = 200.0 * (area / transversal.height + 1.0);

    // backward separatrices from every singular/marked point partition the
    // transversal by the first backward hits
    std::vector<double> cuts{0.0, transversal.height};
    for (int t = 0; t < (int)ts.tris.size(); ++t)
        for (int c = 0; c < 3; ++c) {
            if (!ts.classes[ts.tris[t].vclass[c]].in_sigma(true)) continue;
            Vec2 v = ts.tris[t].v[c];
            Vec2 e1 = ts.tris[t].v[(c + 1) % 3] - v;
            Vec2 e2 = ts.tris[t].v[(c + 2) % 3] - v;
            Vec2 d{-1, 0};
            if (!(cross(e1, d) >= 0 && cross(d, e2) > 0)) continue;  // wedge ownership
            RayWalker w = RayWalker::from_vertex(ts, t, c, d, true);
            WalkSeg seg;
            double done = 0;
            while (w.advance(seg)) {
                double l = dist(seg.a, seg.b);
                bool found = false;
                for (const auto& piece : tp.pieces) {
                    if (piece.tri != seg.tri) continue;
                    double s, u;
                    if (!segment_intersect(seg.a, seg.b, piece.a, piece.b, s, u, 1e-14)) continue;
                    if (done + s * l <= 1e-9) continue;
                    double off = piece.off_a + u * dist(piece.a, piece.b);
                    if (off >= transversal.height - 1e-9) continue;  // [0, height)
                    if (off > 1e-12) cuts.push_back(off);
                    found = true;
                }
                if (found) break;
                done += l;
                if (w.status != WalkStop::None) break;  // separatrix ends at a cone point
                if (done > trace_budget) break;
            }
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-10; }),
               cuts.end());

    ReturnMap rm;
    rm.transversal = transversal;
    rm.cut_points = cuts;
    int n = (int)cuts.size() - 1;
    if (n < 1) throw Error(ErrorCode::BadParams, "degenerate transversal partition");

    std::vector<double> mid_img(n), mid_time(n);
    for (int i = 0; i < n; ++i) {
        double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        FirstHit hit = first_transversal_hit(ts, tp, tp.at(mid), trace_budget, true, mid);
        if (hit.closed)
            throw Error(ErrorCode::CylinderDetected,
                        "a leaf closes up without returning to the transversal");
        if (!hit.hit)
            throw Error(ErrorCode::BudgetExceeded, "no return within the trace budget");
        mid_img[i] = hit.offset;
        mid_time[i] = hit.time;

        // rigidity check near both ends of the interval
        double len = cuts[i + 1] - cuts[i];
        double d = std::min(len / 4, 1e-3 * transversal.height);
        for (double probe : {cuts[i] + d, cuts[i + 1] - d}) {
            FirstHit h2 = first_transversal_hit(ts, tp, tp.at(probe), trace_budget, true, probe);
            if (h2.closed) throw Error(ErrorCode::CylinderDetected, "closed leaf inside interval");
            if (!h2.hit) throw Error(ErrorCode::BudgetExceeded, "no return for interval probe");
            if (std::abs((h2.offset - mid_img[i]) - (probe - mid)) > 1e-7)
                throw Error(ErrorCode::IterationLimit,
                            "interval image is not a rigid translation (continuity check)");
        }
    }
    rm.midpoint_images = mid_img;

    // order intervals by image offset
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return mid_img[a] < mid_img[b]; });
    std::vector<int> image_index(n);
    for (int r = 0; r < n; ++r) image_index[order[r]] = r;

    for (int i = 0; i < n; ++i)
        rm.intervals.push_back({cuts[i + 1] - cuts[i], image_index[i], true, mid_time[i]});
    return rm;
}

double iterate_return_map(const ReturnMap& rm, double offset, int times) {
    int n = (int)rm.intervals.size();
    for (int it = 0; it < times; ++it) {
        int i = 0;
        while (i < n - 1 && offset >= rm.cut_points[i + 1]) ++i;
        double mid = 0.5 * (rm.cut_points[i] + rm.cut_points[i + 1]);
        offset = rm.midpoint_images[i] + (offset - mid);
    }
    return offset;
}

namespace {

struct BoxPartition {
    struct Box {
        std::string polygon;
        Vec2 lo, hi;
        double area = 0;
    };
    std::vector<Box> boxes;
    double total_area = 0;

    int box_of(const std::string& polygon, const Vec2& p) const {
        for (size_t i = 0; i < boxes.size(); ++i) {
            const Box& b = boxes[i];
            if (b.polygon != polygon) continue;
            if (p.x >= b.lo.x - 1e-12 && p.x < b.hi.x + 1e-12 && p.y >= b.lo.y - 1e-12 &&
                p.y < b.hi.y + 1e-12)
                return (int)i;
        }
        return -1;
    }
};

// area of polygon clipped to an axis-aligned rectangle (Sutherland-Hodgman)
double clipped_area(const std::vector<Vec2>& poly, const Vec2& lo, const Vec2& hi) {
    std::vector<Vec2> cur = poly;
    auto clip = [&](auto inside, auto intersect) {
        std::vector<Vec2> next;
        int m = (int)cur.size();
        for (int i = 0; i < m; ++i) {
            Vec2 a = cur[i], b = cur[(i + 1) % m];
            bool ia = inside(a), ib = inside(b);
            if (ia) next.push_back(a);
            if (ia != ib) next.push_back(intersect(a, b));
        }
        cur = std::move(next);
    };
    clip([&](const Vec2& p) { return p.x >= lo.x; },
         [&](const Vec2& a, const Vec2& b) {
             double t = (lo.x - a.x) / (b.x - a.x);
             return Vec2{lo.x, a.y + t * (b.y - a.y)};
         });
    if (cur.empty()) return 0;
    clip([&](const Vec2& p) { return p.x <= hi.x; },
         [&](const Vec2& a, const Vec2& b) {
             double t = (hi.x - a.x) / (b.x - a.x);
             return Vec2{hi.x, a.y + t * (b.y - a.y)};
         });
    if (cur.empty()) return 0;
    clip([&](const Vec2& p) { return p.y >= lo.y; },
         [&](const Vec2& a, const Vec2& b) {
             double t = (lo.y - a.y) / (b.y - a.y);
             return Vec2{a.x + t * (b.x - a.x), lo.y};
         });
    if (cur.empty()) return 0;
    clip([&](const Vec2& p) { return p.y <= hi.y; },
         [&](const Vec2& a, const Vec2& b) {
             double t = (hi.y - a.y) / (b.y - a.y);
             return Vec2{a.x + t * (b.x - a.x), hi.y};
         });
    if (cur.size() < 3) return 0;
    return std::abs(signed_area(cur.begin(), cur.end()));
}

BoxPartition make_boxes(const FlatSurface& base, int grid) {
    if (grid < 1) throw Error(ErrorCode::BadParams, "grid must be >= 1");
    BoxPartition bp;
    bp.total_area = area(base);
    for (const auto& p : base.polygons) {
        Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
        for (const auto& v : p.vertices) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
        }
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                Vec2 blo{lo.x + (hi.x - lo.x) * i / grid, lo.y + (hi.y - lo.y) * j / grid};
                Vec2 bhi{lo.x + (hi.x - lo.x) * (i + 1) / grid,
                         lo.y + (hi.y - lo.y) * (j + 1) / grid};
                double a = clipped_area(p.vertices, blo, bhi);
                bp.boxes.push_back({p.id, blo, bhi, a});
            }
    }
    return bp;
}

// unit-length samples (phase 0.5) of a trace, projected to the base
std::vector<std::pair<std::string, Vec2>> trace_samples(const CoverData& cover,
                                                        const LeafTrace& trace,
                                                        long long max_samples) {
    std::vector<std::pair<std::string, Vec2>> out;
    double next = 0.5;
    double done = 0;
    // closed leaves are sampled periodically by wrapping
    int laps = 1;
    if (trace.terminated_by == TraceEnd::ClosedUp && trace.total_length > 1e-9)
        laps = (int)std::ceil((max_samples + 1.0) / std::max(1.0, trace.total_length)) + 1;
    for (int lap = 0; lap < laps && (long long)out.size() < max_samples; ++lap) {
        for (const auto& seg : trace.segments.segs) {
            double l = dist(seg.a, seg.b);
            while (next <= done + l && (long long)out.size() < max_samples) {
                double t = (next - done) / l;
                SurfacePoint up{seg.polygon, seg.a + t * (seg.b - seg.a)};
                SurfacePoint downstairs = cover.project(up);
                out.push_back({downstairs.polygon, downstairs.p});
                next += 1.0;
            }
            done += l;
        }
    }
    return out;
}

std::vector<long long> decade_checkpoints(long long n_total) {
    std::vector<long long> cps;
    for (long long n = 100; n <= n_total; n *= 10) cps.push_back(n);
    if (cps.empty() || cps.back() != n_total) cps.push_back(n_total);
    return cps;
}

}  // namespace

std::vector<DiscrepancyPoint> box_discrepancy(const CoverData& cover, const LeafTrace& trace,
                                              int grid) {
    BoxPartition bp = make_boxes(cover.base, grid);
    long long n_total = (long long)std::floor(trace.total_length);
    if (trace.terminated_by == TraceEnd::ClosedUp)
        n_total = std::max<long long>(n_total, 10000);  // wrap closed leaves
    auto samples = trace_samples(cover, trace, n_total);
    n_total = (long long)samples.size();

    std::vector<DiscrepancyPoint> out;
    // N = 0 convention: the largest box measure
    double d0 = 0;
    for (const auto& b : bp.boxes) d0 = std::max(d0, b.area / bp.total_area);
    out.push_back({0, d0});
    if (n_total == 0) return out;

    std::vector<long long> counts(bp.boxes.size(), 0);
    auto cps = decade_checkpoints(n_total);
    size_t cp = 0;
    for (long long i = 0; i < n_total; ++i) {
        int b = bp.box_of(samples[i].first, samples[i].second);
        if (b >= 0) counts[b]++;
        if (cp < cps.size() && i + 1 == cps[cp]) {
            double dn = 0;
            for (size_t k = 0; k < bp.boxes.size(); ++k)
                dn = std::max(dn, std::abs((double)counts[k] / cps[cp] -
                                           bp.boxes[k].area / bp.total_area));
            out.push_back({cps[cp], dn});
            ++cp;
        }
    }
    return out;
}

ErgodicityReport birkhoff_panel(const CoverData& cover, const std::vector<SurfacePoint>& starts,
                                int grid, double budget) {
    if (starts.size() < 2)
        throw Error(ErrorCode::BadParams, "birkhoff panel needs at least 2 start points");
    BoxPartition bp = make_boxes(cover.base, grid);
    long long n_total = (long long)std::floor(budget);
    auto cps = decade_checkpoints(n_total);

    ErgodicityReport rep;
    size_t nb = bp.boxes.size();
    // avgs[start][checkpoint][box]
    std::vector<std::vector<std::vector<double>>> avgs(starts.size());
    std::vector<std::vector<double>> disc(starts.size());

    for (size_t si = 0; si < starts.size(); ++si) {
        LeafTrace tr = trace_leaf(cover, starts[si], budget);
        auto samples = trace_samples(cover, tr, n_total);
        std::vector<long long> counts(nb, 0);
        size_t cp = 0;
        avgs[si].resize(cps.size(), std::vector<double>(nb, 0));
        disc[si].resize(cps.size(), 0);
        for (long long i = 0; i < (long long)samples.size(); ++i) {
            int b = bp.box_of(samples[i].first, samples[i].second);
            if (b >= 0) counts[b]++;
            if (cp < cps.size() && i + 1 == cps[cp]) {
                double dn = 0;
                for (size_t k = 0; k < nb; ++k) {
                    avgs[si][cp][k] = (double)counts[k] / cps[cp];
                    dn = std::max(dn, std::abs(avgs[si][cp][k] - bp.boxes[k].area / bp.total_area));
                }
                disc[si][cp] = dn;
                ++cp;
            }
        }
        // short traces (closed leaves) may not reach every checkpoint; carry
        for (; cp < cps.size(); ++cp) {
            long long got = (long long)samples.size();
            double dn = 0;
            for (size_t k = 0; k < nb; ++k) {
                avgs[si][cp][k] = got ? (double)counts[k] / got : 0;
                dn = std::max(dn, std::abs(avgs[si][cp][k] - bp.boxes[k].area / bp.total_area));
            }
            disc[si][cp] = dn;
        }
    }

    for (size_t c = 0; c < cps.size(); ++c) {
        double worst = 0;
        for (size_t si = 0; si < starts.size(); ++si) worst = std::max(worst, disc[si][c]);
        rep.discrepancy_series.push_back({cps[c], worst});
        for (size_t si = 0; si < starts.size(); ++si)
            for (size_t k = 0; k < nb; ++k)
                rep.birkhoff_table.push_back({(int)si, (int)k, cps[c], avgs[si][c][k]});
    }

    // verdict per the pairwise gap rules
    size_t last = cps.size() - 1;
    double max_gap_final = 0;
    for (size_t a = 0; a < starts.size(); ++a)
        for (size_t b = a + 1; b < starts.size(); ++b)
            for (size_t k = 0; k < nb; ++k)
                max_gap_final = std::max(max_gap_final,
                                         std::abs(avgs[a][last][k] - avgs[b][last][k]));
    bool disc_decays = rep.discrepancy_series.back().D_N <=
                       rep.discrepancy_series.front().D_N + 1e-12;

    // persistent gap over the last decade of N
    bool persistent = false;
    for (size_t a = 0; a < starts.size() && !persistent; ++a)
        for (size_t b = a + 1; b < starts.size() && !persistent; ++b)
            for (size_t k = 0; k < nb && !persistent; ++k) {
                bool all_large = true;
                bool any_in_decade = false;
                for (size_t c = 0; c < cps.size(); ++c) {
                    if (cps[c] * 10 < cps[last]) continue;
                    any_in_decade = true;
                    if (std::abs(avgs[a][c][k] - avgs[b][c][k]) <= 0.1) all_large = false;
                }
                if (any_in_decade && all_large) persistent = true;
            }

    if (max_gap_final <= 0.02 && disc_decays)
        rep.verdict = UEVerdict::UELike;
    else if (persistent)
        rep.verdict = UEVerdict::NonUELike;
    else
        rep.verdict = UEVerdict::Inconclusive;
    return rep;
}

double transverse_measure_estimate(const CoverData& cover, const Transversal& gamma_on_base,
                                   const LeafTrace& trace, double eps_width) {
    if (!(gamma_on_base.height >= 0))
        throw Error(ErrorCode::BadParams, "transversal height must be nonnegative");
    if (gamma_on_base.height == 0) return 0;
    Vec2 g0 = gamma_on_base.base_point;
    Vec2 g1 = g0 + Vec2{0, gamma_on_base.height};

    long long crossings = 0;
    double length_used = trace.total_length;
    for (const auto& seg : trace.segments.segs) {
        const auto& entry = cover.sheet_of.at(seg.polygon);
        if (entry.base_id != gamma_on_base.polygon) continue;
        Vec2 a = entry.to_base.apply(seg.a);
        Vec2 b = entry.to_base.apply(seg.b);
        double s, t;
        if (segment_intersect(a, b, g0, g1, s, t, std::max(eps_width, 1e-14))) {
            // half-open along the trace so junction crossings count once
            if (s >= -1e-12 && s < 1 - 1e-12) ++crossings;
        }
    }
    double total_area = area(cover.base);
    return crossings * total_area / length_used;
}

}  // namespace flatsurf
