#include "flatsurf/capi.h"

#include <cstring>
#include <sstream>

#include "flatsurf/criterion.hpp"
#include "flatsurf/dynamics.hpp"
#include "flatsurf/format.hpp"
#include "flatsurf/rng.hpp"

using namespace flatsurf;

struct fs_surface {
    FlatSurface s;
};
struct fs_cover {
    CoverData c;
};

namespace {

thread_local std::string g_last_error;

fs_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::SyntaxError: return FS_ERR_SYNTAX;
        case ErrorCode::UnknownEdge: return FS_ERR_UNKNOWN_EDGE;
        case ErrorCode::DuplicateGluing: return FS_ERR_DUPLICATE_GLUING;
        case ErrorCode::BadParams: return FS_ERR_BAD_PARAMS;
        case ErrorCode::InvalidSurface: return FS_ERR_INVALID_SURFACE;
        case ErrorCode::AngleNotMultipleOfPi: return FS_ERR_ANGLE;
        case ErrorCode::SingularMatrix: return FS_ERR_SINGULAR_MATRIX;
        case ErrorCode::DegeneratePolygon: return FS_ERR_DEGENERATE_POLYGON;
        case ErrorCode::FlipLimitExceeded: return FS_ERR_FLIP_LIMIT;
        case ErrorCode::SearchBudgetExceeded: return FS_ERR_SEARCH_BUDGET;
        case ErrorCode::NoConePoints: return FS_ERR_NO_CONE_POINTS;
        case ErrorCode::ResolutionTooCoarse: return FS_ERR_RESOLUTION;
        case ErrorCode::IterationLimit: return FS_ERR_ITERATION_LIMIT;
        case ErrorCode::PointOffSurface: return FS_ERR_POINT_OFF_SURFACE;
        case ErrorCode::BranchedCover: return FS_ERR_BRANCHED_COVER;
        case ErrorCode::NotClosed: return FS_ERR_NOT_CLOSED;
        case ErrorCode::NotSimple: return FS_ERR_NOT_SIMPLE;
        case ErrorCode::StartAtConePoint: return FS_ERR_START_AT_CONE;
        case ErrorCode::CylinderDetected: return FS_ERR_CYLINDER_DETECTED;
        case ErrorCode::BudgetExceeded: return FS_ERR_BUDGET;
    }
    return FS_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class Fn>
fs_status guarded(Fn&& fn) {
    try {
        fn();
        return FS_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FS_ERR_INTERNAL;
    }
}

// deterministic start points inside base polygons, lifted to the first sheet
std::vector<SurfacePoint> seeded_starts(const CoverData& cov, int count, Rng& rng) {
    std::vector<SurfacePoint> out;
    const auto& polys = cov.base.polygons;
    int guard = 0;
    while ((int)out.size() < count && guard++ < 100000) {
        const Polygon& p = polys[rng.below(polys.size())];
        Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
        for (const auto& v : p.vertices) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
        }
        Vec2 q{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
        // strictly inside: positive side of every edge, away from vertices
        bool ok = true;
        int n = p.size();
        for (int i = 0; i < n && ok; ++i) {
            Vec2 a = p.vertices[i], b = p.vertices[(i + 1) % n];
            if (cross(b - a, q - a) < 1e-6) ok = false;
        }
        for (int i = 0; i < n && ok; ++i)
            if (dist(q, p.vertices[i]) < 1e-3) ok = false;
        if (!ok) continue;
        auto lifts = cov.lift({p.id, q});
        out.push_back(lifts.front());
    }
    if ((int)out.size() < count)
        throw Error(ErrorCode::BadParams, "could not sample start points inside the surface");
    return out;
}

}  // namespace

extern "C" {

const char* fs_status_name(fs_status status) {
    switch (status) {
        case FS_OK: return "OK";
        case FS_ERR_SYNTAX: return "SyntaxError";
        case FS_ERR_UNKNOWN_EDGE: return "UnknownEdge";
        case FS_ERR_DUPLICATE_GLUING: return "DuplicateGluing";
        case FS_ERR_BAD_PARAMS: return "BadParams";
        case FS_ERR_INVALID_SURFACE: return "InvalidSurface";
        case FS_ERR_ANGLE: return "AngleNotMultipleOfPi";
        case FS_ERR_SINGULAR_MATRIX: return "SingularMatrix";
        case FS_ERR_DEGENERATE_POLYGON: return "DegeneratePolygon";
        case FS_ERR_FLIP_LIMIT: return "FlipLimitExceeded";
        case FS_ERR_SEARCH_BUDGET: return "SearchBudgetExceeded";
        case FS_ERR_NO_CONE_POINTS: return "NoConePoints";
        case FS_ERR_RESOLUTION: return "ResolutionTooCoarse";
        case FS_ERR_ITERATION_LIMIT: return "IterationLimit";
        case FS_ERR_POINT_OFF_SURFACE: return "PointOffSurface";
        case FS_ERR_BRANCHED_COVER: return "BranchedCover";
        case FS_ERR_NOT_CLOSED: return "NotClosed";
        case FS_ERR_NOT_SIMPLE: return "NotSimple";
        case FS_ERR_START_AT_CONE: return "StartAtConePoint";
        case FS_ERR_CYLINDER_DETECTED: return "CylinderDetected";
        case FS_ERR_BUDGET: return "BudgetExceeded";
        case FS_ERR_INTERNAL: return "InternalError";
    }
    return "InternalError";
}

const char* fs_last_error(void) { return g_last_error.c_str(); }

void fs_string_free(char* s) { std::free(s); }
void fs_surface_free(fs_surface* s) { delete s; }
void fs_cover_free(fs_cover* c) { delete c; }

fs_status fs_surface_parse(const char* text, fs_surface** out) {
    return guarded([&] { *out = new fs_surface{parse_surface(text)}; });
}

fs_status fs_surface_generate(const char* name, const double* params, int n_params,
                              fs_surface** out) {
    return guarded([&] {
        std::vector<double> p(params, params + n_params);
        *out = new fs_surface{generate(name, p)};
    });
}

fs_status fs_surface_serialize(const fs_surface* s, char** out_text) {
    return guarded([&] { *out_text = dup_string(serialize_surface(s->s)); });
}

fs_status fs_surface_validate(const fs_surface* s, char** out_report, int* n_violations) {
    return guarded([&] {
        auto report = validate(s->s);
        std::ostringstream os;
        for (const auto& v : report) os << v.location << ": " << v.message << "\n";
        *out_report = dup_string(os.str());
        *n_violations = static_cast<int>(report.size());
    });
}

fs_status fs_surface_info(const fs_surface* s, char** out_text) {
    return guarded([&] {
        require_valid(s->s);
        auto cps = cone_points(s->s);
        int chi = euler_characteristic(s->s);
        int sum_k = 0;
        for (const auto& cp : cps) sum_k += cp.order_k;
        std::ostringstream os;
        os << "polygons: " << s->s.polygons.size() << "\n";
        os << "gluings: " << s->s.gluings.size() << "\n";
        os << "area: " << format_sig12(area(s->s)) << "\n";
        os << "vertex-classes: " << cps.size() << "\n";
        for (const auto& cp : cps) {
            os << "  class at " << cp.corners.front().polygon << ".v"
               << cp.corners.front().vertex << ": angle/pi = "
               << format_sig12(cp.angle / kPi) << ", k = " << cp.order_k
               << (cp.marked ? ", marked" : "") << "\n";
        }
        os << "sum k_i: " << sum_k << "\n";
        os << "-2*chi: " << -2 * chi << "\n";
        os << "gauss-bonnet: " << (sum_k == -2 * chi ? "ok" : "MISMATCH") << "\n";
        *out_text = dup_string(os.str());
    });
}

fs_status fs_surface_apply_matrix(const fs_surface* s, double a, double b, double c, double d,
                                  fs_surface** out) {
    return guarded([&] { *out = new fs_surface{apply_matrix(s->s, Mat2{a, b, c, d})}; });
}

fs_status fs_surface_flow(const fs_surface* s, double t, int normalize, fs_surface** out,
                          int* out_flips) {
    return guarded([&] {
        int flips = 0;
        *out = new fs_surface{flow_to(s->s, t, normalize != 0, &flips)};
        if (out_flips) *out_flips = flips;
    });
}

fs_status fs_cover_build(const fs_surface* base, fs_cover** out) {
    return guarded([&] { *out = new fs_cover{build_double_cover(base->s)}; });
}

fs_status fs_cover_total(const fs_cover* c, fs_surface** out) {
    return guarded([&] { *out = new fs_surface{c->c.total}; });
}

fs_status fs_cover_info(const fs_cover* c, char** out_text) {
    return guarded([&] {
        std::ostringstream os;
        os << "connected: " << (c->c.total_connected ? "yes" : "no")
           << (c->c.total_connected ? "" : " (disconnected)") << "\n";
        os << "branch-points: " << c->c.branch_points.size() << "\n";
        os << "area-total: " << format_sig12(area(c->c.total)) << "\n";
        os << "area-base: " << format_sig12(area(c->c.base)) << "\n";
        os << "chi-total: " << euler_characteristic(c->c.total) << "\n";
        os << "chi-base: " << euler_characteristic(c->c.base) << "\n";
        for (const auto& [tid, entry] : c->c.sheet_of)
            os << "sheet " << tid << " = " << entry.base_id << " sheet " << entry.sheet << "\n";
        *out_text = dup_string(os.str());
    });
}

fs_status fs_systole(const fs_surface* s, int depth, int marked_as_singular, double* out_value,
                     char** out_report) {
    return guarded([&] {
        auto punctured = systole_estimate(s->s, depth, true);
        auto closed = systole_estimate(s->s, depth, false);
        auto& primary = marked_as_singular ? punctured : closed;
        *out_value = primary.value;
        auto kind_name = [](SystoleKind k) {
            switch (k) {
                case SystoleKind::CylinderCore: return "CylinderCore";
                case SystoleKind::SingularLoop: return "SingularLoop";
                case SystoleKind::Concatenation: return "Concatenation";
            }
            return "CylinderCore";
        };
        std::ostringstream os;
        os << "systole (marked points singular): " << format_sig12(punctured.value) << " kind "
           << kind_name(punctured.kind)
           << (punctured.lower_confidence ? " certified" : " upper-bound") << "\n";
        os << "systole (closed-surface classes): " << format_sig12(closed.value) << " kind "
           << kind_name(closed.kind) << (closed.lower_confidence ? " certified" : " upper-bound")
           << "\n";
        if (out_report) *out_report = dup_string(os.str());
    });
}

fs_status fs_criterion_csv(const fs_surface* s, double tmax, double dt, int depth,
                           char** out_csv) {
    return guarded([&] {
        auto track = build_flow_track(s->s, tmax, dt, true);
        CriterionOptions opts;
        opts.depth = depth;
        auto rep = criterion_integral(track, opts);
        std::ostringstream os;
        os << "t,kappa,delta_sc,d_t,integrand,integral\n";
        for (const auto& r : rep.rows)
            os << format_sig12(r.t) << "," << format_sig12(r.kappa) << ","
               << format_sig12(r.delta_sc) << "," << format_sig12(r.d_t) << ","
               << format_sig12(r.integrand) << "," << format_sig12(r.integral) << "\n";
        os << "# verdict: " << verdict_name(rep.verdict) << "\n";
        *out_csv = dup_string(os.str());
    });
}

fs_status fs_thm3_csv(const fs_surface* s, double eta, double eps0, double res, double tmax,
                      double dt, char** out_csv) {
    return guarded([&] {
        auto track = build_flow_track(s->s, tmax, dt, true);
        auto rep = theorem3_report(track, eta, [&](double) { return eps0; }, res);
        std::ostringstream os;
        os << "t,C,sumD,delta,integrand,integral,cond1,cond2\n";
        for (const auto& r : rep.rows)
            os << format_sig12(r.t) << "," << r.C << "," << format_sig12(r.sumD) << ","
               << format_sig12(r.delta) << "," << format_sig12(r.integrand) << ","
               << format_sig12(r.integral) << "," << (r.cond1 ? 1 : 0) << ","
               << (r.cond2 ? 1 : 0) << "\n";
        *out_csv = dup_string(os.str());
    });
}

fs_status fs_trace_csv(const fs_surface* s, const char* polygon, double x, double y, double len,
                       int grid, char** out_csv, char** out_summary) {
    return guarded([&] {
        auto cov = build_double_cover(s->s);
        std::string pid = polygon && *polygon ? polygon : s->s.polygons.front().id;
        auto lifts = cov.lift({pid, {x, y}});
        auto trace = trace_leaf(cov, lifts.front(), len);
        auto disc = box_discrepancy(cov, trace, grid);
        std::ostringstream os;
        os << "N,D_N\n";
        for (const auto& d : disc) os << d.N << "," << format_sig12(d.D_N) << "\n";
        *out_csv = dup_string(os.str());
        if (out_summary) {
            std::ostringstream ss;
            ss << "terminated_by: " << trace_end_name(trace.terminated_by)
               << ", length: " << format_sig12(trace.total_length) << "\n";
            *out_summary = dup_string(ss.str());
        }
    });
}

fs_status fs_return_map_text(const fs_surface* s, const char* polygon, double x, double y,
                             double height, char** out_text) {
    return guarded([&] {
        auto cov = build_double_cover(s->s);
        std::string pid = polygon && *polygon ? polygon : s->s.polygons.front().id;
        Transversal tv{cov.lift_id(pid, 0), {x, y}, height};
        auto rm = first_return_map(cov, tv);
        std::ostringstream os;
        os << "transversal: " << pid << " base " << format_sig12(x) << "," << format_sig12(y)
           << " height " << format_sig12(height) << "\n";
        os << "intervals: " << rm.intervals.size() << "\n";
        double sum = 0;
        for (size_t i = 0; i < rm.intervals.size(); ++i) {
            const auto& iv = rm.intervals[i];
            os << "  " << i << ": length " << format_sig12(iv.length) << " -> position "
               << iv.image_index << (iv.orientation_preserving ? " preserving" : " reversing")
               << " return_time " << format_sig12(iv.return_time) << "\n";
            sum += iv.length;
        }
        os << "length-sum: " << format_sig12(sum) << "\n";
        *out_text = dup_string(os.str());
    });
}

fs_status fs_panel_csv(const fs_surface* s, int starts, uint64_t seed, double len, int grid,
                       char** out_csv) {
    return guarded([&] {
        auto cov = build_double_cover(s->s);
        Rng rng(seed);
        auto pts = seeded_starts(cov, starts, rng);
        auto rep = birkhoff_panel(cov, pts, grid, len);
        std::ostringstream os;
        os << "start_id,box_id,N,avg\n";
        for (const auto& e : rep.birkhoff_table)
            os << e.start_id << "," << e.box_id << "," << e.N << "," << format_sig12(e.avg)
               << "\n";
        os << "# verdict: " << ue_verdict_name(rep.verdict) << "\n";
        *out_csv = dup_string(os.str());
    });
}

fs_status fs_cover_check_text(const fs_surface* s, int samples, uint64_t seed, char** out_text) {
    return guarded([&] {
        auto cov = build_double_cover(s->s);
        std::ostringstream os;
        os << "cover: " << (cov.total_connected ? "connected" : "disconnected") << ", "
           << cov.branch_points.size() << " branch points\n";
        if (cov.branched()) {
            os << "branched cover: curve projection not applicable\n";
            *out_text = dup_string(os.str());
            return;
        }
        auto cmp = verify_systole_comparison(cov, 2);
        os << "sys_total: " << format_sig12(cmp.sys_total)
           << ", sys_base: " << format_sig12(cmp.sys_base) << ", ok: " << (cmp.ok ? 1 : 0)
           << "\n";

        // seeded random closed geodesics: offsets beside enumerated
        // connections, traced to closure
        TriSurface ts(cov.total);
        EnumOptions eo;
        auto scs = enumerate_saddle_connections(ts, 4 * std::sqrt(area(cov.total)), eo);
        Rng rng(seed);
        int done = 0, tested = 0;
        int guard = 0;
        while (done < samples && guard++ < samples * 40 && !scs.empty()) {
            const auto& sc = scs[rng.below(scs.size())];
            if (sc.path.segs.empty()) continue;
            const auto& seg0 = sc.path.segs[rng.below(sc.path.segs.size())];
            Vec2 mid = 0.5 * (seg0.a + seg0.b);
            Vec2 u = sc.holonomy * (1.0 / sc.length());
            Vec2 n{-u.y, u.x};
            double delta = 1e-4 * (1 + rng.uniform());
            CurvePath gamma;
            try {
                TriPoint p0 = ts.locate(seg0.polygon, mid + delta * n);
                RayWalker w(ts, p0, u, true);
                WalkSeg wseg;
                double total = 0;
                bool closed = false;
                while (w.advance(wseg)) {
                    double l = dist(wseg.a, wseg.b);
                    if (wseg.tri == p0.tri && l > 0) {
                        Vec2 dch{(wseg.b.x - wseg.a.x) / l, (wseg.b.y - wseg.a.y) / l};
                        double along = dot(p0.p - wseg.a, dch);
                        double perp = std::abs(cross(dch, p0.p - wseg.a));
                        if (dot(dch, u) > 0.999999 && perp <= 1e-9 && along >= -1e-9 &&
                            along <= l + 1e-9 && total + along > 1e-9) {
                            gamma.segs.push_back({ts.src_ids[ts.tris[wseg.tri].src_polygon],
                                                  wseg.a, p0.p});
                            gamma.closed = true;
                            closed = true;
                            break;
                        }
                    }
                    gamma.segs.push_back(
                        {ts.src_ids[ts.tris[wseg.tri].src_polygon], wseg.a, wseg.b});
                    total += l;
                    if (w.status != WalkStop::None || total > 40) break;
                }
                if (!closed) continue;
            } catch (const Error&) {
                continue;
            }
            ++tested;
            auto beta = project_curve(cov, gamma);
            bool len_ok = beta.length() <= gamma.length() + 1e-9;
            auto tightened = tighten_curve(cov.base, beta, true);
            bool essential = !tightened.trivial;
            os << "sample " << done << ": len(gamma) = " << format_sig12(gamma.length())
               << ", len(beta) = " << format_sig12(beta.length())
               << ", len_ok: " << (len_ok ? 1 : 0) << ", essential: " << (essential ? 1 : 0)
               << "\n";
            if (!len_ok || !essential)
                throw Error(ErrorCode::NotSimple, "curve projection check failed");
            ++done;
        }
        os << "checked: " << done << " closed geodesics\n";
        *out_text = dup_string(os.str());
    });
}

}  // extern "C"
