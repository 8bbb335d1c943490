#include "flatsurf/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace flatsurf {

std::string format_double(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string format_sig12(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    if (x == 0.0) x = 0.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

namespace {

[[noreturn]] void syntax_error(int line, const std::string& msg) {
    throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& tok, int line) {
    auto slash = tok.find('/');
    if (slash != std::string::npos) {
        std::string ps = tok.substr(0, slash), qs = tok.substr(slash + 1);
        try {
            size_t used;
            double p = std::stod(ps, &used);
            if (used != ps.size()) throw std::invalid_argument(ps);
            double q = std::stod(qs, &used);
            if (used != qs.size()) throw std::invalid_argument(qs);
            if (q == 0) syntax_error(line, "zero denominator in '" + tok + "'");
            return p / q;
        } catch (const std::logic_error&) {
            syntax_error(line, "bad rational '" + tok + "'");
        }
    }
    try {
        size_t used;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::logic_error&) {
        syntax_error(line, "bad number '" + tok + "'");
    }
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

EdgeRef parse_edge_ref(const std::string& tok, int line) {
    auto d = tok.rfind('.');
    if (d == std::string::npos || d == 0 || d + 1 >= tok.size())
        syntax_error(line, "expected <polygon>.<edge>, got '" + tok + "'");
    EdgeRef e;
    e.polygon = tok.substr(0, d);
    std::string idx = tok.substr(d + 1);
    auto res = std::from_chars(idx.data(), idx.data() + idx.size(), e.edge);
    if (res.ec != std::errc() || res.ptr != idx.data() + idx.size())
        syntax_error(line, "bad edge index '" + idx + "'");
    return e;
}

}  // namespace

FlatSurface parse_surface(const std::string& text) {
    FlatSurface s;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    bool header_seen = false;
    std::map<EdgeRef, int> glue_line;  // for DuplicateGluing diagnostics

    while (std::getline(is, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        auto toks = split_ws(raw);
        if (toks.empty()) continue;

        if (!header_seen) {
            if (toks.size() < 2 || toks[0] != "flatsurf" || toks[1] != "v1")
                syntax_error(lineno, "expected header 'flatsurf v1'");
            header_seen = true;
            continue;
        }

        if (toks[0] == "polygon") {
            if (toks.size() < 4) syntax_error(lineno, "polygon needs an id and >= 3 vertices");
            Polygon p;
            p.id = toks[1];
            for (size_t i = 2; i < toks.size(); ++i) {
                auto comma = toks[i].find(',');
                if (comma == std::string::npos)
                    syntax_error(lineno, "expected x,y pair, got '" + toks[i] + "'");
                p.vertices.push_back({parse_number(toks[i].substr(0, comma), lineno),
                                      parse_number(toks[i].substr(comma + 1), lineno)});
            }
            if (s.find_polygon(p.id))
                syntax_error(lineno, "duplicate polygon id '" + p.id + "'");
            s.polygons.push_back(std::move(p));
        } else if (toks[0] == "glue") {
            if (toks.size() != 4) syntax_error(lineno, "glue needs two edges and a kind");
            Gluing g;
            g.a = parse_edge_ref(toks[1], lineno);
            g.b = parse_edge_ref(toks[2], lineno);
            if (toks[3] == "T")
                g.kind = GluingKind::Translation;
            else if (toks[3] == "F")
                g.kind = GluingKind::Flip;
            else
                syntax_error(lineno, "gluing kind must be T or F");
            for (const EdgeRef* e : {&g.a, &g.b}) {
                const Polygon* p = s.find_polygon(e->polygon);
                if (!p)
                    throw Error(ErrorCode::UnknownEdge, "line " + std::to_string(lineno) +
                                                            ": unknown polygon '" + e->polygon + "'");
                if (e->edge < 0 || e->edge >= p->size())
                    throw Error(ErrorCode::UnknownEdge,
                                "line " + std::to_string(lineno) + ": edge index " +
                                    std::to_string(e->edge) + " out of range on '" + e->polygon + "'");
                auto it = glue_line.find(*e);
                if (it != glue_line.end())
                    throw Error(ErrorCode::DuplicateGluing,
                                "edge " + e->polygon + "." + std::to_string(e->edge) +
                                    " glued on line " + std::to_string(it->second) +
                                    " and line " + std::to_string(lineno));
                glue_line[*e] = lineno;
            }
            s.gluings.push_back(g);
        } else if (toks[0] == "marked") {
            if (toks.size() != 2) syntax_error(lineno, "marked needs one <polygon>.v<k> token");
            auto d = toks[1].rfind(".v");
            if (d == std::string::npos) syntax_error(lineno, "expected <polygon>.v<k>");
            CornerRef c;
            c.polygon = toks[1].substr(0, d);
            std::string idx = toks[1].substr(d + 2);
            auto res = std::from_chars(idx.data(), idx.data() + idx.size(), c.vertex);
            if (res.ec != std::errc() || res.ptr != idx.data() + idx.size())
                syntax_error(lineno, "bad vertex index '" + idx + "'");
            const Polygon* p = s.find_polygon(c.polygon);
            if (!p || c.vertex < 0 || c.vertex >= p->size())
                throw Error(ErrorCode::UnknownEdge,
                            "line " + std::to_string(lineno) + ": no vertex " + toks[1]);
            s.marked.insert(c);
        } else if (toks[0] == "option") {
            if (toks.size() == 2 && toks[1] == "allow-disconnected")
                s.allow_disconnected = true;
            else
                syntax_error(lineno, "unknown option");
        } else {
            syntax_error(lineno, "unknown directive '" + toks[0] + "'");
        }
    }
    if (!header_seen) syntax_error(1, "empty input, expected header 'flatsurf v1'");
    return s;
}

std::string serialize_surface(const FlatSurface& s) {
    std::ostringstream os;
    os << "flatsurf v1\n";
    if (s.allow_disconnected) os << "option allow-disconnected\n";

    std::vector<const Polygon*> polys;
    for (const auto& p : s.polygons) polys.push_back(&p);
    std::sort(polys.begin(), polys.end(),
              [](const Polygon* a, const Polygon* b) { return a->id < b->id; });
    for (const Polygon* p : polys) {
        os << "polygon " << p->id;
        for (const auto& v : p->vertices) os << " " << format_double(v.x) << "," << format_double(v.y);
        os << "\n";
    }

    std::vector<Gluing> gl = s.gluings;
    for (auto& g : gl)
        if (g.b < g.a) std::swap(g.a, g.b);
    std::sort(gl.begin(), gl.end(), [](const Gluing& x, const Gluing& y) {
        if (!(x.a == y.a)) return x.a < y.a;
        return x.b < y.b;
    });
    for (const auto& g : gl)
        os << "glue " << g.a.polygon << "." << g.a.edge << " " << g.b.polygon << "." << g.b.edge
           << " " << (g.kind == GluingKind::Translation ? "T" : "F") << "\n";

    // one canonical representative per marked class
    if (!s.marked.empty()) {
        std::set<CornerRef> reps;
        auto classes = cone_points(s);
        for (const auto& cp : classes)
            if (cp.marked) reps.insert(*std::min_element(cp.corners.begin(), cp.corners.end()));
        for (const auto& c : reps) os << "marked " << c.polygon << ".v" << c.vertex << "\n";
    }
    return os.str();
}

FlatSurface gen_torus(double slope) {
    if (!std::isfinite(slope)) throw Error(ErrorCode::BadParams, "torus slope must be finite");
    FlatSurface s;
    Polygon p;
    p.id = "sq";
    p.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    s.polygons.push_back(p);
    s.gluings.push_back({{"sq", 0}, {"sq", 2}, GluingKind::Translation});
    s.gluings.push_back({{"sq", 1}, {"sq", 3}, GluingKind::Translation});
    s.marked.insert({"sq", 0});
    if (slope != 0.0) {
        // rotate so direction (1, slope) becomes horizontal
        double n = std::sqrt(1.0 + slope * slope);
        Mat2 r{1.0 / n, slope / n, -slope / n, 1.0 / n};
        s = apply_matrix(s, r);
    }
    return s;
}

FlatSurface gen_pillowcase() {
    FlatSurface s;
    Polygon a, b;
    a.id = "a";
    a.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    b.id = "b";
    b.vertices = {{1, 0}, {2, 0}, {2, 1}, {1, 1}};
    s.polygons = {a, b};
    s.gluings.push_back({{"a", 0}, {"b", 0}, GluingKind::Flip});
    s.gluings.push_back({{"a", 2}, {"b", 2}, GluingKind::Flip});
    s.gluings.push_back({{"a", 1}, {"b", 3}, GluingKind::Translation});
    s.gluings.push_back({{"a", 3}, {"b", 1}, GluingKind::Translation});
    return s;
}

FlatSurface gen_lshape(double a, double b) {
    if (!(a > 1 && b > 1)) throw Error(ErrorCode::BadParams, "lshape needs A > 1 and B > 1");
    // L with horizontal arm [0,a]x[0,1] and vertical arm [0,1]x[0,b],
    // opposite sides glued by translation; single cone point of angle 6pi.
    FlatSurface s;
    Polygon p;
    p.id = "L";
    p.vertices = {{0, 0}, {1, 0}, {a, 0}, {a, 1}, {1, 1}, {1, b}, {0, b}, {0, 1}};
    s.polygons.push_back(p);
    s.gluings.push_back({{"L", 0}, {"L", 5}, GluingKind::Translation});
    s.gluings.push_back({{"L", 1}, {"L", 3}, GluingKind::Translation});
    s.gluings.push_back({{"L", 2}, {"L", 7}, GluingKind::Translation});
    s.gluings.push_back({{"L", 4}, {"L", 6}, GluingKind::Translation});
    return s;
}

FlatSurface gen_regular_2ngon(int n) {
    if (n < 2) throw Error(ErrorCode::BadParams, "regular-2ngon needs N >= 2");
    int m = 2 * n;
    FlatSurface s;
    Polygon p;
    p.id = "gon";
    for (int k = 0; k < m; ++k) {
        double th = 2.0 * kPi * (k + 0.5) / m;  // unit circumradius, edge 0 "at the bottom"
        p.vertices.push_back({std::cos(th), std::sin(th)});
    }
    s.polygons.push_back(p);
    for (int k = 0; k < n; ++k)
        s.gluings.push_back({{"gon", k}, {"gon", k + n}, GluingKind::Translation});
    // mark any regular (angle 2pi) classes so they stay visible to the
    // geodesic machinery
    FlatSurface tmp = s;
    for (const auto& cp : cone_points(tmp))
        if (cp.order_k == 0) s.marked.insert(cp.corners.front());
    return s;
}

FlatSurface gen_torus_cover(int k) {
    if (k < 1) throw Error(ErrorCode::BadParams, "torus-cover needs K >= 1");
    FlatSurface s;
    for (int i = 0; i < k; ++i) {
        Polygon p;
        p.id = "c" + std::to_string(i);
        double x = i;
        p.vertices = {{x, 0}, {x + 1, 0}, {x + 1, 1}, {x, 1}};
        s.polygons.push_back(p);
        s.marked.insert({p.id, 0});
    }
    for (int i = 0; i < k; ++i) {
        std::string cur = "c" + std::to_string(i);
        std::string next = "c" + std::to_string((i + 1) % k);
        s.gluings.push_back({{cur, 0}, {cur, 2}, GluingKind::Translation});
        s.gluings.push_back({{cur, 1}, {next, 3}, GluingKind::Translation});
    }
    return s;
}

FlatSurface generate(const std::string& name, const std::vector<double>& params) {
    auto want = [&](size_t n) {
        if (params.size() != n)
            throw Error(ErrorCode::BadParams,
                        name + " takes " + std::to_string(n) + " parameter(s)");
    };
    if (name == "torus") {
        want(1);
        return gen_torus(params[0]);
    }
    if (name == "pillowcase") {
        want(0);
        return gen_pillowcase();
    }
    if (name == "lshape") {
        want(2);
        return gen_lshape(params[0], params[1]);
    }
    if (name == "regular-2ngon") {
        want(1);
        double n = params[0];
        if (n != std::floor(n)) throw Error(ErrorCode::BadParams, "N must be an integer");
        return gen_regular_2ngon(static_cast<int>(n));
    }
    if (name == "torus-cover") {
        want(1);
        double k = params[0];
        if (k != std::floor(k)) throw Error(ErrorCode::BadParams, "K must be an integer");
        return gen_torus_cover(static_cast<int>(k));
    }
    throw Error(ErrorCode::BadParams, "unknown generator '" + name + "'");
}

}  // namespace flatsurf
