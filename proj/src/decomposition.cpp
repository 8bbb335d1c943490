#include "flatsurf/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace flatsurf {

namespace {

struct Graph {
    std::vector<Vec2> pos;  // chart position within its triangle
    std::vector<int> tri;
    std::vector<double> clearance;
    std::vector<std::vector<std::pair<int, double>>> adj;  // (node, length)
    double h_eff = 0;

    void add_edge(int a, int b, double len) {
        adj[a].push_back({b, len});
        adj[b].push_back({a, len});
        h_eff = std::max(h_eff, len);
    }
};

int uf_find(std::vector<int>& p, int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
}

}  // namespace

Decomposition thick_thin_decomposition(const TriSurface& ts, double eps, double h,
                                       bool marked_as_singular, long long node_budget) {
    if (!(eps > 0) || !(h > 0))
        throw Error(ErrorCode::BadParams, "decomposition needs eps > 0 and h > 0");

    double total_area = ts.area();
    int ntri = static_cast<int>(ts.tris.size());

    // per-triangle resolution: coarse background, fine near the eps level set
    double h_coarse = std::max(h, std::sqrt(total_area) / 40.0);
    std::vector<double> target(ntri);
    for (int t = 0; t < ntri; ++t) {
        const Triangle& T = ts.tris[t];
        double e_t = 0;
        for (int s = 0; s < 3; ++s) e_t = std::max(e_t, T.side_vec(s).norm());
        double cmin = std::numeric_limits<double>::infinity(), cmax = 0;
        for (int k = 0; k < 3; ++k) {
            double d = ts.distance_to_sigma({t, T.v[k]}, eps + e_t + 1e-9, marked_as_singular);
            cmin = std::min(cmin, d);
            cmax = std::max(cmax, d);
        }
        bool straddle = (cmin - e_t <= eps) && (cmax + e_t >= eps);
        target[t] = straddle ? h : h_coarse;
    }

    std::vector<int> level(ntri);
    for (int round = 0; round < 64; ++round) {
        long long nodes = 0;
        for (int t = 0; t < ntri; ++t) {
            double e_t = 0;
            for (int s = 0; s < 3; ++s) e_t = std::max(e_t, ts.tris[t].side_vec(s).norm());
            int k = std::max(1, (int)std::ceil(e_t / target[t]));
            level[t] = k;
            nodes += (long long)(k + 1) * (k + 2) / 2;
        }
        if (nodes <= node_budget) break;
        for (int t = 0; t < ntri; ++t) target[t] *= 1.3;
    }

    // barycentric lattice nodes
    Graph g;
    std::vector<std::vector<int>> node_of(ntri);
    auto idx_of = [&](int t, int i, int j) {
        int k = level[t];
        int base = 0;
        for (int r = 0; r < i; ++r) base += k + 1 - r;
        return node_of[t][base + j];
    };
    for (int t = 0; t < ntri; ++t) {
        int k = level[t];
        const Triangle& T = ts.tris[t];
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k - i; ++j) {
                Vec2 p = T.v[0] + (double(i) / k) * (T.v[1] - T.v[0]) +
                         (double(j) / k) * (T.v[2] - T.v[0]);
                node_of[t].push_back((int)g.pos.size());
                g.pos.push_back(p);
                g.tri.push_back(t);
            }
    }
    g.adj.resize(g.pos.size());
    g.clearance.resize(g.pos.size());

    for (int t = 0; t < ntri; ++t) {
        int k = level[t];
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k - i; ++j) {
                int a = idx_of(t, i, j);
                if (j + 1 <= k - i)
                    g.add_edge(a, idx_of(t, i, j + 1), dist(g.pos[a], g.pos[idx_of(t, i, j + 1)]));
                if (i + 1 <= k && j <= k - i - 1)
                    g.add_edge(a, idx_of(t, i + 1, j), dist(g.pos[a], g.pos[idx_of(t, i + 1, j)]));
                if (i + 1 <= k && j >= 1)
                    g.add_edge(a, idx_of(t, i + 1, j - 1),
                               dist(g.pos[a], g.pos[idx_of(t, i + 1, j - 1)]));
            }
    }

    // stitch glued sides: connect side nodes to the bracketing partner nodes
    auto side_nodes = [&](int t, int s) {
        std::vector<int> v;
        int k = level[t];
        for (int m = 0; m <= k; ++m) {
            int i, j;
            if (s == 0) {
                i = m;
                j = 0;
            } else if (s == 1) {
                i = k - m;
                j = m;
            } else {
                i = 0;
                j = k - m;
            }
            v.push_back(idx_of(t, i, j));
        }
        return v;
    };
    std::set<std::pair<int, int>> done;
    for (int t = 0; t < ntri; ++t)
        for (int s = 0; s < 3; ++s) {
            SideRef o = ts.tris[t].opp[s];
            int a_key = t * 3 + s, b_key = o.tri * 3 + o.side;
            if (!done.insert({std::min(a_key, b_key), std::max(a_key, b_key)}).second) continue;
            auto va = side_nodes(t, s);
            auto vb = side_nodes(o.tri, o.side);
            Transition phi = ts.transition_into(o.tri, o.side);  // t chart -> partner chart
            int kb = level[o.tri];
            const Triangle& TB = ts.tris[o.tri];
            Vec2 A = TB.side_start(o.side);
            Vec2 evec = TB.side_vec(o.side);
            for (size_t m = 0; m < va.size(); ++m) {
                Vec2 mapped = phi.apply(g.pos[va[m]]);
                double u = dot(mapped - A, evec) / evec.norm2();
                int lo = std::max(0, std::min(kb, (int)std::floor(u * kb)));
                int hi = std::min(kb, lo + 1);
                for (int mb : {lo, hi}) {
                    double len = dist(mapped, g.pos[vb[mb]]);
                    g.add_edge(va[m], vb[mb], len < 1e-12 ? 0.0 : len);
                }
            }
        }

    // exact clearances, capped just above eps
    double cap = eps + std::max(h, 1e-6);
    for (size_t n = 0; n < g.pos.size(); ++n)
        g.clearance[n] = ts.distance_to_sigma({g.tri[n], g.pos[n]}, cap, marked_as_singular);

    // thick components
    int N = (int)g.pos.size();
    std::vector<int> parent(N);
    for (int i = 0; i < N; ++i) parent[i] = i;
    for (int a = 0; a < N; ++a) {
        if (g.clearance[a] < eps) continue;
        for (auto& [b, len] : g.adj[a]) {
            (void)len;
            if (g.clearance[b] >= eps) parent[uf_find(parent, a)] = uf_find(parent, b);
        }
    }
    std::map<int, int> comp_id;
    std::vector<int> comp_of(N, -1);
    for (int i = 0; i < N; ++i) {
        if (g.clearance[i] < eps) continue;
        int r = uf_find(parent, i);
        if (!comp_id.count(r)) comp_id[r] = (int)comp_id.size();
        comp_of[i] = comp_id[r];
    }
    int C = (int)comp_id.size();
    if (C == 0)
        throw Error(ErrorCode::ResolutionTooCoarse,
                    "thick part is empty at eps = " + std::to_string(eps));
    std::vector<std::vector<int>> comp_nodes(C);
    for (int i = 0; i < N; ++i)
        if (comp_of[i] >= 0) comp_nodes[comp_of[i]].push_back(i);
    for (int ci = 0; ci < C; ++ci)
        if ((int)comp_nodes[ci].size() < 3)
            throw Error(ErrorCode::ResolutionTooCoarse,
                        "component with fewer than 3 nodes; decrease h");

    // removed area from lattice cells weighted by their thin corners
    double removed = 0;
    for (int t = 0; t < ntri; ++t) {
        int k = level[t];
        double cell_area = ts.tris[t].area() / (k * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k - i; ++j) {
                int a = idx_of(t, i, j), b = idx_of(t, i + 1, j), c = idx_of(t, i, j + 1);
                int thin = (g.clearance[a] < eps) + (g.clearance[b] < eps) +
                           (g.clearance[c] < eps);
                removed += cell_area * thin / 3.0;
                if (j < k - i - 1) {
                    int d = idx_of(t, i + 1, j + 1);
                    int thin2 = (g.clearance[b] < eps) + (g.clearance[c] < eps) +
                                (g.clearance[d] < eps);
                    removed += cell_area * thin2 / 3.0;
                }
            }
    }

    auto dijkstra = [&](int src, const std::vector<char>& allowed, std::vector<double>& dist_out) {
        dist_out.assign(N, std::numeric_limits<double>::infinity());
        std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                            std::greater<>>
            pq;
        dist_out[src] = 0;
        pq.push({0, src});
        while (!pq.empty()) {
            auto [d, a] = pq.top();
            pq.pop();
            if (d > dist_out[a]) continue;
            for (auto& [b, len] : g.adj[a]) {
                if (!allowed[b]) continue;
                if (d + len < dist_out[b] - 1e-15) {
                    dist_out[b] = d + len;
                    pq.push({dist_out[b], b});
                }
            }
        }
    };

    Decomposition out;
    out.epsilon = eps;
    out.C = C;
    out.removed_area = removed;
    out.h_effective = g.h_eff;
    for (int ci = 0; ci < C; ++ci) {
        std::vector<char> allowed(N, 0);
        for (int n : comp_nodes[ci]) allowed[n] = 1;

        // component area from the node share of each triangle
        std::map<int, std::pair<int, int>> per_tri;  // tri -> (nodes in comp, nodes total)
        for (int n = 0; n < N; ++n) {
            auto& pr = per_tri[g.tri[n]];
            pr.second++;
            if (comp_of[n] == ci) pr.first++;
        }
        double carea = 0;
        for (auto& [t, pr] : per_tri)
            carea += ts.tris[t].area() * pr.first / std::max(1, pr.second);

        double diam = 0;
        std::vector<double> dvec;
        const auto& nodes = comp_nodes[ci];
        if (nodes.size() <= 1200) {
            for (int n : nodes) {
                dijkstra(n, allowed, dvec);
                for (int m : nodes)
                    if (std::isfinite(dvec[m])) diam = std::max(diam, dvec[m]);
            }
        } else {
            int cur = nodes[0];
            for (int sweep = 0; sweep < 8; ++sweep) {
                dijkstra(cur, allowed, dvec);
                int far = cur;
                for (int m : nodes)
                    if (std::isfinite(dvec[m]) && dvec[m] > dvec[far] + 1e-15) far = m;
                diam = std::max(diam, dvec[far]);
                cur = far;
            }
        }
        out.components.push_back({ci, carea, diam + 2 * g.h_eff});
    }

    // delta: maximin clearance over paths between distinct components
    if (C <= 1) {
        out.delta = std::numeric_limits<double>::infinity();
    } else {
        double delta = std::numeric_limits<double>::infinity();
        for (int ci = 0; ci < C; ++ci) {
            std::vector<double> width(N, -1);
            std::priority_queue<std::pair<double, int>> pq;
            for (int n : comp_nodes[ci]) {
                width[n] = g.clearance[n];
                pq.push({width[n], n});
            }
            while (!pq.empty()) {
                auto [w, a] = pq.top();
                pq.pop();
                if (w < width[a]) continue;
                for (auto& [b, len] : g.adj[a]) {
                    (void)len;
                    double w2 = std::min(w, g.clearance[b]);
                    if (w2 > width[b]) {
                        width[b] = w2;
                        pq.push({w2, b});
                    }
                }
            }
            for (int cj = 0; cj < C; ++cj) {
                if (cj == ci) continue;
                double best = -1;
                for (int n : comp_nodes[cj]) best = std::max(best, width[n]);
                if (best >= 0) delta = std::min(delta, best);
            }
        }
        out.delta = delta;
    }
    return out;
}

Decomposition thick_thin_decomposition(const FlatSurface& s, double eps, double h,
                                       bool marked_as_singular, long long node_budget) {
    return thick_thin_decomposition(TriSurface(s), eps, h, marked_as_singular, node_budget);
}

}  // namespace flatsurf
