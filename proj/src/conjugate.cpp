#include "limitends/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <unordered_map>

#include "limitends/errors.hpp"

namespace limitends {

namespace {

struct TriData {
    double qx = 0.0;  // grad u / W
    double qy = 0.0;
    double nu = 1.0;
};

TriData tri_data(const TriMesh& mesh, const std::vector<double>& u, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const HPoint& a = mesh.points[tri[0]];
    const HPoint& b = mesh.points[tri[1]];
    const HPoint& c = mesh.points[tri[2]];
    // Solve [b-a; c-a] g = [u_b - u_a; u_c - u_a].
    const double e1x = b.x - a.x, e1y = b.y - a.y;
    const double e2x = c.x - a.x, e2y = c.y - a.y;
    const double d1 = u[tri[1]] - u[tri[0]];
    const double d2 = u[tri[2]] - u[tri[0]];
    const double det = e1x * e2y - e1y * e2x;
    const double gx = (d1 * e2y - d2 * e1y) / det;
    const double gy = (e1x * d2 - e2x * d1) / det;
    const double y = (a.y + b.y + c.y) / 3.0;
    const double hyp2 = y * y * (gx * gx + gy * gy);
    TriData out;
    out.nu = 1.0 / std::sqrt(1.0 + hyp2);
    out.qx = gx * out.nu;
    out.qy = gy * out.nu;
    return out;
}

// Increment of h* from p to q inside a triangle: flux of q_T to the right of p -> q.
double increment(const TriData& d, const HPoint& p, const HPoint& q) {
    return d.qx * (q.y - p.y) - d.qy * (q.x - p.x);
}

HPoint midpoint(const HPoint& a, const HPoint& b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

std::uint64_t key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

}  // namespace

std::vector<double> angle_function(const Solution& sol) {
    const TriMesh& mesh = *sol.mesh;
    std::vector<double> nu(mesh.triangles.size());
    for (std::size_t t = 0; t < nu.size(); ++t) nu[t] = tri_data(mesh, sol.values, t).nu;
    return nu;
}

ConjugateDiagnostics conjugate_height(const Solution& sol) {
    const TriMesh& mesh = *sol.mesh;
    const std::size_t nt = mesh.triangles.size();
    ConjugateDiagnostics d;
    std::unordered_map<std::uint64_t, int> edge_id;
    std::vector<std::array<int, 3>> tri_edges(nt);
    std::vector<TriData> data(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        data[t] = tri_data(mesh, sol.values, t);
        d.nu.push_back(data[t].nu);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
            auto [it, fresh] = edge_id.try_emplace(key(a, b), static_cast<int>(d.edges.size()));
            if (fresh) d.edges.push_back({a, b});
            tri_edges[t][i] = it->second;  // edge opposite local vertex i
        }
    }
    const long chi = static_cast<long>(mesh.points.size()) - static_cast<long>(d.edges.size()) + static_cast<long>(nt);
    if (chi != 1) throw MeshNotSimplyConnected("Euler characteristic " + std::to_string(chi));

    // Links of the midpoint graph: the three pairs of edges of each triangle.
    struct Link {
        int to;
        int tri;
    };
    std::vector<std::vector<Link>> adj(d.edges.size());
    for (std::size_t t = 0; t < nt; ++t) {
        for (int i = 0; i < 3; ++i) {
            const int e = tri_edges[t][i], f = tri_edges[t][(i + 1) % 3];
            adj[e].push_back({f, static_cast<int>(t)});
            adj[f].push_back({e, static_cast<int>(t)});
        }
    }
    auto mid = [&](int e) { return midpoint(mesh.points[d.edges[e][0]], mesh.points[d.edges[e][1]]); };
    constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
    d.h_star_edge.assign(d.edges.size(), kUnset);
    std::deque<int> queue;
    if (!d.edges.empty()) {
        d.h_star_edge[0] = 0.0;
        queue.push_back(0);
    }
    while (!queue.empty()) {
        const int e = queue.front();
        queue.pop_front();
        for (const auto& l : adj[e]) {
            if (!std::isnan(d.h_star_edge[l.to])) continue;
            d.h_star_edge[l.to] = d.h_star_edge[e] + increment(data[l.tri], mid(e), mid(l.to));
            queue.push_back(l.to);
        }
    }
    // Tree links have zero holonomy by construction; each remaining link closes one cycle.
    for (std::size_t t = 0; t < nt; ++t) {
        for (int i = 0; i < 3; ++i) {
            const int e = tri_edges[t][i], f = tri_edges[t][(i + 1) % 3];
            const double hol = d.h_star_edge[e] + increment(data[t], mid(e), mid(f)) - d.h_star_edge[f];
            d.loop_defect = std::max(d.loop_defect, std::abs(hol));
            d.loop_defect_sum += std::abs(hol);
        }
    }
    d.cycles = 3 * nt - (d.edges.size() - 1);

    // Vertex values: extend from an incident edge midpoint inside the first incident triangle.
    d.h_star.assign(mesh.points.size(), kUnset);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int v = tri[i];
            if (!std::isnan(d.h_star[v])) continue;
            const int e = tri_edges[t][(i + 1) % 3];  // an edge containing v
            d.h_star[v] = d.h_star_edge[e] + increment(data[t], mid(e), mesh.points[v]);
        }
    }

    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    for (const auto& be : mesh.boundary_edges) {
        const double h = d.h_star_edge[edge_id.at(key(be[0], be[1]))];
        bmin = std::min(bmin, h);
        bmax = std::max(bmax, h);
    }
    if (!mesh.boundary_edges.empty()) d.boundary_variation.push_back(bmax - bmin);
    return d;
}

double conjugate_at(const ConjugateDiagnostics& diag, const Solution& sol, const HPoint& p) {
    const TriMesh& mesh = *sol.mesh;
    const int t = mesh.locate(p);
    if (t < 0) throw CurveOutsideDomain("point outside the mesh");
    const auto& tri = mesh.triangles[t];
    const int a = tri[0], b = tri[1];
    std::size_t e = 0;
    while (key(diag.edges[e][0], diag.edges[e][1]) != key(a, b)) ++e;
    const HPoint m = midpoint(mesh.points[a], mesh.points[b]);
    return diag.h_star_edge[e] + increment(tri_data(mesh, sol.values, t), m, p);
}

std::vector<FlatnessArc> boundary_flatness(const ConjugateDiagnostics& diag, const TruncatedProblem& problem,
                                           const Solution& sol, double radius) {
    const TriMesh& mesh = *problem.mesh;
    std::unordered_map<std::uint64_t, int> edge_id;
    for (std::size_t e = 0; e < diag.edges.size(); ++e) edge_id[key(diag.edges[e][0], diag.edges[e][1])] = static_cast<int>(e);
    std::vector<FlatnessArc> out;
    for (std::size_t v = 0; v < problem.polygon.size(); ++v) {
        const Vertex& pv = problem.polygon.vertices[v];
        if (pv.is_ideal()) continue;
        const HPoint c = pv.point();
        FlatnessArc arc;
        arc.polygon_vertex = static_cast<int>(v);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& s : problem.segments) {
            const HPoint& a = mesh.points[s.a];
            const HPoint& b = mesh.points[s.b];
            if (dist(midpoint(a, b), c) > radius) continue;
            const double h = diag.h_star_edge[edge_id.at(key(s.a, s.b))];
            lo = std::min(lo, h);
            hi = std::max(hi, h);
            const double flat = euclidean_segment_length(a, b);
            const double du = sol.values[s.b] - sol.values[s.a];
            arc.surface_length += std::sqrt(flat * flat + du * du);
            ++arc.samples;
        }
        if (arc.samples == 0) continue;
        arc.variation = hi - lo;
        arc.normalized = arc.surface_length > 0.0 ? arc.variation / arc.surface_length : 0.0;
        out.push_back(arc);
    }
    return out;
}

}  // namespace limitends
