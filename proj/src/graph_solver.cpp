#include "limitends/graph_solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "limitends/errors.hpp"
#include "limitends/jenkins.hpp"
#include "limitends/mesher.hpp"

namespace limitends {

namespace {

using Piece = BoundaryTag::Piece;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-triangle constants of the P1 discretization.
struct TriGeom {
    double area = 0.0;
    double yc = 0.0;
    std::array<std::array<double, 2>, 3> grad{};  // gradients of the hat functions
};

std::vector<TriGeom> triangle_geometry(const TriMesh& mesh) {
    std::vector<TriGeom> out(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const HPoint& a = mesh.points[tri[0]];
        const HPoint& b = mesh.points[tri[1]];
        const HPoint& c = mesh.points[tri[2]];
        const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        TriGeom& g = out[t];
        g.area = 0.5 * det;
        g.yc = (a.y + b.y + c.y) / 3.0;
        const std::array<const HPoint*, 3> p{&a, &b, &c};
        for (int i = 0; i < 3; ++i) {
            const HPoint& q = *p[(i + 1) % 3];
            const HPoint& r = *p[(i + 2) % 3];
            g.grad[i] = {(q.y - r.y) / det, (r.x - q.x) / det};
        }
    }
    return out;
}

std::array<double, 2> tri_gradient(const TriMesh& mesh, const TriGeom& g, std::size_t t,
                                   const std::vector<double>& u) {
    const auto& tri = mesh.triangles[t];
    // Differences against vertex 0 so constants give an exactly zero gradient.
    const double d1 = u[tri[1]] - u[tri[0]], d2 = u[tri[2]] - u[tri[0]];
    return {d1 * g.grad[1][0] + d2 * g.grad[2][0], d1 * g.grad[1][1] + d2 * g.grad[2][1]};
}

double energy_with(const TriMesh& mesh, const std::vector<TriGeom>& geom, const std::vector<double>& u) {
    double e = 0.0;
    for (std::size_t t = 0; t < geom.size(); ++t) {
        const auto g = tri_gradient(mesh, geom[t], t, u);
        const double y2 = geom[t].yc * geom[t].yc;
        e += geom[t].area * std::sqrt(1.0 + y2 * (g[0] * g[0] + g[1] * g[1])) / y2;
    }
    return e;
}

std::vector<double> gradient_with(const TriMesh& mesh, const std::vector<TriGeom>& geom,
                                  const std::vector<double>& u) {
    std::vector<double> r(mesh.points.size(), 0.0);
    for (std::size_t t = 0; t < geom.size(); ++t) {
        const auto g = tri_gradient(mesh, geom[t], t, u);
        const double y2 = geom[t].yc * geom[t].yc;
        const double w = std::sqrt(1.0 + y2 * (g[0] * g[0] + g[1] * g[1]));
        const double qx = g[0] / w, qy = g[1] / w;
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            r[tri[i]] += geom[t].area * (qx * geom[t].grad[i][0] + qy * geom[t].grad[i][1]);
        }
    }
    return r;
}

double hat_value(double t0, double t1, double t) { return (t - t0) / (t1 - t0); }

double blend_value(const BoundaryCurve& c, double t, ArcBlend blend) {
    if (c.start_value == c.end_value) return c.start_value;
    const double s = blend == ArcBlend::Linear ? t : 0.5 * (1.0 - std::cos(std::numbers::pi * t));
    return c.start_value + (c.end_value - c.start_value) * s;
}

void assign_dirichlet(TruncatedProblem& p, double M, ArcBlend blend) {
    const std::size_t nc = p.curves.size();
    for (auto& c : p.curves) {
        switch (c.piece) {
            case Piece::AEdge: c.start_value = c.end_value = M; break;
            case Piece::BEdge: c.start_value = c.end_value = -M; break;
            case Piece::Arc: c.start_value = -M; c.end_value = M; break;
            default: break;
        }
    }
    p.params.M = M;
    p.params.blend = blend;
    p.dirichlet.assign(p.mesh->points.size(), kNaN);
    for (std::size_t v = 0; v < p.mesh->points.size(); ++v) {
        const auto& tag = p.provenance[v];
        if (!tag) continue;
        if (tag->piece == Piece::Corner) {
            // tag->t holds the index of the curve leaving this corner.
            const auto ci = static_cast<std::size_t>(tag->t);
            const BoundaryCurve& out = p.curves[ci];
            const BoundaryCurve& in = p.curves[(ci + nc - 1) % nc];
            p.dirichlet[v] = 0.5 * (out.start_value + in.end_value);
            continue;
        }
        const BoundaryCurve* c = nullptr;
        for (const auto& cv : p.curves) {
            if (cv.piece == tag->piece && cv.index == tag->index) c = &cv;
        }
        p.dirichlet[v] = blend_value(*c, tag->t, blend);
    }
}

struct CurveBuild {
    std::vector<BoundaryCurve> curves;
    std::vector<HPoint> corners;
    std::vector<int> corner_vertex;  // polygon vertex index at each corner, or -1
};

CurveBuild boundary_curves(const SemiIdealPolygon& poly, const TruncationParams& tp, const ToleranceConfig& tol) {
    const StarCertificate cert = check_star(poly, tol);
    if (!cert.valid) throw StarViolated("polygon does not satisfy the equal-horocycle condition");
    const std::size_t nv = poly.size();
    std::vector<double> trunc_level(nv, 0.0);
    for (std::size_t i = 0; i < nv; ++i) {
        if (poly.vertices[i].is_ideal()) trunc_level[i] = cert.horocycle_of(i).level - tp.n;
    }
    CurveBuild out;
    const auto labels = poly.edge_labels();
    // Geodesic coordinates of the truncated edge endpoints.
    std::vector<std::pair<double, double>> edge_s(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const Geodesic g = poly.edge_geodesic(i);
        const Vertex& v0 = poly.vertices[i];
        const Vertex& v1 = poly.at(static_cast<std::ptrdiff_t>(i) + 1);
        const std::size_t i1 = (i + 1) % nv;
        const double s0 = v0.is_ideal() ? level_coordinate(g, v0.ideal(), trunc_level[i])
                                        : geodesic_coordinate(g, v0.point());
        const double s1 = v1.is_ideal() ? level_coordinate(g, v1.ideal(), trunc_level[i1])
                                        : geodesic_coordinate(g, v1.point());
        edge_s[i] = {s0, s1};
    }
    auto edge_point = [&](std::size_t i, bool end) {
        const std::size_t j = end ? (i + 1) % nv : i;
        const Vertex& v = poly.vertices[j];
        if (!v.is_ideal()) return v.point();
        return geodesic_point(poly.edge_geodesic(i), end ? edge_s[i].second : edge_s[i].first);
    };
    for (std::size_t i = 0; i < nv; ++i) {
        const Vertex& v = poly.vertices[i];
        if (v.is_ideal()) {
            const std::size_t prev = (i + nv - 1) % nv;
            const HPoint pa = edge_point(prev, true);
            const HPoint pb = edge_point(i, false);
            const Horocycle hc = horocycle_at_level(v.ideal(), trunc_level[i]);
            const double ta = horocycle_parameter(hc, pa);
            const double tb = horocycle_parameter(hc, pb);
            BoundaryCurve c;
            c.piece = Piece::Arc;
            c.index = static_cast<int>(i);
            c.hyp_length = std::abs(tb - ta);
            c.eval = [hc, ta, tb, pa, pb](double t) {
                if (t <= 0.0) return pa;
                if (t >= 1.0) return pb;
                return horocycle_point(hc, ta + t * (tb - ta));
            };
            out.curves.push_back(std::move(c));
            out.corners.push_back(pa);
            out.corner_vertex.push_back(-1);
        }
        const Geodesic g = poly.edge_geodesic(i);
        const auto [s0, s1] = edge_s[i];
        if (!(s1 > s0 || s1 < s0)) throw InvalidParams("degenerate truncated edge");
        const HPoint pa = edge_point(i, false);
        const HPoint pb = edge_point(i, true);
        BoundaryCurve c;
        c.piece = labels[i] == EdgeLabel::A ? Piece::AEdge : Piece::BEdge;
        c.index = static_cast<int>(i);
        c.hyp_length = std::abs(s1 - s0);
        c.eval = [g, s0 = s0, s1 = s1, pa, pb](double t) {
            if (t <= 0.0) return pa;
            if (t >= 1.0) return pb;
            return geodesic_point(g, s0 + t * (s1 - s0));
        };
        out.curves.push_back(std::move(c));
        out.corners.push_back(pa);
        out.corner_vertex.push_back(v.is_ideal() ? -1 : static_cast<int>(i));
    }
    return out;
}

struct Mirror {
    std::vector<std::size_t> half;  // full-loop curve indices meshed directly, in order
    std::vector<std::size_t> image; // mirror image (full-loop index) of each curve
};

Mirror mirror_plan(const CurveBuild& cb, double axis) {
    const std::size_t nc = cb.curves.size();
    Mirror m;
    m.image.assign(nc, nc);
    for (std::size_t i = 0; i < nc; ++i) {
        const HPoint p = cb.curves[i].eval(0.5);
        const HPoint r{2.0 * axis - p.x, p.y};
        for (std::size_t j = 0; j < nc; ++j) {
            const HPoint q = cb.curves[j].eval(0.5);
            if (std::hypot(q.x - r.x, q.y - r.y) <= 1e-9 * std::max(1.0, std::abs(r.y) + std::abs(r.x))) {
                m.image[i] = j;
            }
        }
        if (m.image[i] == nc) throw InvalidParams("polygon is not mirror symmetric");
    }
    std::vector<std::size_t> on_axis;
    for (std::size_t i = 0; i < nc; ++i) {
        if (std::abs(cb.corners[i].x - axis) <= 1e-12 * std::max(1.0, std::abs(axis))) on_axis.push_back(i);
    }
    if (on_axis.size() != 2) throw InvalidParams("mirror axis must pass through exactly two corners");
    std::size_t start = on_axis[0];
    if (cb.curves[start].eval(0.5).x > axis) start = on_axis[1];
    for (std::size_t i = start; !(m.half.size() > 0 && i == on_axis[0] + on_axis[1] - start); i = (i + 1) % nc) {
        if (cb.curves[i].eval(0.5).x >= axis) throw InvalidParams("half loop crosses the axis");
        m.half.push_back(i);
    }
    return m;
}

}  // namespace

std::string to_string(BoundaryTag::Piece p) {
    switch (p) {
        case Piece::AEdge: return "A";
        case Piece::BEdge: return "B";
        case Piece::Arc: return "arc";
        case Piece::Corner: return "corner";
        case Piece::Axis: return "axis";
    }
    return "?";
}

double TriMesh::triangle_area(std::size_t t) const {
    const auto& tri = triangles[t];
    const HPoint& a = points[tri[0]];
    const HPoint& b = points[tri[1]];
    const HPoint& c = points[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

HPoint TriMesh::centroid(std::size_t t) const {
    const auto& tri = triangles[t];
    return {(points[tri[0]].x + points[tri[1]].x + points[tri[2]].x) / 3.0,
            (points[tri[0]].y + points[tri[1]].y + points[tri[2]].y) / 3.0};
}

int TriMesh::locate(const HPoint& p) const {
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        bool in = true;
        for (int i = 0; i < 3 && in; ++i) {
            const HPoint& a = points[tri[i]];
            const HPoint& b = points[tri[(i + 1) % 3]];
            const double o = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            const double scale = std::abs(b.x - a.x) + std::abs(b.y - a.y);
            if (o < -1e-14 * scale * (scale + std::abs(p.x - a.x) + std::abs(p.y - a.y))) in = false;
        }
        if (in) return static_cast<int>(t);
    }
    return -1;
}

double TriMesh::diameter() const {
    if (points.empty()) return 0.0;
    double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
    for (const auto& p : points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    return std::hypot(x1 - x0, y1 - y0);
}

TruncatedProblem truncate_and_mesh(const SemiIdealPolygon& poly, const TruncationParams& tp,
                                   const ToleranceConfig& tol) {
    if (!(tp.n > 0.0) || !(tp.M >= 0.0) || !(tp.h > 0.0) || !(tp.boundary_factor > 0.0)) {
        throw InvalidParams("truncation parameters must be positive");
    }
    const CurveBuild cb = boundary_curves(poly, tp, tol);
    const std::size_t nc = cb.curves.size();

    MeshInput in;
    in.size = [h = tp.h](const HPoint& p) { return h * std::max(p.y, 0.0); };
    in.boundary_factor = tp.boundary_factor;
    in.max_vertices = tp.max_vertices;
    std::vector<std::size_t> mesh_curve;  // mesher curve -> full-loop curve (nc = axis)
    std::optional<Mirror> mirror;
    if (tp.mirror_axis) {
        mirror = mirror_plan(cb, *tp.mirror_axis);
        for (std::size_t ci : mirror->half) {
            in.corners.push_back(cb.corners[ci]);
            in.curves.push_back({cb.curves[ci].eval, 0.0, 1.0});
            mesh_curve.push_back(ci);
        }
        const HPoint lo = cb.corners[(mirror->half.back() + 1) % nc];
        const HPoint hi = in.corners.front();
        const double l0 = std::log(lo.y), l1 = std::log(hi.y);
        in.corners.push_back(lo);
        in.curves.push_back({[x = *tp.mirror_axis, l0, l1, lo, hi](double t) {
                                 if (t <= 0.0) return lo;
                                 if (t >= 1.0) return hi;
                                 return HPoint{x, std::exp(l0 + t * (l1 - l0))};
                             },
                             0.0, 1.0});
        mesh_curve.push_back(nc);
    } else {
        for (std::size_t ci = 0; ci < nc; ++ci) {
            in.corners.push_back(cb.corners[ci]);
            in.curves.push_back({cb.curves[ci].eval, 0.0, 1.0});
            mesh_curve.push_back(ci);
        }
    }
    const MeshOutput mo = mesh_domain(in);

    auto mesh = std::make_shared<TriMesh>();
    TruncatedProblem prob;
    mesh->points = mo.points;
    mesh->triangles = mo.triangles;
    mesh->min_angle_deg = mo.min_angle_deg;
    mesh->corner_triangles = mo.corner_triangles;
    std::vector<std::optional<BoundaryTag>> prov(mo.points.size());
    auto corner_tag = [&](std::size_t ci) {
        const int pv = cb.corner_vertex[ci];
        BoundaryTag tag{Piece::Corner, pv, static_cast<double>(ci)};
        if (pv < 0) tag.index = -1;
        return tag;
    };
    for (std::size_t v = 0; v < mo.points.size(); ++v) {
        const MeshVertexInfo& info = mo.info[v];
        if (info.curve < 0) continue;
        const std::size_t ci = mesh_curve[info.curve];
        if (ci == nc) {
            if (info.corner) prov[v] = corner_tag((mirror->half.back() + 1) % nc);
            continue;  // axis vertices become interior after reflection
        }
        if (info.corner) {
            prov[v] = corner_tag(ci);
        } else {
            prov[v] = BoundaryTag{cb.curves[ci].piece, cb.curves[ci].index, info.t};
        }
    }
    std::vector<BoundarySegment> segs;
    for (const auto& s : mo.segments) {
        const std::size_t ci = mesh_curve[s.curve];
        if (ci == nc) continue;
        segs.push_back({s.a, s.b, static_cast<int>(ci), s.ta, s.tb});
    }

    if (mirror) {
        const double axis = *tp.mirror_axis;
        const std::size_t n0 = mesh->points.size();
        std::vector<int> image(n0, -1);
        for (std::size_t v = 0; v < n0; ++v) {
            const HPoint& p = mesh->points[v];
            if (p.x == axis) {
                image[v] = static_cast<int>(v);
                continue;
            }
            image[v] = static_cast<int>(mesh->points.size());
            mesh->points.push_back({2.0 * axis - p.x, p.y});
            std::optional<BoundaryTag> tag;
            if (prov[v]) {
                tag = *prov[v];
                if (tag->piece == Piece::Corner) {
                    // Corner leaving curve ci maps to the corner entering image(ci).
                    const auto ci = static_cast<std::size_t>(tag->t);
                    const std::size_t cj = (mirror->image[ci] + 1) % nc;
                    tag = corner_tag(cj);
                } else {
                    std::size_t ci = 0;
                    while (!(cb.curves[ci].piece == tag->piece && cb.curves[ci].index == tag->index)) ++ci;
                    const std::size_t cj = mirror->image[ci];
                    tag = BoundaryTag{cb.curves[cj].piece, cb.curves[cj].index, 1.0 - tag->t};
                }
            }
            prov.push_back(tag);
        }
        const std::size_t nt = mesh->triangles.size();
        for (std::size_t t = 0; t < nt; ++t) {
            const auto tri = mesh->triangles[t];
            mesh->triangles.push_back({image[tri[0]], image[tri[2]], image[tri[1]]});
        }
        const std::size_t ns = segs.size();
        for (std::size_t s = 0; s < ns; ++s) {
            const auto seg = segs[s];
            const std::size_t cj = mirror->image[seg.curve];
            segs.push_back({image[seg.b], image[seg.a], static_cast<int>(cj), 1.0 - seg.tb, 1.0 - seg.ta});
        }
    }

    mesh->on_boundary.assign(mesh->points.size(), 0);
    for (const auto& s : segs) {
        mesh->boundary_edges.push_back({s.a, s.b});
        mesh->on_boundary[s.a] = mesh->on_boundary[s.b] = 1;
    }
    for (std::size_t v = 0; v < mesh->points.size(); ++v) {
        if (!mesh->on_boundary[v]) prov[v].reset();
        if (mesh->on_boundary[v] && !prov[v]) throw MeshFailure("boundary vertex without provenance");
    }
    prob.mesh = mesh;
    prob.segments = std::move(segs);
    prob.provenance = std::move(prov);
    prob.curves = cb.curves;
    prob.polygon = poly;
    prob.params = tp;
    assign_dirichlet(prob, tp.M, tp.blend);
    return prob;
}

TruncatedProblem with_constant_data(const TruncatedProblem& problem, double value) {
    TruncatedProblem p = problem;
    for (std::size_t v = 0; v < p.dirichlet.size(); ++v) {
        if (p.is_fixed(v)) p.dirichlet[v] = value;
    }
    for (auto& c : p.curves) c.start_value = c.end_value = value;
    return p;
}

TruncatedProblem with_cap(const TruncatedProblem& problem, double M, std::optional<ArcBlend> blend) {
    TruncatedProblem p = problem;
    assign_dirichlet(p, M, blend.value_or(problem.params.blend));
    return p;
}

SemiIdealPolygon symmetric_quadrilateral(double a) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidParams("need 0 < a < 1");
    SemiIdealPolygon poly;
    poly.vertices.push_back({IdealPoint::finite(-1.0), {VertexTag::Kind::P, 1, -1}});
    poly.vertices.push_back({HPoint{0.0, a}, {VertexTag::Kind::Q, 1, 0}});
    poly.vertices.push_back({IdealPoint::finite(1.0), {VertexTag::Kind::P, 1, 1}});
    poly.vertices.push_back({HPoint{0.0, 1.0 / a}, {VertexTag::Kind::Q, 1, 2}});
    return poly;
}

std::array<double, 2> Solution::gradient(std::size_t t) const {
    const auto& tri = mesh->triangles[t];
    const HPoint& a = mesh->points[tri[0]];
    const HPoint& b = mesh->points[tri[1]];
    const HPoint& c = mesh->points[tri[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double du1 = values[tri[1]] - values[tri[0]];
    const double du2 = values[tri[2]] - values[tri[0]];
    return {(du1 * (c.y - a.y) - du2 * (b.y - a.y)) / det, (du2 * (b.x - a.x) - du1 * (c.x - a.x)) / det};
}

std::optional<double> Solution::value_at(const HPoint& p) const {
    const int t = mesh->locate(p);
    if (t < 0) return std::nullopt;
    const auto& tri = mesh->triangles[t];
    const HPoint& a = mesh->points[tri[0]];
    const HPoint& b = mesh->points[tri[1]];
    const HPoint& c = mesh->points[tri[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double l1 = ((p.x - a.x) * (c.y - a.y) - (p.y - a.y) * (c.x - a.x)) / det;
    const double l2 = ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / det;
    return (1.0 - l1 - l2) * values[tri[0]] + l1 * values[tri[1]] + l2 * values[tri[2]];
}

double graph_energy(const TriMesh& mesh, const std::vector<double>& u) {
    return energy_with(mesh, triangle_geometry(mesh), u);
}

std::vector<double> graph_energy_gradient(const TriMesh& mesh, const std::vector<double>& u) {
    return gradient_with(mesh, triangle_geometry(mesh), u);
}

std::vector<double> gradient_weights(const TriMesh& mesh, const std::vector<double>& u) {
    const auto geom = triangle_geometry(mesh);
    std::vector<double> w(geom.size());
    for (std::size_t t = 0; t < geom.size(); ++t) {
        const auto g = tri_gradient(mesh, geom[t], t, u);
        w[t] = std::sqrt(1.0 + geom[t].yc * geom[t].yc * (g[0] * g[0] + g[1] * g[1]));
    }
    return w;
}

namespace {

struct FreeMap {
    std::vector<int> index;  // vertex -> free index or -1
    int count = 0;
};

FreeMap free_map(const TruncatedProblem& p) {
    FreeMap m;
    m.index.assign(p.mesh->points.size(), -1);
    for (std::size_t v = 0; v < m.index.size(); ++v) {
        if (!p.is_fixed(v)) m.index[v] = m.count++;
    }
    return m;
}

// Sparse matrix of sum_T area * grad(phi_i)^T K_T grad(phi_j) restricted to free
// vertices, with the fixed-column contribution moved to `rhs`.
template <class Kernel>
Eigen::SparseMatrix<double> assemble(const TriMesh& mesh, const std::vector<TriGeom>& geom, const FreeMap& fm,
                                     Kernel kernel) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(geom.size() * 9);
    for (std::size_t t = 0; t < geom.size(); ++t) {
        const auto K = kernel(t);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int fi = fm.index[tri[i]];
            if (fi < 0) continue;
            const auto& gi = geom[t].grad[i];
            const double kx = K[0][0] * gi[0] + K[0][1] * gi[1];
            const double ky = K[1][0] * gi[0] + K[1][1] * gi[1];
            for (int j = 0; j < 3; ++j) {
                const int fj = fm.index[tri[j]];
                if (fj < 0) continue;
                const auto& gj = geom[t].grad[j];
                trip.emplace_back(fi, fj, geom[t].area * (kx * gj[0] + ky * gj[1]));
            }
        }
    }
    Eigen::SparseMatrix<double> A(fm.count, fm.count);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

}  // namespace

std::vector<double> harmonic_extension(const TruncatedProblem& problem) {
    const TriMesh& mesh = *problem.mesh;
    const auto geom = triangle_geometry(mesh);
    const FreeMap fm = free_map(problem);
    std::vector<double> u(mesh.points.size(), 0.0);
    for (std::size_t v = 0; v < u.size(); ++v) {
        if (problem.is_fixed(v)) u[v] = problem.dirichlet[v];
    }
    if (fm.count == 0) return u;
    using K2 = std::array<std::array<double, 2>, 2>;
    const auto A = assemble(mesh, geom, fm, [](std::size_t) { return K2{{{1.0, 0.0}, {0.0, 1.0}}}; });
    // Right-hand side: minus the action of the stiffness on the boundary data.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(fm.count);
    for (std::size_t t = 0; t < geom.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int fi = fm.index[tri[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                if (fm.index[tri[j]] >= 0) continue;
                const auto& gi = geom[t].grad[i];
                const auto& gj = geom[t].grad[j];
                rhs[fi] -= geom[t].area * (gi[0] * gj[0] + gi[1] * gj[1]) * u[tri[j]];
            }
        }
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw NonConvergence("Laplace factorization failed", {});
    const Eigen::VectorXd x = solver.solve(rhs);
    for (std::size_t v = 0; v < u.size(); ++v) {
        if (fm.index[v] >= 0) u[v] = x[fm.index[v]];
    }
    return u;
}

Solution solve_graph(const TruncatedProblem& problem, const SolverOptions& opt) {
    const TriMesh& mesh = *problem.mesh;
    const auto geom = triangle_geometry(mesh);
    const FreeMap fm = free_map(problem);
    Solution sol;
    sol.mesh = problem.mesh;
    double ymin = std::numeric_limits<double>::infinity();
    for (const auto& g : geom) ymin = std::min(ymin, g.yc);
    if (ymin < 1e-8) sol.warnings.push_back("triangles with centroid height below 1e-8; Hessian poorly scaled");

    std::vector<double> u = harmonic_extension(problem);
    double e = energy_with(mesh, geom, u);
    sol.energy_trace.push_back(e);
    using K2 = std::array<std::array<double, 2>, 2>;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool analyzed = false;
    for (int it = 0;; ++it) {
        const auto r = gradient_with(mesh, geom, u);
        double rmax = 0.0;
        for (std::size_t v = 0; v < u.size(); ++v) {
            if (fm.index[v] >= 0) rmax = std::max(rmax, std::abs(r[v]));
        }
        sol.residual_norm = rmax;
        sol.newton_iters = it;
        if (rmax < opt.tol) break;
        if (it >= opt.max_iters) {
            throw NonConvergence("residual " + std::to_string(rmax) + " after " + std::to_string(it) + " iterations",
                                 sol.energy_trace);
        }
        const auto H = assemble(mesh, geom, fm, [&](std::size_t t) {
            const auto g = tri_gradient(mesh, geom[t], t, u);
            const double y2 = geom[t].yc * geom[t].yc;
            const double w = std::sqrt(1.0 + y2 * (g[0] * g[0] + g[1] * g[1]));
            const double w3 = w * w * w;
            return K2{{{1.0 / w - y2 * g[0] * g[0] / w3, -y2 * g[0] * g[1] / w3},
                       {-y2 * g[1] * g[0] / w3, 1.0 / w - y2 * g[1] * g[1] / w3}}};
        });
        if (!analyzed) {
            ldlt.analyzePattern(H);
            analyzed = true;
        }
        ldlt.factorize(H);
        if (ldlt.info() != Eigen::Success) throw NonConvergence("Hessian factorization failed", sol.energy_trace);
        Eigen::VectorXd rhs(fm.count);
        for (std::size_t v = 0; v < u.size(); ++v) {
            if (fm.index[v] >= 0) rhs[fm.index[v]] = -r[v];
        }
        const Eigen::VectorXd d = ldlt.solve(rhs);
        const double slope = -rhs.dot(d);
        double alpha = 1.0;
        std::vector<double> trial(u);
        double e_trial = e;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t v = 0; v < u.size(); ++v) {
                if (fm.index[v] >= 0) trial[v] = u[v] + alpha * d[fm.index[v]];
            }
            e_trial = energy_with(mesh, geom, trial);
            // Below rounding of E the Armijo test carries no information; take the step.
            if (e_trial <= e + opt.armijo * alpha * slope || std::abs(slope) < 1e-13 * std::abs(e)) break;
            alpha *= 0.5;
        }
        u.swap(trial);
        e = e_trial;
        sol.energy_trace.push_back(e);
    }
    sol.values = std::move(u);
    sol.energy = e;
    return sol;
}

namespace {

std::array<double, 2> conormal_flux(const Solution& sol, std::size_t t) {
    const auto g = sol.gradient(t);
    const double yc = sol.mesh->centroid(t).y;
    const double w = std::sqrt(1.0 + yc * yc * (g[0] * g[0] + g[1] * g[1]));
    return {g[0] / w, g[1] / w};
}

}  // namespace

FluxResult flux(const Solution& sol, const std::vector<HPoint>& curve, FluxSide side) {
    const TriMesh& mesh = *sol.mesh;
    FluxResult res;
    res.curve = curve;
    res.side = side;
    const double sgn = side == FluxSide::Right ? 1.0 : -1.0;
    for (std::size_t s = 0; s + 1 < curve.size(); ++s) {
        const HPoint p = curve[s];
        const HPoint q = curve[s + 1];
        const double dx = q.x - p.x, dy = q.y - p.y;
        const double len = std::hypot(dx, dy);
        if (len == 0.0) continue;
        res.curve_length += euclidean_segment_length(p, q);
        const double nx = dy / len, ny = -dx / len;  // right-hand normal
        double covered = 0.0;
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
            for (int v : tri) {
                xmin = std::min(xmin, mesh.points[v].x);
                xmax = std::max(xmax, mesh.points[v].x);
                ymin = std::min(ymin, mesh.points[v].y);
                ymax = std::max(ymax, mesh.points[v].y);
            }
            if (std::max(p.x, q.x) < xmin || std::min(p.x, q.x) > xmax || std::max(p.y, q.y) < ymin ||
                std::min(p.y, q.y) > ymax) {
                continue;
            }
            // Clip [0, 1] against the three inner half-planes.
            double lo = 0.0, hi = 1.0;
            bool keep = true;
            for (int i = 0; i < 3 && keep; ++i) {
                const HPoint& a = mesh.points[tri[i]];
                const HPoint& b = mesh.points[tri[(i + 1) % 3]];
                const double ex = b.x - a.x, ey = b.y - a.y;
                const double f0 = ex * (p.y - a.y) - ey * (p.x - a.x);
                const double df = ex * dy - ey * dx;
                if (df == 0.0) {
                    if (f0 < 0.0) keep = false;
                    // Along a shared edge only the triangle to the left counts.
                    if (f0 == 0.0 && ex * dx + ey * dy < 0.0) keep = false;
                    continue;
                }
                const double tc = -f0 / df;
                if (df > 0.0) {
                    lo = std::max(lo, tc);
                } else {
                    hi = std::min(hi, tc);
                }
            }
            if (!keep || hi <= lo) continue;
            const auto qv = conormal_flux(sol, t);
            res.value += sgn * (qv[0] * nx + qv[1] * ny) * len * (hi - lo);
            covered += hi - lo;
        }
        if (covered < 1.0 - 1e-9) throw CurveOutsideDomain("polyline leaves the mesh");
    }
    return res;
}

std::vector<std::vector<HPoint>> dual_cell_loops(const TriMesh& mesh, const std::vector<int>& vertices) {
    std::vector<char> in(mesh.points.size(), 0);
    for (int v : vertices) {
        if (mesh.on_boundary[v]) throw InvalidParams("dual cells of boundary vertices are not closed");
        in[v] = 1;
    }
    // Nodes: edge midpoints (key 2*edge) and centroids (key 2*tri+1).
    std::unordered_map<std::uint64_t, std::uint64_t> next;
    std::unordered_map<std::uint64_t, HPoint> where;
    auto ekey = [](int a, int b) {
        const auto lo = static_cast<std::uint64_t>(std::min(a, b));
        const auto hi = static_cast<std::uint64_t>(std::max(a, b));
        return ((hi << 32) | lo) << 1;
    };
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const std::uint64_t ck = (static_cast<std::uint64_t>(t) << 1) | 1u;
        where[ck] = mesh.centroid(t);
        for (int i = 0; i < 3; ++i) {
            const int a = tri[i], b = tri[(i + 1) % 3];
            if (in[a] == in[b]) continue;
            const std::uint64_t mk = ekey(a, b);
            where[mk] = {0.5 * (mesh.points[a].x + mesh.points[b].x), 0.5 * (mesh.points[a].y + mesh.points[b].y)};
            if (in[a]) {
                next[mk] = ck;
            } else {
                next[ck] = mk;
            }
        }
    }
    std::vector<std::vector<HPoint>> loops;
    std::map<std::uint64_t, bool> used;
    std::vector<std::uint64_t> starts;
    for (const auto& [k, v] : next) starts.push_back(k);
    std::sort(starts.begin(), starts.end());
    for (std::uint64_t s : starts) {
        if (used[s]) continue;
        std::vector<HPoint> loop{where[s]};
        std::uint64_t cur = s;
        do {
            used[cur] = true;
            cur = next.at(cur);
            loop.push_back(where[cur]);
        } while (cur != s);
        loops.push_back(std::move(loop));
    }
    return loops;
}

FluxResult boundary_flux(const Solution& sol, const TruncatedProblem& problem, std::size_t curve, double t0,
                         double t1) {
    if (t1 < t0) std::swap(t0, t1);
    const TriMesh& mesh = *sol.mesh;
    const auto r = graph_energy_gradient(mesh, sol.values);
    // Hyperbolic mass of each boundary hat function, total and inside [t0, t1].
    std::vector<double> total(mesh.points.size(), 0.0);
    std::vector<double> inside(mesh.points.size(), 0.0);
    FluxResult res;
    for (const auto& s : problem.segments) {
        const double len = euclidean_segment_length(mesh.points[s.a], mesh.points[s.b]);
        total[s.a] += 0.5 * len;
        total[s.b] += 0.5 * len;
        if (static_cast<std::size_t>(s.curve) != curve) continue;
        const double lo = std::min(s.ta, s.tb), hi = std::max(s.ta, s.tb);
        const double a = std::max(lo, t0), b = std::min(hi, t1);
        if (b <= a) continue;
        res.curve.push_back(problem.curves[curve].eval(a));
        res.curve.push_back(problem.curves[curve].eval(b));
        // Integral of each endpoint's hat over [a, b], parameter assumed proportional to length.
        const double fa = hat_value(s.ta, s.tb, a), fb = hat_value(s.ta, s.tb, b);
        const double w = (b - a) / (hi - lo) * len;
        inside[s.b] += w * 0.5 * (fa + fb);
        inside[s.a] += w * (1.0 - 0.5 * (fa + fb));
    }
    for (std::size_t v = 0; v < mesh.points.size(); ++v) {
        if (inside[v] > 0.0) res.value += r[v] * inside[v] / total[v];
    }
    res.curve_length = (t1 - t0) * problem.curves[curve].hyp_length;
    return res;
}

std::vector<SweepRow> flux_convergence_sweep(const SemiIdealPolygon& poly, const TruncationParams& base,
                                             const std::vector<double>& caps, const SweepSegment& segment,
                                             const SolverOptions& opt) {
    const TruncatedProblem mesh_problem = truncate_and_mesh(poly, base);
    std::size_t curve = mesh_problem.curves.size();
    for (std::size_t c = 0; c < mesh_problem.curves.size(); ++c) {
        const auto& cv = mesh_problem.curves[c];
        if ((cv.piece == Piece::AEdge || cv.piece == Piece::BEdge) &&
            cv.index == static_cast<int>(segment.polygon_edge)) {
            curve = c;
        }
    }
    if (curve == mesh_problem.curves.size()) throw InvalidParams("no such polygon edge");
    std::vector<SweepRow> rows;
    for (double M : caps) {
        const TruncatedProblem p = with_cap(mesh_problem, M);
        const Solution sol = solve_graph(p, opt);
        const FluxResult f = boundary_flux(sol, p, curve, segment.t0, segment.t1);
        SweepRow row;
        row.M = M;
        row.flux = f.value;
        row.length = f.curve_length;
        row.ratio = f.value / f.curve_length;
        row.energy = sol.energy;
        row.newton_iters = sol.newton_iters;
        row.vertices = p.mesh->points.size();
        rows.push_back(row);
    }
    return rows;
}

bool CompactDisk::contains(const HPoint& p) const { return dist(p, center) <= radius; }

std::vector<HPoint> CompactDisk::samples() const {
    std::vector<HPoint> out{center};
    for (int j = 1; j <= rings; ++j) {
        const double rho = radius * j / rings;
        for (int i = 0; i < spokes; ++i) {
            const double th = 2.0 * std::numbers::pi * i / spokes;
            out.push_back({center.x + center.y * std::sinh(rho) * std::cos(th),
                           center.y * std::cosh(rho) + center.y * std::sinh(rho) * std::sin(th)});
        }
    }
    return out;
}

SequenceReport sequence_diagnostics(const std::vector<SemiIdealPolygon>& polys, const TruncationParams& tp,
                                    const CompactDisk& K, const HPoint& P, double divergence_factor,
                                    const SolverOptions& opt) {
    SequenceReport rep;
    const auto samples = K.samples();
    std::vector<double> prev;
    for (std::size_t k = 0; k < polys.size(); ++k) {
        const TruncatedProblem prob = truncate_and_mesh(polys[k], tp);
        Solution sol = solve_graph(prob, opt);
        const auto uP = sol.value_at(P);
        if (!uP) throw CurveOutsideDomain("normalization point outside the truncated domain");
        for (double& v : sol.values) v -= *uP;
        DiagnosticsRow row;
        row.k = static_cast<int>(k) + 1;
        row.vertices = prob.mesh->points.size();
        row.energy = sol.energy;
        row.value_at_P = *sol.value_at(P);
        for (std::size_t t = 0; t < prob.mesh->triangles.size(); ++t) {
            const HPoint c = prob.mesh->centroid(t);
            if (!K.contains(c)) continue;
            const auto g = sol.gradient(t);
            const double gy = c.y * std::hypot(g[0], g[1]);
            row.gradient_sup = std::max(row.gradient_sup, gy);
            row.min_nu = std::min(row.min_nu, 1.0 / std::sqrt(1.0 + gy * gy));
        }
        std::vector<double> cur;
        for (const auto& s : samples) {
            const auto v = sol.value_at(s);
            if (!v) throw CurveOutsideDomain("compact set leaves the truncated domain");
            cur.push_back(*v);
        }
        if (!prev.empty()) {
            row.diff_sup = 0.0;
            for (std::size_t i = 0; i < cur.size(); ++i) row.diff_sup = std::max(row.diff_sup, std::abs(cur[i] - prev[i]));
        }
        prev = std::move(cur);
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty()) {
        double gmin = rep.rows[0].gradient_sup, gmax = gmin;
        bool increasing = true;
        for (std::size_t i = 1; i < rep.rows.size(); ++i) {
            gmin = std::min(gmin, rep.rows[i].gradient_sup);
            gmax = std::max(gmax, rep.rows[i].gradient_sup);
            if (rep.rows[i].gradient_sup <= rep.rows[i - 1].gradient_sup) increasing = false;
        }
        rep.gradient_factor = gmin > 0.0 ? gmax / gmin : std::numeric_limits<double>::infinity();
        rep.divergence_flag = rep.rows.size() > 1 && increasing &&
                              rep.rows.back().gradient_sup > divergence_factor * rep.rows.front().gradient_sup;
    }
    return rep;
}

}  // namespace limitends
