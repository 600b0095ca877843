#pragma once

// Capped Dirichlet problems for the minimal graph equation on truncated semi-ideal
// polygons, fluxes, and diagnostics along nested domain sequences.

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "limitends/domain.hpp"
#include "limitends/hyp_geom.hpp"

namespace limitends {

enum class ArcBlend { Linear, Cosine };

struct TruncationParams {
    double n = 4.0;   // horodisks sit at Busemann level (star level) - n
    double M = 4.0;   // cap replacing +-infinity
    double h = 0.05;  // target edge length in units of y (hyperbolic size)
    double boundary_factor = 1.0;  // initial boundary spacing relative to h
    ArcBlend blend = ArcBlend::Linear;
    /// Mesh the half x <= axis and reflect it; the polygon must be mirror symmetric
    /// with two interior vertices on the axis.
    std::optional<double> mirror_axis;
    std::size_t max_vertices = 2'000'000;
};

struct TriMesh {
    std::vector<HPoint> points;
    std::vector<std::array<int, 3>> triangles;       // counter-clockwise
    std::vector<std::array<int, 2>> boundary_edges;  // domain on the left
    std::vector<char> on_boundary;
    double min_angle_deg = 0.0;  // over triangles away from sharp corners
    std::size_t corner_triangles = 0;

    double triangle_area(std::size_t t) const;
    HPoint centroid(std::size_t t) const;
    /// Triangle containing p (closed), or -1.
    int locate(const HPoint& p) const;
    /// Largest Euclidean distance between two mesh points (bounding-box diagonal).
    double diameter() const;
};

/// Which piece of the truncated boundary a curve or boundary vertex belongs to.
struct BoundaryTag {
    enum class Piece { AEdge, BEdge, Arc, Corner, Axis };
    Piece piece = Piece::AEdge;
    int index = -1;  // polygon edge (AEdge, BEdge), ideal vertex (Arc) or vertex (Corner)
    double t = 0.0;  // curve parameter in [0, 1]
};

std::string to_string(BoundaryTag::Piece p);

struct BoundaryCurve {
    BoundaryTag::Piece piece = BoundaryTag::Piece::AEdge;
    int index = -1;
    std::function<HPoint(double)> eval;  // t in [0, 1], hyperbolic-arclength uniform
    double hyp_length = 0.0;
    double start_value = 0.0;  // Dirichlet data at t = 0 and t = 1
    double end_value = 0.0;
};

struct BoundarySegment {
    int a = 0;
    int b = 0;
    int curve = 0;
    double ta = 0.0;
    double tb = 0.0;
};

struct TruncatedProblem {
    std::shared_ptr<const TriMesh> mesh;
    std::vector<BoundarySegment> segments;
    std::vector<double> dirichlet;  // NaN at interior vertices
    std::vector<std::optional<BoundaryTag>> provenance;
    std::vector<BoundaryCurve> curves;
    SemiIdealPolygon polygon;
    TruncationParams params;

    bool is_fixed(std::size_t v) const { return mesh->on_boundary[v] != 0; }
};

TruncatedProblem truncate_and_mesh(const SemiIdealPolygon& poly, const TruncationParams& tp,
                                   const ToleranceConfig& tol = {});

/// Same mesh with every Dirichlet value replaced by `value`.
TruncatedProblem with_constant_data(const TruncatedProblem& problem, double value);
/// Same mesh with the data recomputed for another cap or arc blend.
TruncatedProblem with_cap(const TruncatedProblem& problem, double M,
                          std::optional<ArcBlend> blend = std::nullopt);

/// Polygon with ideal vertices -1, 1 and interior vertices (0, a), (0, 1/a): symmetric
/// under x -> -x, which swaps its A and B edges.
SemiIdealPolygon symmetric_quadrilateral(double a = 0.5);

struct Solution {
    std::shared_ptr<const TriMesh> mesh;
    std::vector<double> values;
    double energy = 0.0;
    double residual_norm = 0.0;  // max |dE/du_i| over free vertices
    int newton_iters = 0;
    std::vector<double> energy_trace;
    std::vector<std::string> warnings;

    /// Per-triangle Euclidean gradient of the piecewise linear interpolant.
    std::array<double, 2> gradient(std::size_t t) const;
    /// Piecewise linear interpolation; nullopt outside the mesh.
    std::optional<double> value_at(const HPoint& p) const;
};

struct SolverOptions {
    double tol = 1e-12;
    int max_iters = 100;
    double armijo = 1e-4;
};

/// Discrete hyperbolic graph area sum_T |T| sqrt(1 + y_T^2 |grad u|^2) / y_T^2 and its
/// gradient with respect to every vertex value (one-point rule at the centroid).
double graph_energy(const TriMesh& mesh, const std::vector<double>& u);
std::vector<double> graph_energy_gradient(const TriMesh& mesh, const std::vector<double>& u);
/// W_T = sqrt(1 + y_T^2 |grad u|^2) per triangle.
std::vector<double> gradient_weights(const TriMesh& mesh, const std::vector<double>& u);

/// Harmonic extension of the Dirichlet data.
std::vector<double> harmonic_extension(const TruncatedProblem& problem);

Solution solve_graph(const TruncatedProblem& problem, const SolverOptions& opt = {});

enum class FluxSide { Right, Left };  // conormal to the right (left) of the direction of travel

struct FluxResult {
    double value = 0.0;
    double curve_length = 0.0;  // hyperbolic length of the polyline
    std::vector<HPoint> curve;
    FluxSide side = FluxSide::Right;
};

/// Flux of grad u / sqrt(1 + |grad u|^2) across a polyline of straight segments.
FluxResult flux(const Solution& sol, const std::vector<HPoint>& curve, FluxSide side = FluxSide::Right);

/// Closed loop bounding the union of the median-dual cells of `vertices`.
std::vector<std::vector<HPoint>> dual_cell_loops(const TriMesh& mesh, const std::vector<int>& vertices);

/// Flux across the part of boundary curve `curve` with parameter in [t0, t1], outward
/// conormal. Variational form: sum of nodal residuals weighted by the boundary hat
/// functions restricted to the sub-arc.
FluxResult boundary_flux(const Solution& sol, const TruncatedProblem& problem, std::size_t curve, double t0,
                         double t1);

struct SweepRow {
    double M = 0.0;
    double flux = 0.0;
    double length = 0.0;
    double ratio = 0.0;
    double energy = 0.0;
    int newton_iters = 0;
    std::size_t vertices = 0;
};

struct SweepSegment {
    std::size_t polygon_edge = 0;
    double t0 = 0.25;  // sub-arc of the truncated edge, in its arclength parameter
    double t1 = 0.75;
};

std::vector<SweepRow> flux_convergence_sweep(const SemiIdealPolygon& poly, const TruncationParams& base,
                                             const std::vector<double>& caps, const SweepSegment& segment,
                                             const SolverOptions& opt = {});

struct DiagnosticsRow {
    int k = 0;
    std::size_t vertices = 0;
    double gradient_sup = 0.0;    // sup over K of y |grad u|
    double diff_sup = std::numeric_limits<double>::quiet_NaN();  // sup over K of |u_k - u_{k-1}|
    double value_at_P = 0.0;      // after normalization
    double min_nu = 1.0;          // min angle function over K
    double energy = 0.0;
};

struct SequenceReport {
    std::vector<DiagnosticsRow> rows;
    bool divergence_flag = false;
    double gradient_factor = 1.0;  // max / min gradient sup across the sequence
};

/// Hyperbolic disk sampled on a polar grid in geodesic coordinates.
struct CompactDisk {
    HPoint center{0.0, 0.5};
    double radius = 0.5;
    int rings = 8;
    int spokes = 24;

    bool contains(const HPoint& p) const;
    std::vector<HPoint> samples() const;
};

SequenceReport sequence_diagnostics(const std::vector<SemiIdealPolygon>& polys, const TruncationParams& tp,
                                    const CompactDisk& K, const HPoint& P, double divergence_factor = 2.0,
                                    const SolverOptions& opt = {});

}  // namespace limitends
