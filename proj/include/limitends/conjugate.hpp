#pragma once

// Angle function and discrete conjugate height of a solved minimal graph.

#include <array>
#include <vector>

#include "limitends/graph_solver.hpp"

namespace limitends {

struct ConjugateDiagnostics {
    std::vector<double> nu;                   // per triangle
    /// The conjugate height is integrated on edge midpoints, where the conjugate of a
    /// piecewise linear function naturally lives; edges[i] are the endpoints of edge i.
    std::vector<std::array<int, 2>> edges;
    std::vector<double> h_star_edge;
    std::vector<double> h_star;               // per vertex, extended inside one triangle
    double loop_defect = 0.0;                 // max |holonomy| over co-tree cycles
    double loop_defect_sum = 0.0;             // sum of |holonomy|
    std::size_t cycles = 0;
    std::vector<double> boundary_variation;   // per boundary component
};

/// nu = 1 / sqrt(1 + y^2 |grad u|^2) per triangle, y at the centroid.
std::vector<double> angle_function(const Solution& sol);

/// Integrates the rotated, normalized gradient over a spanning tree of the edge-midpoint
/// graph. h* vanishes at the midpoint of edge 0. Throws MeshNotSimplyConnected.
ConjugateDiagnostics conjugate_height(const Solution& sol);

/// h* at an arbitrary point: integrate from a midpoint of the containing triangle.
double conjugate_at(const ConjugateDiagnostics& diag, const Solution& sol, const HPoint& p);

struct FlatnessArc {
    int polygon_vertex = -1;
    double variation = 0.0;       // max - min of h* over the arc
    double surface_length = 0.0;  // length of the arc's lift to the graph
    double normalized = 0.0;      // variation / surface_length
    std::size_t samples = 0;
};

/// Boundary arcs within hyperbolic distance `radius` of each interior polygon vertex.
std::vector<FlatnessArc> boundary_flatness(const ConjugateDiagnostics& diag, const TruncatedProblem& problem,
                                           const Solution& sol, double radius = 0.1);

}  // namespace limitends
