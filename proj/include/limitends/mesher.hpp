#pragma once

// Conforming Delaunay refinement of a simply connected region bounded by a closed loop
// of parametrized curves.

#include <array>
#include <functional>
#include <vector>

#include "limitends/hyp_geom.hpp"

namespace limitends {

struct MeshCurve {
    std::function<HPoint(double)> eval;
    double t0 = 0.0;
    double t1 = 1.0;
};

struct MeshInput {
    /// corners[i] is where curves[i] starts and curves[i-1] ends. The loop runs
    /// counter-clockwise.
    std::vector<HPoint> corners;
    std::vector<MeshCurve> curves;
    /// Target Euclidean edge length at a point.
    std::function<double(const HPoint&)> size;
    /// Boundary chords start at boundary_factor * size.
    double boundary_factor = 1.0;
    /// Bound on circumradius / shortest edge; sqrt(2) guarantees angles >= 20.7 deg.
    double quality = 1.4142135623730951;
    /// Corners with a smaller interior angle get concentric-shell protection.
    double small_angle_deg = 60.0;
    std::size_t max_vertices = 1'000'000;
};

struct MeshVertexInfo {
    int curve = -1;   // boundary curve index, -1 for interior vertices
    double t = 0.0;   // curve parameter
    bool corner = false;
};

struct MeshSegment {
    int a = 0;
    int b = 0;  // the domain lies to the left of a -> b
    int curve = 0;
    double ta = 0.0;  // curve parameters at a and b
    double tb = 0.0;
};

struct MeshOutput {
    std::vector<HPoint> points;
    std::vector<MeshVertexInfo> info;
    std::vector<std::array<int, 3>> triangles;  // counter-clockwise
    std::vector<MeshSegment> segments;
    double min_angle_deg = 0.0;      // over triangles not touching a small-angle corner
    std::size_t corner_triangles = 0; // triangles exempt from the quality bound
};

MeshOutput mesh_domain(const MeshInput& input);

}  // namespace limitends
