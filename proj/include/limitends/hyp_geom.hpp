#pragma once

// Primitives of the upper half-plane model {y > 0} with metric (dx^2 + dy^2) / y^2.

#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace limitends {

struct ToleranceConfig {
    double tol_geom = 1e-9;  // geometric predicates
    double tol_star = 1e-9;  // equal-horocycle residuals
};

/// Interior point of H^2 in half-plane coordinates.
struct HPoint {
    double x = 0.0;
    double y = 1.0;

    friend bool operator==(const HPoint&, const HPoint&) = default;
};

/// Base point used to normalize Busemann functions.
inline constexpr HPoint kP0{0.0, 1.0};

/// Point of the ideal boundary {y = 0} u {infinity}.
class IdealPoint {
public:
    IdealPoint() = default;

    static IdealPoint finite(double x);
    static IdealPoint infinity();

    bool is_infinity() const { return infinite_; }
    /// Abscissa of a finite ideal point. Undefined for infinity.
    double x() const { return x_; }

    /// Same variant and abscissae within `tol`; infinity only equals infinity.
    bool same_as(const IdealPoint& other, double tol) const;

    friend bool operator==(const IdealPoint&, const IdealPoint&) = default;

private:
    bool infinite_ = false;
    double x_ = 0.0;
};

/// Complete geodesic: a vertical line or a semicircle centred on {y = 0}.
struct Geodesic {
    enum class Kind { Vertical, Semicircle };

    Kind kind = Kind::Vertical;
    double center = 0.0;  // abscissa of the vertical line, or semicircle centre
    double radius = 0.0;  // semicircles only

    static Geodesic vertical(double x);
    static Geodesic semicircle(double center, double radius);

    bool is_vertical() const { return kind == Kind::Vertical; }
};

/// Horocycle with redundant Euclidean data and its Busemann level relative to P0.
///
/// For a finite base `a` the horocycle is the circle of radius `size` tangent to
/// {y = 0} at `a`; for the base at infinity it is the line {y = size}.
struct Horocycle {
    IdealPoint base;
    double size = 1.0;
    double level = 0.0;

    double radius() const { return size; }
    double height() const { return size; }
};

using Anchor = std::variant<HPoint, IdealPoint>;

enum class SegmentKind { Geodesic, Euclidean };

/// Hyperbolic distance between two interior points.
double dist(const HPoint& p, const HPoint& q);

/// Busemann function of `base`, normalized to vanish at P0. Level sets are horocycles
/// and level differences are signed distances; it decreases towards the base.
double busemann(const IdealPoint& base, const HPoint& p);

Horocycle horocycle_at(const IdealPoint& base, const HPoint& through);
Horocycle horocycle_at_level(const IdealPoint& base, double level);

/// All intersection points of two horocycles with distinct bases, sorted by (x, y).
/// Tangency returns a single point. Throws SameBase when the bases coincide.
std::vector<HPoint> horocycle_intersection(const Horocycle& h1, const Horocycle& h2,
                                           const ToleranceConfig& tol = {});

/// Intersection point of two horocycles other than `known`, which must lie on both.
/// The second point is the mirror image of `known` in the line of centres, which is
/// far more stable than the generic solve. Throws DegenerateIntersection on tangency.
HPoint second_intersection(const Horocycle& h1, const Horocycle& h2, const HPoint& known,
                           const ToleranceConfig& tol = {});

Geodesic geodesic_through(const Anchor& a, const Anchor& b, const ToleranceConfig& tol = {});

std::pair<IdealPoint, IdealPoint> ideal_endpoints(const Geodesic& g);

/// The ideal endpoint of `g` that is not `known`.
IdealPoint other_endpoint(const Geodesic& g, const IdealPoint& known, const ToleranceConfig& tol = {});

/// Hyperbolic length of a polyline whose segments are geodesic arcs or Euclidean
/// straight segments.
double hyp_length(std::span<const HPoint> curve, SegmentKind kind = SegmentKind::Geodesic);

/// Exact hyperbolic length of the Euclidean straight segment [p, q].
double euclidean_segment_length(const HPoint& p, const HPoint& q);

/// Signed defining function: (x-c)^2 + y^2 - R^2 for semicircles, x - x0 for verticals.
double defining_function(const Geodesic& g, const HPoint& p);

int side_of(const Geodesic& g, const HPoint& p, const ToleranceConfig& tol = {});
int side_of(const Geodesic& g, const IdealPoint& p, const ToleranceConfig& tol = {});

/// Unsigned hyperbolic distance from an interior point to a complete geodesic.
double distance_to_geodesic(const Geodesic& g, const HPoint& p);

/// Point of `g` where busemann(end, .) == level; `end` must be an endpoint of g.
HPoint point_at_level(const Geodesic& g, const IdealPoint& end, double level);

/// Whether `p` lies on the horocycle within `tol` (Euclidean residual).
double horocycle_residual(const Horocycle& h, const HPoint& p);

/// Point of a horocycle at horocyclic arclength parameter t. For a finite base,
/// t = (x - a) / y and t = 0 is the top; for infinity, t = x / height.
HPoint horocycle_point(const Horocycle& h, double t);
double horocycle_parameter(const Horocycle& h, const HPoint& p);

/// Hyperbolic-arclength coordinate along a geodesic (arbitrary origin) and its inverse.
double geodesic_coordinate(const Geodesic& g, const HPoint& p);
HPoint geodesic_point(const Geodesic& g, double s);

/// geodesic_coordinate of point_at_level(g, end, level), evaluated without forming the point.
double level_coordinate(const Geodesic& g, const IdealPoint& end, double level);

/// Map from the half-plane to the Poincare disk (Cayley transform sending P0 to 0).
std::pair<double, double> to_disk(const HPoint& p);

}  // namespace limitends
