#include "limitends/hyp_geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "limitends/errors.hpp"

namespace limitends {

namespace {

double sq(double v) { return v * v; }

// Euclidean centre of a horocycle circle (finite base only).
std::pair<double, double> circle_center(const Horocycle& h) { return {h.base.x(), h.size}; }

}  // namespace

IdealPoint IdealPoint::finite(double x) {
    IdealPoint p;
    p.infinite_ = false;
    p.x_ = x;
    return p;
}

IdealPoint IdealPoint::infinity() {
    IdealPoint p;
    p.infinite_ = true;
    p.x_ = 0.0;
    return p;
}

bool IdealPoint::same_as(const IdealPoint& other, double tol) const {
    if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
    return std::abs(x_ - other.x_) <= tol;
}

Geodesic Geodesic::vertical(double x) { return Geodesic{Kind::Vertical, x, 0.0}; }

Geodesic Geodesic::semicircle(double center, double radius) {
    return Geodesic{Kind::Semicircle, center, radius};
}

double dist(const HPoint& p, const HPoint& q) {
    // 2 asinh(|p - q| / (2 sqrt(y_p y_q))) == arccosh(1 + |p - q|^2 / (2 y_p y_q)),
    // without the cancellation of arccosh near 1.
    const double chord = std::hypot(p.x - q.x, p.y - q.y);
    return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.y * q.y)));
}

double busemann(const IdealPoint& base, const HPoint& p) {
    if (base.is_infinity()) return -std::log(p.y);
    const double a = base.x();
    return std::log((sq(p.x - a) + sq(p.y)) / p.y) - std::log(a * a + 1.0);
}

Horocycle horocycle_at(const IdealPoint& base, const HPoint& through) {
    Horocycle h;
    h.base = base;
    h.level = busemann(base, through);
    if (base.is_infinity()) {
        h.size = through.y;
    } else {
        h.size = (sq(through.x - base.x()) + sq(through.y)) / (2.0 * through.y);
    }
    return h;
}

Horocycle horocycle_at_level(const IdealPoint& base, double level) {
    Horocycle h;
    h.base = base;
    h.level = level;
    if (base.is_infinity()) {
        h.size = std::exp(-level);
    } else {
        h.size = 0.5 * std::exp(level) * (sq(base.x()) + 1.0);
    }
    return h;
}

std::vector<HPoint> horocycle_intersection(const Horocycle& h1, const Horocycle& h2,
                                           const ToleranceConfig& tol) {
    if (h1.base.same_as(h2.base, tol.tol_geom)) {
        throw SameBase("horocycles share their base point");
    }
    std::vector<HPoint> out;
    const double tol2 = tol.tol_geom * tol.tol_geom;

    if (h1.base.is_infinity() || h2.base.is_infinity()) {
        const Horocycle& line = h1.base.is_infinity() ? h1 : h2;
        const Horocycle& circ = h1.base.is_infinity() ? h2 : h1;
        const double y = line.height();
        const double r = circ.radius();
        const double disc = y * (2.0 * r - y);  // (x - a)^2
        if (disc < -tol2) return out;
        if (disc <= tol2) {
            out.push_back({circ.base.x(), y});
            return out;
        }
        const double s = std::sqrt(disc);
        out.push_back({circ.base.x() - s, y});
        out.push_back({circ.base.x() + s, y});
        return out;
    }

    const auto [x1, y1] = circle_center(h1);
    const auto [x2, y2] = circle_center(h2);
    const double r1 = h1.radius();
    const double r2 = h2.radius();
    const double dx = x2 - x1;
    const double dy = y2 - y1;
    const double d = std::hypot(dx, dy);
    const double along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double h2sq = r1 * r1 - along * along;
    if (h2sq < -tol2) return out;
    const double mx = x1 + along * dx / d;
    const double my = y1 + along * dy / d;
    if (h2sq <= tol2) {
        out.push_back({mx, my});
        return out;
    }
    const double hh = std::sqrt(h2sq);
    out.push_back({mx - hh * dy / d, my + hh * dx / d});
    out.push_back({mx + hh * dy / d, my - hh * dx / d});
    std::sort(out.begin(), out.end(), [](const HPoint& a, const HPoint& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    return out;
}

HPoint second_intersection(const Horocycle& h1, const Horocycle& h2, const HPoint& known,
                           const ToleranceConfig& tol) {
    if (h1.base.same_as(h2.base, tol.tol_geom)) {
        throw SameBase("horocycles share their base point");
    }
    HPoint other;
    if (h1.base.is_infinity() || h2.base.is_infinity()) {
        const Horocycle& circ = h1.base.is_infinity() ? h2 : h1;
        // The line of centres is the vertical through the tangency point.
        other = {2.0 * circ.base.x() - known.x, known.y};
    } else {
        const auto [x1, y1] = circle_center(h1);
        const auto [x2, y2] = circle_center(h2);
        const double dx = x2 - x1;
        const double dy = y2 - y1;
        const double len2 = dx * dx + dy * dy;
        const double t = ((known.x - x1) * dx + (known.y - y1) * dy) / len2;
        const double fx = x1 + t * dx;
        const double fy = y1 + t * dy;
        other = {2.0 * fx - known.x, 2.0 * fy - known.y};
    }
    if (std::hypot(other.x - known.x, other.y - known.y) <= tol.tol_geom || other.y <= 0.0) {
        throw DegenerateIntersection("horocycles are tangent at the known point");
    }
    return other;
}

Geodesic geodesic_through(const Anchor& a, const Anchor& b, const ToleranceConfig& tol) {
    const double eps = tol.tol_geom;
    if (const auto* pa = std::get_if<HPoint>(&a)) {
        if (const auto* pb = std::get_if<HPoint>(&b)) {
            if (std::hypot(pa->x - pb->x, pa->y - pb->y) <= eps) {
                throw CoincidentPoints("geodesic through coincident points");
            }
            if (std::abs(pa->x - pb->x) <= eps) return Geodesic::vertical(0.5 * (pa->x + pb->x));
            const double c = ((sq(pb->x) + sq(pb->y)) - (sq(pa->x) + sq(pa->y))) / (2.0 * (pb->x - pa->x));
            return Geodesic::semicircle(c, std::hypot(pa->x - c, pa->y));
        }
        const auto& ib = std::get<IdealPoint>(b);
        if (ib.is_infinity()) return Geodesic::vertical(pa->x);
        if (std::abs(pa->x - ib.x()) <= eps) return Geodesic::vertical(ib.x());
        const double c = (sq(pa->x) + sq(pa->y) - sq(ib.x())) / (2.0 * (pa->x - ib.x()));
        return Geodesic::semicircle(c, std::abs(c - ib.x()));
    }
    const auto& ia = std::get<IdealPoint>(a);
    if (std::holds_alternative<HPoint>(b)) return geodesic_through(b, a, tol);
    const auto& ib = std::get<IdealPoint>(b);
    if (ia.same_as(ib, eps)) throw CoincidentPoints("geodesic through coincident ideal points");
    if (ia.is_infinity()) return Geodesic::vertical(ib.x());
    if (ib.is_infinity()) return Geodesic::vertical(ia.x());
    return Geodesic::semicircle(0.5 * (ia.x() + ib.x()), 0.5 * std::abs(ib.x() - ia.x()));
}

std::pair<IdealPoint, IdealPoint> ideal_endpoints(const Geodesic& g) {
    if (g.is_vertical()) return {IdealPoint::finite(g.center), IdealPoint::infinity()};
    return {IdealPoint::finite(g.center - g.radius), IdealPoint::finite(g.center + g.radius)};
}

IdealPoint other_endpoint(const Geodesic& g, const IdealPoint& known, const ToleranceConfig& tol) {
    const auto [e1, e2] = ideal_endpoints(g);
    if (e1.same_as(known, tol.tol_geom)) return e2;
    if (e2.same_as(known, tol.tol_geom)) return e1;
    // Pick the endpoint farther from `known` when neither matches to tolerance.
    if (known.is_infinity()) return e1;
    if (e2.is_infinity()) return std::abs(e1.x() - known.x()) < 1.0 ? e2 : e1;
    return std::abs(e1.x() - known.x()) < std::abs(e2.x() - known.x()) ? e2 : e1;
}

double euclidean_segment_length(const HPoint& p, const HPoint& q) {
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    const double dy = q.y - p.y;
    // len * (ln y1 - ln y0) / (y1 - y0), with the y0 == y1 limit len / y0.
    const double rel = dy / p.y;
    if (std::abs(rel) < 1e-6) {
        return len / p.y * (1.0 - rel / 2.0 + rel * rel / 3.0);
    }
    return len * std::log1p(rel) / dy;
}

double hyp_length(std::span<const HPoint> curve, SegmentKind kind) {
    double total = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        total += kind == SegmentKind::Geodesic ? dist(curve[i - 1], curve[i])
                                               : euclidean_segment_length(curve[i - 1], curve[i]);
    }
    return total;
}

double defining_function(const Geodesic& g, const HPoint& p) {
    if (g.is_vertical()) return p.x - g.center;
    return sq(p.x - g.center) + sq(p.y) - sq(g.radius);
}

int side_of(const Geodesic& g, const HPoint& p, const ToleranceConfig& tol) {
    double v;
    if (g.is_vertical()) {
        v = p.x - g.center;
    } else {
        v = (std::hypot(p.x - g.center, p.y) - g.radius) / std::max(1.0, g.radius);
    }
    if (std::abs(v) <= tol.tol_geom) return 0;
    return v > 0 ? 1 : -1;
}

int side_of(const Geodesic& g, const IdealPoint& p, const ToleranceConfig& tol) {
    if (p.is_infinity()) return g.is_vertical() ? 0 : 1;
    double v;
    if (g.is_vertical()) {
        v = p.x() - g.center;
    } else {
        v = (std::abs(p.x() - g.center) - g.radius) / std::max(1.0, g.radius);
    }
    if (std::abs(v) <= tol.tol_geom) return 0;
    return v > 0 ? 1 : -1;
}

double distance_to_geodesic(const Geodesic& g, const HPoint& p) {
    if (g.is_vertical()) return std::asinh(std::abs(p.x - g.center) / p.y);
    return std::asinh(std::abs(defining_function(g, p)) / (2.0 * g.radius * p.y));
}

HPoint point_at_level(const Geodesic& g, const IdealPoint& end, double level) {
    if (g.is_vertical()) {
        if (end.is_infinity()) return {g.center, std::exp(-level)};
        return {g.center, std::exp(level) * (sq(g.center) + 1.0)};
    }
    const double a = end.x();
    // busemann = ln(2R tan(theta/2)) - ln(a^2 + 1), theta measured from the end.
    const double theta = 2.0 * std::atan(std::exp(level) * (a * a + 1.0) / (2.0 * g.radius));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    if (a > g.center) return {g.center + g.radius * c, g.radius * s};
    return {g.center - g.radius * c, g.radius * s};
}

double horocycle_residual(const Horocycle& h, const HPoint& p) {
    if (h.base.is_infinity()) return std::abs(p.y - h.height());
    return std::abs(std::hypot(p.x - h.base.x(), p.y - h.radius()) - h.radius());
}

HPoint horocycle_point(const Horocycle& h, double t) {
    if (h.base.is_infinity()) return {t * h.height(), h.height()};
    const double diam = 2.0 * h.radius();
    const double w = 1.0 + t * t;
    return {h.base.x() + diam * t / w, diam / w};
}

double horocycle_parameter(const Horocycle& h, const HPoint& p) {
    if (h.base.is_infinity()) return p.x / h.height();
    return (p.x - h.base.x()) / p.y;
}

double geodesic_coordinate(const Geodesic& g, const HPoint& p) {
    if (g.is_vertical()) return std::log(p.y);
    // -ln tan(theta / 2), theta the polar angle about the centre, in a form that
    // stays accurate near both endpoints.
    const double u = p.x - g.center;
    const double r = std::hypot(u, p.y);
    const double t = u >= 0.0 ? p.y / (r + u) : (r - u) / p.y;
    return -std::log(t);
}

double level_coordinate(const Geodesic& g, const IdealPoint& end, double level) {
    if (g.is_vertical()) {
        if (end.is_infinity()) return -level;
        return level + std::log(sq(g.center) + 1.0);
    }
    const double a = end.x();
    const double shift = std::log(sq(a) + 1.0) - std::log(2.0 * g.radius);
    return a > g.center ? -level - shift : level + shift;
}

HPoint geodesic_point(const Geodesic& g, double s) {
    if (g.is_vertical()) return {g.center, std::exp(s)};
    const double theta = 2.0 * std::atan(std::exp(-s));
    return {g.center + g.radius * std::cos(theta), g.radius * std::sin(theta)};
}

std::pair<double, double> to_disk(const HPoint& p) {
    // w = (z - i) / (z + i)
    const double den = sq(p.x) + sq(p.y + 1.0);
    const double re = (sq(p.x) + sq(p.y) - 1.0) / den;
    const double im = -2.0 * p.x / den;
    return {re, im};
}

}  // namespace limitends
