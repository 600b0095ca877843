#pragma once

// Slow reference computations used to cross-check the closed forms.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "limitends/hyp_geom.hpp"

namespace oracle {

using limitends::HPoint;

inline double integrate(auto&& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

/// Length of the geodesic arc from p to q by integrating |dz| / y along it.
inline double geodesic_length(const HPoint& p, const HPoint& q) {
    const double dx = q.x - p.x;
    if (std::abs(dx) < 1e-12 * (std::abs(p.x) + std::abs(q.x) + 1.0)) {
        const double lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
        return integrate([](double y) { return 1.0 / y; }, lo, hi);
    }
    // Centre of the semicircle through p and q.
    const double c = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * dx);
    const double th_p = std::atan2(p.y, p.x - c);
    const double th_q = std::atan2(q.y, q.x - c);
    const double lo = std::min(th_p, th_q), hi = std::max(th_p, th_q);
    return integrate([](double th) { return 1.0 / std::sin(th); }, lo, hi);
}

/// Length of a Euclidean straight segment, integrating |dz| / y along it.
inline double segment_length(const HPoint& p, const HPoint& q) {
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    return integrate([&](double s) { return len / (p.y + s * (q.y - p.y)); }, 0.0, 1.0);
}

/// Signed distance from p to the horocycle through P0 at a finite base a, measured along
/// the geodesic from p to a (negative inside the horodisk).
inline double busemann_finite(double a, const HPoint& p) {
    const double r = 0.5 * (a * a + 1.0);
    auto inside = [&](const HPoint& z) { return std::hypot(z.x - a, z.y - r) < r; };
    HPoint foot;
    if (std::abs(p.x - a) < 1e-14) {
        foot = {a, 2.0 * r};
    } else {
        // Geodesic through p ending at a: semicircle with centre c.
        const double c = (p.x * p.x + p.y * p.y - a * a) / (2.0 * (p.x - a));
        const double R = std::abs(a - c);
        const double th_a = a > c ? 0.0 : std::numbers::pi;
        double th_p = std::atan2(p.y, p.x - c);
        auto at = [&](double th) { return HPoint{c + R * std::cos(th), R * std::sin(th)}; };
        // Walk from p towards a when p is outside the horodisk, away from a otherwise;
        // the incidence flips exactly once on the way.
        const bool p_inside = inside(p);
        double u = th_p;
        double v = p_inside ? std::numbers::pi - th_a : th_a;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (u + v);
            if (inside(at(m)) == p_inside) u = m; else v = m;
        }
        foot = at(0.5 * (u + v));
    }
    const double d = geodesic_length(p, foot);
    return inside(p) ? -d : d;
}

/// Distance in the Poincare disk model.
inline double disk_distance(std::pair<double, double> a, std::pair<double, double> b) {
    const double num = (a.first - b.first) * (a.first - b.first) + (a.second - b.second) * (a.second - b.second);
    const double na = 1.0 - (a.first * a.first + a.second * a.second);
    const double nb = 1.0 - (b.first * b.first + b.second * b.second);
    return std::acosh(1.0 + 2.0 * num / (na * nb));
}

inline HPoint random_point(std::mt19937_64& rng, double xspread = 5.0) {
    std::uniform_real_distribution<double> ux(-xspread, xspread);
    std::uniform_real_distribution<double> ly(std::log(0.05), std::log(20.0));
    return {ux(rng), std::exp(ly(rng))};
}

}  // namespace oracle
