#include "limitends/predicates.hpp"

#include <cmath>

#include <gmpxx.h>

namespace limitends {

namespace {

// Error bounds for the straightforward double evaluation (Shewchuk's A-level bounds).
constexpr double kEps = 1.1102230246251565e-16;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

double sign_of(const mpq_class& v) { return static_cast<double>(sgn(v)); }

}  // namespace

double orient2d(const HPoint& a, const HPoint& b, const HPoint& c) {
    const double left = (a.x - c.x) * (b.y - c.y);
    const double right = (a.y - c.y) * (b.x - c.x);
    const double det = left - right;
    const double bound = kOrientBound * (std::abs(left) + std::abs(right));
    if (det > bound || -det > bound) return det;

    const mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    return sign_of((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

double incircle(const HPoint& a, const HPoint& b, const HPoint& c, const HPoint& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double bound = kIncircleBound * permanent;
    if (det > bound || -det > bound) return det;

    const mpq_class qdx(d.x), qdy(d.y);
    const mpq_class ax = mpq_class(a.x) - qdx, ay = mpq_class(a.y) - qdy;
    const mpq_class bx = mpq_class(b.x) - qdx, by = mpq_class(b.y) - qdy;
    const mpq_class cx = mpq_class(c.x) - qdx, cy = mpq_class(c.y) - qdy;
    const mpq_class v = (ax * ax + ay * ay) * (bx * cy - cx * by) + (bx * bx + by * by) * (cx * ay - ax * cy) +
                        (cx * cx + cy * cy) * (ax * by - bx * ay);
    return sign_of(v);
}

}  // namespace limitends
