#pragma once

// Orientation and in-circle tests: floating-point filter with an exact rational fallback.

#include "limitends/hyp_geom.hpp"

namespace limitends {

/// > 0 if a, b, c are counter-clockwise, < 0 if clockwise, 0 if collinear. The sign is
/// exact; the magnitude is only meaningful when the filter succeeds.
double orient2d(const HPoint& a, const HPoint& b, const HPoint& c);

/// > 0 if d lies strictly inside the circle through the counter-clockwise a, b, c.
double incircle(const HPoint& a, const HPoint& b, const HPoint& c, const HPoint& d);

}  // namespace limitends
