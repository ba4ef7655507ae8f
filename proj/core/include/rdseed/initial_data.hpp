#pragma once

#include "rdseed/grid.hpp"

namespace rdseed {

/// Indicator of [lo, hi] on a 1D grid, rasterized by cell-overlap fractions so the
/// quadrature mass equals |[lo, hi] ∩ Omega| exactly.
ScalarField interval_indicator(const Grid& grid, double lo, double hi);

/// Block of mass m centered at `center` (1D).
ScalarField centered_block(const Grid& grid, double m, double center);

/// Disc of area m centered at (cx, cy) (2D), rasterized by supersampled overlap and
/// corrected on partially covered cells so the quadrature mass is m.
ScalarField disc_indicator(const Grid& grid, double m, double cx, double cy);

/// Full-height stripe {|x - cx| < w/2} of mass m (2D); w = m / (ymax - ymin).
ScalarField stripe_indicator(const Grid& grid, double m, double cx);

ScalarField constant_field(const Grid& grid, double c);

}  // namespace rdseed
