#pragma once

#include "powerone/measure.hpp"

namespace powerone {

/// Total-variation distance  (1/2) sum_x |M(x) - N(x)|, in [0, 1].
double tv_distance(const DiscreteMeasure& m, const DiscreteMeasure& n);

/**
 * Bounded-Lipschitz distance
 *
 *   sup { integral f dM - integral f dN : max(sup|f|, Lip(f)) <= 1 },
 *
 * computed as a linear program over the values of f at the points. The
 * norm convention max(sup-norm, Lipschitz constant) <= 1 is baked into all
 * radii reported by this project; under it, bl(delta_x, delta_y) equals
 * min(d(x,y), 2).
 */
double bl_distance(const DiscreteMeasure& m, const DiscreteMeasure& n);

/// Same, also returning a maximizing test function.
double bl_distance_with_witness(const DiscreteMeasure& m,
                                const DiscreteMeasure& n, BLFunction* witness);

}  // namespace powerone
