#pragma once

#include "powerone/measure.hpp"

namespace powerone {

/**
 * Kullback-Leibler divergence in nats,
 *
 *   KL(M||N) = sum_x M(x) log(M(x)/N(x)),
 *
 * with 0 log 0 := 0. Returns +infinity exactly when absolute continuity
 * fails, i.e. some point has M(x) > 0 and N(x) = 0.
 */
double kl_divergence(const DiscreteMeasure& m, const DiscreteMeasure& n);

/**
 * Donsker-Varadhan objective
 *
 *   integral f dM - log integral e^f dN,
 *
 * which never exceeds KL(M||N) and attains it at f = log(dM/dN) when the
 * supports agree. Evaluated in log domain so large f values do not
 * overflow.
 */
double dv_objective(const BLFunction& f, const DiscreteMeasure& m,
                    const DiscreteMeasure& n);

}  // namespace powerone
