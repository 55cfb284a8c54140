#ifndef LPEP_PG_HPP_
#define LPEP_PG_HPP_

#include "lpep/rng.hpp"

namespace lpep {

// Exact draw from the Polya-Gamma PG(1, c) distribution via the
// alternating-series accept/reject method (exponentially tilted Jacobi theta
// representation, truncation point t = 0.64). Devroye's algorithm as spelled
// out in Polson, Scott & Windle (2013) and Windle's thesis.
double sample_pg1(double c, RngStream& rng);

// E[PG(1,c)] = tanh(c/2)/(2c), with the limit 1/4 at c = 0.
double pg1_mean(double c);

}  // namespace lpep

#endif  // LPEP_PG_HPP_
