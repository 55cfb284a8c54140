#ifndef LPEP_QUADRATURE_HPP_
#define LPEP_QUADRATURE_HPP_

#include <utility>

#include "lpep/dataset.hpp"

namespace lpep {

struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

// Gauss-Hermite rule for integral exp(-u^2) f(u) du (physicists' weight),
// nodes and weights by Golub-Welsch.
QuadratureRule gauss_hermite(int order);

// Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int order, double a, double b);

}  // namespace lpep

#endif  // LPEP_QUADRATURE_HPP_
