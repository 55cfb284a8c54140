#include "lpep/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "lpep/errors.hpp"

namespace lpep {

namespace {

// Nodes/weights of the rule orthogonal to the given Jacobi matrix.
QuadratureRule golub_welsch(const Vector& offdiag, double total_mass) {
  const int m = static_cast<int>(offdiag.size()) + 1;
  Matrix J = Matrix::Zero(m, m);
  for (int k = 0; k < m - 1; ++k) {
    J(k, k + 1) = offdiag[k];
    J(k + 1, k) = offdiag[k];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  if (es.info() != Eigen::Success) throw NumericError("quadrature: eigensolver failed");
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(m);
  for (int k = 0; k < m; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = total_mass * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw ArgumentError("gauss_hermite: order must be positive");
  Vector off(order - 1);
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(k / 2.0);
  return golub_welsch(off, std::sqrt(3.14159265358979323846));
}

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw ArgumentError("gauss_legendre: order must be positive");
  if (!(b > a)) throw ArgumentError("gauss_legendre: need b > a");
  Vector off(order - 1);
  for (int k = 1; k < order; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  QuadratureRule rule = golub_welsch(off, 2.0);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int k = 0; k < order; ++k) {
    rule.nodes[k] = mid + half * rule.nodes[k];
    rule.weights[k] *= half;
  }
  return rule;
}

}  // namespace lpep
