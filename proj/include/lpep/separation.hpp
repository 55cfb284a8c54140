#ifndef LPEP_SEPARATION_HPP_
#define LPEP_SEPARATION_HPP_

#include <optional>
#include <string>

#include "lpep/dataset.hpp"

namespace lpep {

struct SeparationReport {
  bool separated = false;
  std::optional<Vector> witness_direction;  // b with (2y-1) x'b >= 0, some > 0
  double lp_optimum = 0.0;
  std::string detector = "lp";  // "lp", or "irls" when the LP hit its pivot cap
};

// Separation test for (X, y) under the full design, via the linear program
//   maximize sum_i (2y_i-1) x_i'b   s.t.  0 <= (2y_i-1) x_i'b <= 1,  b free.
// A positive optimum certifies (quasi-)complete separation and the maximizer
// is returned as the witness; optimum 0 means the classes overlap and the
// logistic MLE exists. Solved by a dense simplex walking the vertices of the
// (p+1)-dimensional constraint polytope; if the pivot cap is ever hit the
// detector falls back to the IRLS divergence heuristic.
SeparationReport detect_separation(const Matrix& X, const BinaryVector& y);

inline SeparationReport detect_separation(const Dataset& data) {
  return detect_separation(data.X, data.y);
}

}  // namespace lpep

#endif  // LPEP_SEPARATION_HPP_
