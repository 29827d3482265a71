#pragma once

// Independent table-based (triangular-scheme) B-spline basis evaluation used
// to cross-check the recursive implementation. Shares only the span
// conventions (half-open degree-0 spans, closed final span, 0/0 -> 0), which
// are part of the definition under test.

#include <vector>

#include "reefforge/splinecore.hpp"

namespace oracle {

// all basis values B_{i,degree}(t) for i = 0 .. knots.size() - degree - 2
inline std::vector<double> basis_table(int degree, double t,
                                       const reefforge::splinecore::KnotVector& knots) {
  const size_t len = knots.size();

  ptrdiff_t closed = -1;
  for (ptrdiff_t i = static_cast<ptrdiff_t>(len) - 2; i >= 0; --i) {
    if (knots[static_cast<size_t>(i)] < knots[static_cast<size_t>(i) + 1]) {
      closed = i;
      break;
    }
  }

  std::vector<double> level(len - 1, 0.0);
  for (size_t i = 0; i + 1 < len; ++i) {
    bool in = (knots[i] <= t && t < knots[i + 1]) ||
              (static_cast<ptrdiff_t>(i) == closed && t == knots[i + 1]);
    level[i] = in ? 1.0 : 0.0;
  }

  for (int d = 1; d <= degree; ++d) {
    std::vector<double> next(len - static_cast<size_t>(d) - 1, 0.0);
    for (size_t i = 0; i + static_cast<size_t>(d) + 1 < len; ++i) {
      double acc = 0.0;
      double den1 = knots[i + static_cast<size_t>(d)] - knots[i];
      if (den1 > 0.0) acc += (t - knots[i]) / den1 * level[i];
      double den2 = knots[i + static_cast<size_t>(d) + 1] - knots[i + 1];
      if (den2 > 0.0)
        acc += (knots[i + static_cast<size_t>(d) + 1] - t) / den2 * level[i + 1];
      next[i] = acc;
    }
    level = std::move(next);
  }
  return level;
}

}  // namespace oracle
