#pragma once

#include <cstddef>
#include <vector>

#include "reefforge/geometry.hpp"

namespace reefforge::splinecore {

/// Non-decreasing parameter sequence t_0 <= t_1 <= ... defining a B-spline's
/// domain. Length must be at least 2; a curve of degree k over n control
/// points requires length n + k + 1.
class KnotVector {
 public:
  explicit KnotVector(std::vector<double> knots);

  size_t size() const { return knots_.size(); }
  double operator[](size_t i) const { return knots_[i]; }
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  const std::vector<double>& values() const { return knots_; }

  /// Clamped vector [a,...,a, interior..., b,...,b] with degree+1 end
  /// multiplicity; gives endpoint interpolation.
  static KnotVector clamped(size_t num_control_points, int degree, double a = 0.0,
                            double b = 1.0);
  /// Uniform integer knots 0, 1, ..., n+degree.
  static KnotVector uniform(size_t num_control_points, int degree);

 private:
  std::vector<double> knots_;
};

/// Cox–de Boor basis function B_{i,k}(t).
///
/// Degree-0 spans are half-open [t_i, t_{i+1}) except the final nonempty
/// span, which is closed at its right end; without that, adjacent indicator
/// functions would overlap at shared knots and the basis would not sum to 1
/// there. Any recursion term with a zero denominator (repeated knots)
/// contributes 0.
///
/// Preconditions: i + k + 1 < knots.size(); t within [knots.front(), knots.back()].
double basis(size_t i, int degree, double t, const KnotVector& knots);

/// Planar B-spline curve: control points, degree, knots.
/// Valid parameter domain is [knots[degree], knots[n]] for n control points.
class BSplineCurve2D {
 public:
  BSplineCurve2D(std::vector<Vec2> control_points, int degree, KnotVector knots);

  const std::vector<Vec2>& control_points() const { return control_points_; }
  int degree() const { return degree_; }
  const KnotVector& knots() const { return knots_; }

  double domain_min() const { return knots_[static_cast<size_t>(degree_)]; }
  double domain_max() const { return knots_[control_points_.size()]; }

  /// Clamped curve over [0,1]; passes through the first and last control point.
  static BSplineCurve2D clamped(std::vector<Vec2> control_points, int degree = 3);

 private:
  std::vector<Vec2> control_points_;
  int degree_;
  KnotVector knots_;
};

/// Sum_i P_i * B_{i,k}(t). t must lie in the curve's valid domain.
Vec2 eval_curve(const BSplineCurve2D& curve, double t);

/// m >= 2 evaluations at uniformly spaced parameters across the valid domain;
/// the first and last points are the exact domain-endpoint evaluations.
std::vector<Vec2> sample_curve(const BSplineCurve2D& curve, size_t m);

}  // namespace reefforge::splinecore
