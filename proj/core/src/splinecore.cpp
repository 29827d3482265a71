#include "reefforge/splinecore.hpp"

#include <string>

#include "reefforge/errors.hpp"

namespace reefforge::splinecore {

KnotVector::KnotVector(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw ValidationError("knot vector needs at least 2 knots");
  for (size_t i = 0; i + 1 < knots_.size(); ++i)
    if (knots_[i] > knots_[i + 1])
      throw ValidationError("knot vector must be non-decreasing (index " + std::to_string(i) +
                            ")");
}

KnotVector KnotVector::clamped(size_t num_control_points, int degree, double a, double b) {
  size_t k = static_cast<size_t>(degree);
  if (num_control_points < k + 1)
    throw ValidationError("clamped knots: need at least degree+1 control points");
  size_t len = num_control_points + k + 1;
  std::vector<double> t(len);
  size_t interior = len - 2 * (k + 1);
  for (size_t i = 0; i <= k; ++i) t[i] = a;
  for (size_t i = 0; i < interior; ++i)
    t[k + 1 + i] = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(interior + 1);
  for (size_t i = len - k - 1; i < len; ++i) t[i] = b;
  return KnotVector(std::move(t));
}

KnotVector KnotVector::uniform(size_t num_control_points, int degree) {
  size_t len = num_control_points + static_cast<size_t>(degree) + 1;
  std::vector<double> t(len);
  for (size_t i = 0; i < len; ++i) t[i] = static_cast<double>(i);
  return KnotVector(std::move(t));
}

namespace {

// Index of the last i with t_i < t_{i+1}; the degree-0 span closed at its
// right end. Knot vectors are non-decreasing with >= 2 entries, so a fully
// degenerate (all-equal) vector has none.
ptrdiff_t final_nonempty_span(const KnotVector& knots) {
  for (ptrdiff_t i = static_cast<ptrdiff_t>(knots.size()) - 2; i >= 0; --i)
    if (knots[static_cast<size_t>(i)] < knots[static_cast<size_t>(i) + 1]) return i;
  return -1;
}

double basis_impl(size_t i, int k, double t, const KnotVector& knots,
                  ptrdiff_t closed_span) {
  if (k == 0) {
    double ti = knots[i];
    double ti1 = knots[i + 1];
    if (ti <= t && t < ti1) return 1.0;
    if (static_cast<ptrdiff_t>(i) == closed_span && t == ti1) return 1.0;
    return 0.0;
  }
  // zero-denominator terms contribute 0 (repeated knots)
  double acc = 0.0;
  double d1 = knots[i + static_cast<size_t>(k)] - knots[i];
  if (d1 > 0.0) acc += (t - knots[i]) / d1 * basis_impl(i, k - 1, t, knots, closed_span);
  double d2 = knots[i + static_cast<size_t>(k) + 1] - knots[i + 1];
  if (d2 > 0.0)
    acc += (knots[i + static_cast<size_t>(k) + 1] - t) / d2 *
           basis_impl(i + 1, k - 1, t, knots, closed_span);
  return acc;
}

}  // namespace

double basis(size_t i, int degree, double t, const KnotVector& knots) {
  if (degree < 0) throw ValidationError("basis: negative degree");
  if (i + static_cast<size_t>(degree) + 1 >= knots.size())
    throw ValidationError("basis: index " + std::to_string(i) + " out of range for degree " +
                          std::to_string(degree) + " and " + std::to_string(knots.size()) +
                          " knots");
  if (t < knots.front() || t > knots.back())
    throw DomainError("basis: t=" + std::to_string(t) + " outside knot range [" +
                      std::to_string(knots.front()) + ", " + std::to_string(knots.back()) +
                      "]");
  return basis_impl(i, degree, t, knots, final_nonempty_span(knots));
}

BSplineCurve2D::BSplineCurve2D(std::vector<Vec2> control_points, int degree, KnotVector knots)
    : control_points_(std::move(control_points)), degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw ValidationError("curve: negative degree");
  if (control_points_.size() < static_cast<size_t>(degree_) + 1)
    throw ValidationError("curve: need at least degree+1 control points");
  if (knots_.size() != control_points_.size() + static_cast<size_t>(degree_) + 1)
    throw ValidationError("curve: knot count must be control_points + degree + 1 (got " +
                          std::to_string(knots_.size()) + ")");
}

BSplineCurve2D BSplineCurve2D::clamped(std::vector<Vec2> control_points, int degree) {
  KnotVector knots = KnotVector::clamped(control_points.size(), degree);
  return BSplineCurve2D(std::move(control_points), degree, std::move(knots));
}

Vec2 eval_curve(const BSplineCurve2D& curve, double t) {
  if (t < curve.domain_min() || t > curve.domain_max())
    throw DomainError("eval_curve: t=" + std::to_string(t) + " outside valid domain [" +
                      std::to_string(curve.domain_min()) + ", " +
                      std::to_string(curve.domain_max()) + "]");
  const auto& pts = curve.control_points();
  Vec2 acc{0.0, 0.0};
  for (size_t i = 0; i < pts.size(); ++i) {
    double b = basis(i, curve.degree(), t, curve.knots());
    if (b != 0.0) acc += pts[i] * b;
  }
  return acc;
}

std::vector<Vec2> sample_curve(const BSplineCurve2D& curve, size_t m) {
  if (m < 2) throw ValidationError("sample_curve: need at least 2 samples");
  double a = curve.domain_min();
  double b = curve.domain_max();
  std::vector<Vec2> out;
  out.reserve(m);
  for (size_t j = 0; j < m; ++j) {
    // endpoints exact so they compare bitwise with eval_curve at a and b
    double t = (j == 0) ? a
               : (j == m - 1)
                   ? b
                   : a + (b - a) * static_cast<double>(j) / static_cast<double>(m - 1);
    out.push_back(eval_curve(curve, t));
  }
  return out;
}

}  // namespace reefforge::splinecore
