#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "reefforge/errors.hpp"
#include "reefforge/rng.hpp"
#include "reefforge/splinecore.hpp"
#include "support/spline_oracle.hpp"

using namespace reefforge;
using namespace reefforge::splinecore;

namespace {

// random non-decreasing knot vector with occasional repeats
KnotVector random_knots(Rng& rng, int degree, size_t num_ctrl) {
  size_t len = num_ctrl + static_cast<size_t>(degree) + 1;
  std::vector<double> t;
  double v = rng.uniform_real(-2.0, 2.0);
  t.push_back(v);
  while (t.size() < len) {
    if (rng.uniform_double() < 0.25)
      t.push_back(t.back());  // repeated knot
    else
      t.push_back(t.back() + rng.uniform_real(0.05, 1.0));
  }
  return KnotVector(std::move(t));
}

// monotone-chain convex hull
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  auto half = [&](auto begin, auto end) {
    std::vector<Vec2> h;
    for (auto it = begin; it != end; ++it) {
      while (h.size() >= 2 && cross(h[h.size() - 1] - h[h.size() - 2], *it - h.back()) <= 0)
        h.pop_back();
      h.push_back(*it);
    }
    return h;
  };
  auto lower = half(pts.begin(), pts.end());
  auto upper = half(pts.rbegin(), pts.rend());
  lower.pop_back();
  upper.pop_back();
  lower.insert(lower.end(), upper.begin(), upper.end());
  return lower;
}

bool inside_hull(const std::vector<Vec2>& hull, const Vec2& p, double slack) {
  if (hull.size() < 3) {
    // all collinear: distance to the segment span
    for (const auto& h : hull)
      if (norm(p - h) <= slack) return true;
    if (hull.size() == 2) {
      Vec2 d = hull[1] - hull[0];
      double len2 = dot(d, d);
      double t = len2 > 0 ? std::clamp(dot(p - hull[0], d) / len2, 0.0, 1.0) : 0.0;
      return norm(p - (hull[0] + d * t)) <= slack;
    }
    return false;
  }
  for (size_t i = 0; i < hull.size(); ++i) {
    Vec2 a = hull[i], b = hull[(i + 1) % hull.size()];
    double side = cross(b - a, p - a);
    double edge_len = norm(b - a);
    if (side < -slack * std::max(edge_len, 1.0)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("knot vector validation") {
  CHECK_THROWS_AS(KnotVector({1.0}), ValidationError);
  CHECK_THROWS_AS(KnotVector({0.0, 1.0, 0.5}), ValidationError);
  CHECK_NOTHROW(KnotVector({0.0, 0.0, 1.0, 1.0}));

  auto clamped = KnotVector::clamped(4, 3);
  CHECK(clamped.size() == 8);
  CHECK(clamped[0] == 0.0);
  CHECK(clamped[3] == 0.0);
  CHECK(clamped[4] == 1.0);
  CHECK(clamped[7] == 1.0);

  auto uniform = KnotVector::uniform(4, 3);
  CHECK(uniform.size() == 8);
  CHECK(uniform[7] == 7.0);
}

TEST_CASE("basis degree-0 indicator") {
  KnotVector knots({0.0, 1.0, 2.0});
  CHECK(basis(0, 0, 0.5, knots) == 1.0);
  CHECK(basis(1, 0, 0.5, knots) == 0.0);
  CHECK(basis(0, 0, 1.0, knots) == 0.0);  // half-open span
  CHECK(basis(1, 0, 1.0, knots) == 1.0);
  CHECK(basis(1, 0, 2.0, knots) == 1.0);  // final nonempty span is closed
}

TEST_CASE("uniform cubic basis hits the cardinal values at integer knots") {
  KnotVector knots({0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(std::abs(basis(0, 3, 0.0, knots) - 0.0) < 1e-12);
  CHECK(std::abs(basis(0, 3, 1.0, knots) - 1.0 / 6.0) < 1e-12);
  CHECK(std::abs(basis(0, 3, 2.0, knots) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(basis(0, 3, 3.0, knots) - 1.0 / 6.0) < 1e-12);
  CHECK(std::abs(basis(0, 3, 4.0, knots) - 0.0) < 1e-12);
}

TEST_CASE("basis preconditions") {
  KnotVector knots({0, 1, 2, 3, 4});
  CHECK_THROWS_AS(basis(0, 2, 10.0, knots), DomainError);     // t outside knot range
  CHECK_THROWS_AS(basis(2, 2, 1.0, knots), ValidationError);  // i + k + 1 out of range
  CHECK_THROWS_AS(basis(0, -1, 1.0, knots), ValidationError);
}

TEST_CASE("partition of unity over random knot vectors, degrees 0..5") {
  Rng rng(20240915);
  for (int trial = 0; trial < 40; ++trial) {
    int degree = static_cast<int>(rng.uniform_int(0, 5));
    size_t num_ctrl = static_cast<size_t>(degree) + 1 + rng.uniform_index(8);
    KnotVector knots = random_knots(rng, degree, num_ctrl);
    double lo = knots[static_cast<size_t>(degree)];
    double hi = knots[num_ctrl];
    if (!(lo < hi)) continue;  // fully degenerate draw
    for (int s = 0; s < 200; ++s) {
      double t = lo + (hi - lo) * rng.uniform_double();
      double sum = 0.0;
      for (size_t i = 0; i < num_ctrl; ++i) sum += basis(i, degree, t, knots);
      REQUIRE(std::abs(sum - 1.0) < 1e-9);
    }
    // domain endpoints included
    for (double t : {lo, hi}) {
      double sum = 0.0;
      for (size_t i = 0; i < num_ctrl; ++i) sum += basis(i, degree, t, knots);
      REQUIRE(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("recursion agrees with the independent table evaluation") {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    int degree = static_cast<int>(rng.uniform_int(0, 5));
    size_t num_ctrl = static_cast<size_t>(degree) + 1 + rng.uniform_index(6);
    KnotVector knots = random_knots(rng, degree, num_ctrl);
    for (int s = 0; s < 50; ++s) {
      double t = knots.front() + (knots.back() - knots.front()) * rng.uniform_double();
      auto table = oracle::basis_table(degree, t, knots);
      REQUIRE(table.size() == knots.size() - static_cast<size_t>(degree) - 1);
      for (size_t i = 0; i < table.size(); ++i)
        REQUIRE(std::abs(basis(i, degree, t, knots) - table[i]) < 1e-12);
    }
  }
}

TEST_CASE("local support and non-negativity") {
  Rng rng(4242);
  for (int trial = 0; trial < 30; ++trial) {
    int degree = static_cast<int>(rng.uniform_int(0, 4));
    size_t num_ctrl = static_cast<size_t>(degree) + 1 + rng.uniform_index(5);
    KnotVector knots = random_knots(rng, degree, num_ctrl);

    ptrdiff_t closed = -1;
    for (ptrdiff_t i = static_cast<ptrdiff_t>(knots.size()) - 2; i >= 0; --i)
      if (knots[static_cast<size_t>(i)] < knots[static_cast<size_t>(i) + 1]) {
        closed = i;
        break;
      }
    if (closed < 0) continue;
    double closed_end = knots[static_cast<size_t>(closed) + 1];

    for (size_t i = 0; i + static_cast<size_t>(degree) + 1 < knots.size(); ++i) {
      double support_lo = knots[i];
      double support_hi = knots[i + static_cast<size_t>(degree) + 1];
      for (int s = 0; s < 80; ++s) {
        double t = knots.front() + (knots.back() - knots.front()) * rng.uniform_double();
        double b = basis(i, degree, t, knots);
        REQUIRE(b >= 0.0);
        bool in_support =
            (t >= support_lo && t < support_hi) || (t == closed_end && t == support_hi);
        if (!in_support) REQUIRE(b == 0.0);
      }
      // strictly positive at midpoints of nonempty spans inside the support
      for (size_t j = i; j < i + static_cast<size_t>(degree) + 1; ++j) {
        if (knots[j] < knots[j + 1]) {
          double mid = 0.5 * (knots[j] + knots[j + 1]);
          REQUIRE(basis(i, degree, mid, knots) > 0.0);
        }
      }
    }
  }
}

TEST_CASE("eval_curve: constant control points reproduce the point") {
  std::vector<Vec2> pts(5, Vec2{3.0, -1.5});
  auto curve = BSplineCurve2D::clamped(pts, 3);
  for (double t : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    Vec2 p = eval_curve(curve, t);
    CHECK(std::abs(p.x - 3.0) < 1e-12);
    CHECK(std::abs(p.y + 1.5) < 1e-12);
  }
}

TEST_CASE("eval_curve: clamped endpoint interpolation and the Bezier midpoint") {
  auto straight = BSplineCurve2D::clamped({{0, 0}, {1, 0}, {2, 0}, {3, 0}}, 3);
  Vec2 a = eval_curve(straight, 0.0);
  Vec2 b = eval_curve(straight, 1.0);
  CHECK(a.x == 0.0);
  CHECK(a.y == 0.0);
  CHECK(b.x == 3.0);
  CHECK(b.y == 0.0);

  auto arc = BSplineCurve2D::clamped({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, 3);
  Vec2 mid = eval_curve(arc, 0.5);
  CHECK(std::abs(mid.x - 0.5) < 1e-12);
  CHECK(std::abs(mid.y - 0.75) < 1e-12);

  CHECK_THROWS_AS(eval_curve(arc, 1.5), DomainError);
}

TEST_CASE("eval_curve stays inside the control-point convex hull") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    size_t n = 4 + rng.uniform_index(5);
    std::vector<Vec2> pts;
    for (size_t i = 0; i < n; ++i)
      pts.push_back({rng.uniform_real(-5, 5), rng.uniform_real(-5, 5)});
    auto curve = BSplineCurve2D::clamped(pts, 3);
    auto hull = convex_hull(pts);
    for (int s = 0; s <= 50; ++s) {
      double t = static_cast<double>(s) / 50.0;
      REQUIRE(inside_hull(hull, eval_curve(curve, t), 1e-9));
    }
  }
}

TEST_CASE("sample_curve") {
  auto curve = BSplineCurve2D::clamped({{0, 0}, {1, 1}, {2, 2}, {3, 3}}, 3);

  SUBCASE("m=2 gives exactly the endpoint evaluations") {
    auto pts = sample_curve(curve, 2);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0] == eval_curve(curve, 0.0));
    CHECK(pts[1] == eval_curve(curve, 1.0));
  }

  SUBCASE("m=5 on a straight-line curve stays collinear") {
    auto pts = sample_curve(curve, 5);
    REQUIRE(pts.size() == 5);
    for (const auto& p : pts) CHECK(std::abs(p.x - p.y) < 1e-12);
  }

  SUBCASE("endpoints are bitwise the domain evaluations") {
    auto pts = sample_curve(curve, 101);
    CHECK(pts.front() == eval_curve(curve, curve.domain_min()));
    CHECK(pts.back() == eval_curve(curve, curve.domain_max()));
  }

  SUBCASE("m < 2 rejected") { CHECK_THROWS_AS(sample_curve(curve, 1), ValidationError); }
}

TEST_CASE("uniform knot curve evaluates over its restricted domain") {
  std::vector<Vec2> pts{{0, 0}, {1, 2}, {2, -1}, {3, 1}, {4, 0}};
  BSplineCurve2D curve(pts, 3, KnotVector::uniform(pts.size(), 3));
  CHECK(curve.domain_min() == 3.0);
  CHECK(curve.domain_max() == 5.0);
  CHECK_NOTHROW(eval_curve(curve, 4.0));
  CHECK_THROWS_AS(eval_curve(curve, 2.0), DomainError);
}
