#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace cat0 {

// Squared distance from a point to a straight segment in a flat strip, used
// for both the tree x line product and Euclidean pieces.
//
// The segment runs from (0, 0) to (D, H), where the first coordinate is the
// position along a tree arc and the second is height. The point sits at
// height h, its tree projection onto the arc is at position s in [0, D], and
// it lies off the arc at tree distance delta. The tree distance from the point
// to the arc position u is delta + |u - s|, so the squared distance to the
// segment point with parameter t in [0, 1] is
//   (delta + |tD - s|)^2 + (h - tH)^2,
// which is convex in t. Each of the two quadratic pieces is minimized over
// its own interval and the smaller value wins.
//
// Works for double and for exact rationals. Returns the minimum and writes
// the minimizing parameter t.
template <class T>
T strip_point_segment_sq(const T& D, const T& H, const T& s, const T& delta, const T& h, T* t_out = nullptr) {
  const T zero(0), one(1);
  auto value = [&](const T& t) {
    T along = t * D - s;
    if (along < zero) along = -along;
    const T a = delta + along;
    const T b = h - t * H;
    return a * a + b * b;
  };
  auto clamp = [](const T& v, const T& lo, const T& hi) { return v < lo ? lo : (v > hi ? hi : v); };
  const T norm = D * D + H * H;
  if (norm == zero) {
    if (t_out) *t_out = zero;
    return value(zero);
  }
  if (D == zero) {
    const T t = clamp(h / H, zero, one);
    if (t_out) *t_out = t;
    return value(t);
  }
  const T split = s / D;
  // Piece t*D >= s: derivative zero at t = (H h + D (s - delta)) / norm.
  const T t_hi = clamp((H * h + D * (s - delta)) / norm, split, one);
  // Piece t*D <= s: derivative zero at t = (D (s + delta) + H h) / norm.
  const T t_lo = clamp((D * (s + delta) + H * h) / norm, zero, split);
  const T v_hi = value(t_hi);
  const T v_lo = value(t_lo);
  if (v_lo <= v_hi) {
    if (t_out) *t_out = t_lo;
    return v_lo;
  }
  if (t_out) *t_out = t_hi;
  return v_hi;
}

// Squared distance from x to the segment [p, q] in R^n.
template <class T>
T euclid_point_segment_sq(const std::vector<T>& x, const std::vector<T>& p, const std::vector<T>& q,
                          T* t_out = nullptr) {
  const T zero(0), one(1);
  T dd = zero, dot = zero;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T d = q[i] - p[i];
    dd += d * d;
    dot += (x[i] - p[i]) * d;
  }
  T t = zero;
  if (dd != zero) {
    t = dot / dd;
    if (t < zero) t = zero;
    if (t > one) t = one;
  }
  T out = zero;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T c = p[i] + t * (q[i] - p[i]) - x[i];
    out += c * c;
  }
  if (t_out) *t_out = t;
  return out;
}

}  // namespace cat0
