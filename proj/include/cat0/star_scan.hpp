#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cat0/actions.hpp"

namespace cat0 {

// Scan behind condition (*): for every g in ball(L) (unit word metric) and
// every a whose orbit point is within N of [x0, g x0] in X, measure the
// distance from a y0 to [y0, g y0] in Y. The elements a are found
// geometrically, so they are not restricted to a ball.
struct PairScanResult {
  int L = 0;
  // Indexed by the unit word length of g; negative when no pair was hit.
  std::vector<double> max_y_by_length;
  std::vector<std::optional<Rational>> max_y_sq_by_length;
  std::vector<std::optional<std::pair<GroupElement, GroupElement>>> argmax_by_length;
  std::size_t elements = 0;
  std::size_t hits = 0;
  std::size_t failures = 0;
  // Smallest failing pair by (|g|, letters of g, |a|, letters of a) when a
  // threshold M was given.
  std::optional<std::pair<GroupElement, GroupElement>> first_failure;
  bool fast_path = false;
};

// Both actions are tree x line product actions of the same group.
bool fast_scan_supported(const ActionSpec& AX, const ActionSpec& AY);

PairScanResult fast_pair_scan(const ActionSpec& AX, const ActionSpec& AY, const Rational& N,
                              std::optional<Rational> M, int L, int threads = 1);
PairScanResult generic_pair_scan(const ActionSpec& AX, const ActionSpec& AY, const Rational& N,
                                 std::optional<Rational> M, int L, int threads = 1);
// Fast path when supported, generic otherwise.
PairScanResult pair_scan(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, std::optional<Rational> M,
                         int L, int threads = 1);

// Exact test of strip_point_segment_sq(D, H, s, delta, h) <= K in 128-bit
// integer arithmetic; nullopt when the inputs do not fit.
std::optional<bool> strip_within_sq(const Rational& D, const Rational& H, const Rational& s, const Rational& delta,
                                    const Rational& h, const Rational& K);

// Total order used for deterministic witnesses: unit word length, then letters.
bool ball_order_less(const GroupElement& a, const GroupElement& b);

}  // namespace cat0
