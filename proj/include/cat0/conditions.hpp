#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cat0/actions.hpp"
#include "cat0/boundary.hpp"
#include "cat0/star_scan.hpp"

namespace cat0 {

// Constants of the quantitative argument. N_tilde defaults to 2N.
struct ConstantSet {
  Rational lambda, C, N, M, N_tilde, R;
  Rational M_tilde;  // lambda (N + N_tilde) + C + M
  Rational M_prime;  // lambda (2N + 1) + 2M + C
  Rational r;        // lambda (R + C + M) + N
};

// Throws std::invalid_argument unless lambda, N, M, N_tilde, R > 0 and C >= 0.
ConstantSet derive_constants(const Rational& lambda, const Rational& C, const Rational& N, const Rational& M,
                             std::optional<Rational> N_tilde, const Rational& R);

// Rounds a length up to the grid with the given denominator.
Rational ceil_to_grid(double x, std::int64_t denominator = 8);

struct StarWitness {
  GroupElement g;
  GroupElement a;
  double x_distance = 0;   // d(a x0, [x0, g x0]) <= N
  double x_parameter = 0;  // arclength of the foot on [x0, g x0]
  double y_distance = 0;   // d(a y0, [y0, g y0]) > M
};

struct ConditionReport {
  Rational N, M;
  int ball_radius = 0;
  CocompactnessRadius covering_x, covering_y;
  bool covers = true;
  bool holds = false;
  std::size_t elements = 0;
  std::size_t pairs_hit = 0;
  std::size_t failures = 0;
  std::optional<StarWitness> witness;
  bool fast_path = false;
};

struct ScanOptions {
  int threads = 1;
  bool allow_fast_path = true;
  // Ball radius used to sample the covering radius.
  Rational covering_horizon = Rational(2);
};

ConditionReport check_condition_star(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, const Rational& M,
                                     int L, const ScanOptions& opt = {});

// Replays a witness independently (generic geometry, no scan).
bool replay_star_witness(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, const Rational& M,
                         const StarWitness& w);

struct MTableRow {
  int L = 0;
  double M_hat = 0;  // 0 when no pair was hit up to L
  std::optional<Rational> M_hat_sq;
  std::optional<GroupElement> g, a;
};

// Running maximum over |g| <= L' of the y-side distances of x-side hits.
std::vector<MTableRow> minimal_M_table(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, int L,
                                       const ScanOptions& opt = {});
std::vector<MTableRow> m_table_from_scan(const PairScanResult& scan);

struct NamedSequence {
  std::string name;
  std::vector<GroupElement> elements;
};

std::vector<SpacePoint> orbit_points(const ActionSpec& A, const std::vector<GroupElement>& elements);

struct DoubleStarRow {
  std::string name;
  CauchyReport x, y;
  ConvergenceVerdict x_limit, y_limit;
  bool refutes = false;
  // 1: Cauchy in X and not in Y; 2: the reverse; 0: no refutation.
  int case_tag = 0;
};

// Verdicts for precomputed orbit points of one sequence.
DoubleStarRow doublestar_row(std::string name, const Space& X, const Space& Y, const std::vector<SpacePoint>& px,
                             const std::vector<SpacePoint>& py, const CauchyOptions& opt);

std::vector<DoubleStarRow> check_condition_doublestar(const ActionSpec& AX, const ActionSpec& AY,
                                                      const std::vector<NamedSequence>& sequences,
                                                      const CauchyOptions& opt, std::size_t horizon);

struct BoundaryMapResult {
  BoundaryPoint alpha;
  std::vector<GroupElement> sequence;  // g_1, ..., g_horizon
  std::vector<double> x_distances;     // d(g_i x0, ray(i))
  ConvergenceVerdict image;
};

// Greedy nearest orbit point to the ray point at arclength i, ties broken by
// ball order; the images are handed to limit_point.
BoundaryMapResult build_boundary_map(const ActionSpec& AX, const ActionSpec& AY, const BoundaryPoint& alpha,
                                     const Rational& N, std::size_t horizon, const CauchyOptions& opt = {});

struct BoundCheck {
  std::string name;
  double bound = 0;
  double worst = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
};

struct MapBoundsReport {
  ConstantSet constants;
  BoundaryPoint alpha;
  BoundaryPoint image;
  std::vector<GroupElement> sequence;
  std::vector<BoundCheck> bounds;  // six entries, in order
  std::size_t total_violations() const;
};

MapBoundsReport verify_map_bounds(const ActionSpec& AX, const ActionSpec& AY, const BoundaryPoint& alpha,
                                    const ConstantSet& constants, std::size_t horizon, const CauchyOptions& opt = {});

}  // namespace cat0
