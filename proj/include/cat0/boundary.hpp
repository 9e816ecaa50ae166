#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cat0/groups.hpp"
#include "cat0/spaces.hpp"

namespace cat0 {

// End of a tree given by prefix * period^infinity. An empty period with
// approximate == false is the finite marker (purely vertical rays in a
// product). An approximate end stores only the stable prefix observed in a
// non-periodic sequence; it supports rays up to the prefix length.
struct End {
  TreeWord prefix;
  TreeWord period;
  bool approximate = false;

  bool is_finite() const { return period.empty() && !approximate; }
};

// Builds prefix * period^infinity in normal form: the period is made
// primitive and the prefix as short as possible. Throws std::invalid_argument
// when the period is trivial, not cyclically reduced, or cancels against the
// prefix.
End periodic_end(const GroupFamily& tree_family, TreeWord prefix, TreeWord period);
End periodic_end(const GroupElement& prefix, const GroupElement& period);
End finite_end();
End approximate_end(TreeWord prefix);

bool same_end(const End& a, const End& b);
std::string describe_end(const End& e, const GroupFamily& tree_family);

enum class BoundaryKind { TreeEnd, ProductEnd, FlatDirection, ComplexDirection };

struct BoundaryPoint {
  BoundaryKind kind = BoundaryKind::ProductEnd;
  End end;
  // Angle above the tree factor in [-pi/2, pi/2]; products only.
  double theta = 0;
  // Unit vector; flat space only.
  std::vector<double> direction;
  // Limit of prefix * period^n x0; complexes only.
  std::optional<GroupElement> prefix;
  std::optional<GroupElement> period;
};

BoundaryPoint tree_boundary(End end);
BoundaryPoint product_boundary(End end, double theta);
BoundaryPoint flat_boundary(std::vector<double> direction);
BoundaryPoint complex_boundary(GroupElement prefix, GroupElement period);

std::string describe_boundary(const Space& X, const BoundaryPoint& a);

// Geodesic ray from the canonical basepoint toward a boundary point.
struct Ray {
  BoundaryPoint target;
};

// Identity vertex, (identity vertex, 0), the origin, or the orbit point of e.
SpacePoint canonical_basepoint(const Space& X);

// Point at arclength r on the ray from the canonical basepoint to a.
SpacePoint ray_eval(const Space& X, const BoundaryPoint& a, double r);
SpacePoint ray_eval(const Space& X, const Ray& ray, double r);
// Largest r accepted by ray_eval (infinite unless the end is approximate).
double ray_reach(const Space& X, const BoundaryPoint& a);
// Point at arclength min(r, d(x0, x)) on [x0, x].
SpacePoint segment_point(const Space& X, const SpacePoint& x, double r);

bool in_U(const Space& X, const SpacePoint& x, const BoundaryPoint& a, double r, double eps);
bool in_U_prime(const Space& X, const SpacePoint& x, const BoundaryPoint& a, double r, double eps);
// The same set centered at a point c of X instead of a boundary point.
bool in_U_point(const Space& X, const SpacePoint& x, const SpacePoint& c, double r, double eps);

double boundary_gap(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b, double r);

struct CauchyOptions {
  double eps0 = 1.0;
  // Radii to test; empty selects D/16, D/8, D/4, D/2 where D is the distance
  // from the basepoint to the last point of the first half of the sequence.
  std::vector<double> radii;
};

enum class CauchyVerdict { Cauchy, NotCauchy, Bounded };

struct CauchyWitness {
  double r = 0;
  std::size_t i0 = 0;
  std::size_t i = 0;
  double gap = 0;
};

// Finite-horizon semantics: for every tested radius some i0 in the first half
// of the sequence must have all later points in U(x_i0; r, eps0). Bounded
// means the second half never gets farther out than the first.
struct CauchyReport {
  CauchyVerdict verdict = CauchyVerdict::Bounded;
  std::size_t horizon = 0;
  std::vector<double> radii;
  std::vector<std::size_t> i0;
  std::optional<CauchyWitness> witness;
};

CauchyReport is_cauchy(const Space& X, const std::vector<SpacePoint>& points, const CauchyOptions& opt = {});

enum class LimitKind { ConvergesTo, Divergent, Bounded };

struct Subsequence {
  std::vector<std::size_t> indices;
  BoundaryPoint limit;
  double spread = 0;
};

struct ConvergenceVerdict {
  LimitKind kind = LimitKind::Bounded;
  // Candidate limit read off the tail; for ConvergesTo the certified limit.
  BoundaryPoint limit;
  // Tail statistics of the angle (products) or direction angle (plane).
  double mean_angle = 0;
  double spread = 0;
  // Divergent: two subsequential limits when the tail splits into two groups.
  std::vector<Subsequence> clusters;
  std::optional<CauchyWitness> witness;
  std::size_t horizon = 0;
  std::vector<double> radii;
};

// Reads a candidate boundary point off the tail of the sequence and certifies
// that every tested radius admits i1 in the first half with all later points
// in U(candidate; r, eps0). Complexes are not supported.
ConvergenceVerdict limit_point(const Space& X, const std::vector<SpacePoint>& points, const CauchyOptions& opt = {});

}  // namespace cat0
