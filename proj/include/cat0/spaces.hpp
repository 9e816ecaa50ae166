#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cat0/groups.hpp"
#include "cat0/rational.hpp"

namespace cat0 {

// Cayley tree of a free group or a free product of Z and Z_2 factors, with
// one edge length per generator.
struct WeightedTree {
  FamilyPtr family;
  WeightAssignment weights;

  WeightedTree() = default;
  WeightedTree(FamilyPtr family, WeightAssignment weights);
  double weight(int gen) const { return to_double(weights[gen]); }
};

// A point of a weighted tree. Vertex points have no edge. Edge points sit at
// distance offset from the parent vertex along the edge to vertex * letter,
// where the parent is the endpoint nearer to the identity vertex.
struct TreePoint {
  TreeWord vertex;
  std::optional<TreeRun> edge;  // count == 1
  double offset = 0;
};

struct ProductSpace {
  WeightedTree tree;
};

struct ProductPoint {
  TreePoint tree;
  double height = 0;
};

struct EuclideanSpace {
  int dim = 2;
};

struct EuclideanPoint {
  std::vector<double> coords;
};

enum class PieceKind { FlatLattice, Cone, Interval, TreeTimesLine };

// Piece of a free-product complex, one per free factor. The factor's orbit of
// the piece basepoint is glued to the orbit of the complex basepoint.
struct PieceSpec {
  PieceKind kind = PieceKind::FlatLattice;
  // FlatLattice: column j is the image of factor generator j.
  std::vector<std::vector<Rational>> basis;
  // Cone: spoke length from the apex to each orbit point.
  Rational spoke = Rational(1);
  // Interval: length of [x0, s x0].
  Rational length = Rational(1);
  // TreeTimesLine: tree of the factor base and height per line generator.
  WeightedTree tree;
  Rational line_unit = Rational(1);

  static PieceSpec flat(std::vector<std::vector<Rational>> basis);
  static PieceSpec cone(Rational spoke = Rational(1));
  static PieceSpec interval(Rational length = Rational(1));
  static PieceSpec tree_times_line(WeightedTree tree, Rational line_unit = Rational(1));
};

// Tree of spaces for a free product: one copy g X_f of the factor piece per
// coset g G_f, glued at orbit points, so the nerve is the Bass-Serre tree.
struct FreeProductComplex {
  FamilyPtr group;
  std::vector<PieceSpec> pieces;

  FreeProductComplex() = default;
  FreeProductComplex(FamilyPtr group, std::vector<PieceSpec> pieces);
};

// Point of a complex. piece == -1 denotes the orbit point anchor * x0.
// Otherwise the point lies in the copy anchor * X_piece with local
// coordinates:
//   FlatLattice    position in R^n, anchor * x0 at the origin
//   Interval       {t}, t in [0, length], anchor * x0 at t = 0
//   Cone           {spoke index j, distance from apex}
//   TreeTimesLine  product, anchor * x0 at (identity vertex, 0)
struct ComplexPoint {
  GroupElement anchor;
  int piece = -1;
  std::vector<double> local;
  std::optional<ProductPoint> product;
};

using Space = std::variant<WeightedTree, ProductSpace, EuclideanSpace, FreeProductComplex>;
using SpacePoint = std::variant<TreePoint, ProductPoint, EuclideanPoint, ComplexPoint>;

struct PathSegment {
  SpacePoint start;
  SpacePoint end;
  double length = 0;
};

// Unit-speed piecewise geodesic; every segment lies in one convex piece.
struct GeodesicPath {
  std::vector<PathSegment> segments;
  double total = 0;
};

struct FootPoint {
  double distance = 0;
  double parameter = 0;  // arclength along the path
};

// ---- trees -----------------------------------------------------------------

TreePoint tree_vertex(TreeWord word);
double tree_depth(const WeightedTree& T, const TreePoint& p);
// Depth of the meeting point of the arcs from the identity vertex to p and q.
double tree_common_depth(const WeightedTree& T, const TreePoint& p, const TreePoint& q);
double tree_distance(const WeightedTree& T, const TreePoint& p, const TreePoint& q);
// Point at depth d on the arc from the identity vertex to p (0 <= d <= depth).
TreePoint tree_point_toward(const WeightedTree& T, const TreePoint& p, double d);
TreePoint tree_geodesic_eval(const WeightedTree& T, const TreePoint& p, const TreePoint& q, double s);
// Image of p under left multiplication by the element with tree word g.
TreePoint tree_translate(const WeightedTree& T, const TreeWord& g, const TreePoint& p);
bool tree_point_equal(const WeightedTree& T, const TreePoint& p, const TreePoint& q, double tol = 1e-12);

// ---- products --------------------------------------------------------------

double product_distance(const ProductSpace& X, const ProductPoint& p, const ProductPoint& q);
ProductPoint product_geodesic_eval(const ProductSpace& X, const ProductPoint& p, const ProductPoint& q, double s);

// ---- complexes -------------------------------------------------------------

// Local coordinates of the orbit point x * x0 inside the piece of its factor,
// for x in the factor group.
ComplexPoint complex_vertex_in_piece(const FreeProductComplex& S, const GroupElement& anchor, int piece,
                                     const GroupElement& factor_element);
double piece_local_distance(const FreeProductComplex& S, int piece, const ComplexPoint& p, const ComplexPoint& q);
// Distance between orbit points g x0 and h x0.
double complex_distance(const FreeProductComplex& S, const GroupElement& g, const GroupElement& h);
double complex_point_distance(const FreeProductComplex& S, const ComplexPoint& p, const ComplexPoint& q);
GeodesicPath complex_geodesic(const FreeProductComplex& S, const ComplexPoint& p, const ComplexPoint& q);
SpacePoint complex_geodesic_eval(const FreeProductComplex& S, const GroupElement& g, const GroupElement& h,
                                 double s);
ComplexPoint complex_orbit_point(const GroupElement& g);

// ---- generic ---------------------------------------------------------------

double distance(const Space& X, const SpacePoint& p, const SpacePoint& q);
GeodesicPath geodesic(const Space& X, const SpacePoint& p, const SpacePoint& q);
SpacePoint path_eval(const Space& X, const GeodesicPath& path, double s);
SpacePoint segment_eval(const Space& X, const PathSegment& seg, double s);

// Closed forms for trees, products, flat space and complex pieces.
FootPoint point_to_path(const Space& X, const SpacePoint& x, const GeodesicPath& path);
// Golden-section search on the convex function s -> d(x, path(s)), per segment.
FootPoint point_to_path_search(const Space& X, const SpacePoint& x, const GeodesicPath& path, double tol = 1e-9);

// Squared distance when every coordinate involved is an exact dyadic rational
// (orbit points, midpoints); nullopt otherwise or for complexes.
std::optional<Rational> exact_point_to_path_sq(const Space& X, const SpacePoint& x, const GeodesicPath& path);

// [path] meets the closed ball B(center, radius). When radius_sq is given and
// exact_point_to_path_sq applies, the decision is exact.
bool segment_ball_intersects(const Space& X, const GeodesicPath& path, const SpacePoint& center, double radius,
                             std::optional<Rational> radius_sq = std::nullopt);

std::string describe_point(const Space& X, const SpacePoint& p);
std::string describe_space(const Space& X);

}  // namespace cat0
