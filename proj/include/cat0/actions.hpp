#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cat0/groups.hpp"
#include "cat0/spaces.hpp"

namespace cat0 {

// Natural: left multiplication on trees and tree x line products, translation
// by the standard lattice on flat space, left translation on complexes.
// BowersRuaneDot is the natural product action. BowersRuaneStar shifts the
// height by a homomorphism from the tree group to R given per generator.
// LatticeLinear translates flat space by basis * coordinates.
enum class ActionKind { Natural, BowersRuaneDot, BowersRuaneStar, LatticeLinear, ComplexNatural };

struct ActionSpec {
  FamilyPtr group;
  Space space;
  ActionKind kind = ActionKind::Natural;
  // Height shift per tree generator (products only; zero for involutions).
  std::vector<Rational> shift;
  // Height of the orbit point of one line generator.
  Rational line_unit = Rational(1);
  // Flat space: column j is the translation of generator j.
  std::vector<std::vector<Rational>> basis;

  SpacePoint basepoint() const;
  std::string describe() const;
};

// Validating constructors.
ActionSpec tree_action(WeightedTree tree);
ActionSpec product_action(FamilyPtr group, WeightedTree tree, std::vector<Rational> shift = {},
                          Rational line_unit = Rational(1));
ActionSpec lattice_action(FamilyPtr group, std::vector<std::vector<Rational>> basis);
ActionSpec complex_action(FreeProductComplex complex);

SpacePoint orbit_point(const ActionSpec& A, const GroupElement& g);
// Orbit point of (w, line) for a product action, from the tree word of w.
// Avoids building the group element when w is very long.
SpacePoint product_orbit_point(const ActionSpec& A, const TreeWord& w, std::int64_t line);
SpacePoint apply(const ActionSpec& A, const GroupElement& g, const SpacePoint& x);

// Exact data for orbit points where the geometry allows it.
std::optional<Rational> orbit_height(const ActionSpec& A, const GroupElement& g);
std::optional<std::vector<Rational>> orbit_coords(const ActionSpec& A, const GroupElement& g);
std::optional<Rational> orbit_distance_sq(const ActionSpec& A, const GroupElement& g, const GroupElement& h);
// Squared distance from a x0 to the segment [x0, g x0].
std::optional<Rational> orbit_segment_distance_sq(const ActionSpec& A, const GroupElement& g, const GroupElement& a);
double orbit_segment_distance(const ActionSpec& A, const GroupElement& g, const GroupElement& a);
double orbit_distance(const ActionSpec& A, const GroupElement& g, const GroupElement& h);

struct NearElement {
  GroupElement element;
  double distance = 0;
};

// Every g with d(x, g x0) <= radius, sorted by distance and then by ball order.
std::vector<NearElement> elements_near_point(const ActionSpec& A, const SpacePoint& x, double radius);

struct QiConstants {
  Rational lambda = Rational(1);
  Rational C = Rational(0);
  Rational ball_radius = Rational(0);
  std::size_t pairs_checked = 0;
};

// Certifies (1/lambda) dY - C <= dX <= lambda dY + C for all displacements in
// ball(L) (unit word metric). lambda runs over the grid 1, 9/8, 10/8, ... and
// the first value whose minimal C (rounded up to the 1/8 grid) is at most
// c_max is returned with that C.
QiConstants estimate_qi_constants(const ActionSpec& AX, const ActionSpec& AY, const Rational& L,
                                  const Rational& c_max = Rational(0));
// Re-checks the sandwich on the given pairs.
bool qi_sandwich_holds(const ActionSpec& AX, const ActionSpec& AY, const QiConstants& qi, const GroupElement& g,
                       const GroupElement& h);

struct CocompactnessRadius {
  // Covering radius of the orbit from the model's closed form, when known.
  std::optional<Rational> exact_sq;
  double N = 0;
  // Largest distance to the orbit among sampled points.
  double sampled = 0;
  Rational horizon = Rational(0);
  std::size_t samples = 0;
};

CocompactnessRadius cocompactness_radius(const ActionSpec& A, const Rational& horizon);

// Unit word-metric weights for the action's group.
WeightAssignment unit_weights(const ActionSpec& A);

}  // namespace cat0
