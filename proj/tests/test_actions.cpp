#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "cat0/actions.hpp"
#include "cat0/experiments.hpp"

using namespace cat0;

namespace {

ProductPoint prod(const SpacePoint& p) { return std::get<ProductPoint>(p); }

GroupElement el(const ActionPair& P, const char* word, std::int64_t line) {
  return GroupElement::direct(P.group, parse_element(word, P.group->base()), line);
}

bool same_point(const Space& X, const SpacePoint& p, const SpacePoint& q) { return distance(X, p, q) < 1e-9; }

std::vector<std::vector<Rational>> basis(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return {{Rational(a), Rational(b)}, {Rational(c), Rational(d)}};
}

}  // namespace

TEST_CASE("orbit points of the dot and star actions") {
  const ActionPair P = bowers_ruane_pair();
  const ProductPoint b = prod(orbit_point(P.y, el(P, "b", 0)));
  CHECK(from_tree_word(P.group->base(), b.tree.vertex) == parse_element("b", P.group->base()));
  CHECK(b.height == doctest::Approx(2));
  for (int n = 0; n < 6; ++n) {
    const ProductPoint a = prod(orbit_point(P.x, el(P, ("a^" + std::to_string(n)).c_str(), 0)));
    CHECK(tree_word_letters(a.tree.vertex) == n);
    CHECK(a.height == 0);
  }
  CHECK(same_point(P.x.space, orbit_point(P.x, GroupElement::identity(P.group)), P.x.basepoint()));
  CHECK(same_point(P.y.space, orbit_point(P.y, GroupElement::identity(P.group)), P.y.basepoint()));
}

TEST_CASE("star action of the central generator raises the height by one") {
  const ActionPair P = bowers_ruane_pair();
  const ProductPoint x{tree_vertex(tree_word(parse_element("a b^-1", P.group->base()))), 0.75};
  const ProductPoint y = prod(apply(P.y, el(P, "e", 1), x));
  CHECK(y.height == doctest::Approx(1.75));
  CHECK(tree_point_equal(std::get<ProductSpace>(P.y.space).tree, y.tree, x.tree));
  CHECK(same_point(P.y.space, apply(P.y, GroupElement::identity(P.group), x), x));
}

TEST_CASE("homomorphism and isometry properties") {
  const ActionPair P = bowers_ruane_pair();
  const auto elems = ball(P.group, WeightAssignment::unit(*P.group), Rational(4));
  std::mt19937 rng(31);
  std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
  for (const ActionSpec* A : {&P.x, &P.y}) {
    for (int i = 0; i < 2000; ++i) {
      const auto& g = elems[pick(rng)];
      const auto& h = elems[pick(rng)];
      CHECK(same_point(A->space, orbit_point(*A, g * h), apply(*A, g, orbit_point(*A, h))));
    }
    for (int i = 0; i < 500; ++i) {
      const auto& g = elems[pick(rng)];
      const auto& h = elems[pick(rng)];
      const auto& k = elems[pick(rng)];
      const SpacePoint x = orbit_point(*A, h), y = orbit_point(*A, k);
      CHECK(distance(A->space, apply(*A, g, x), apply(*A, g, y)) == doctest::Approx(distance(A->space, x, y)));
      // Exact squared distance is invariant too.
      CHECK(orbit_distance_sq(*A, g * h, g * k).value() == orbit_distance_sq(*A, h, k).value());
    }
  }
}

TEST_CASE("lattice actions are isometric homomorphisms") {
  const auto Z2 = free_abelian(2);
  const ActionSpec A = lattice_action(Z2, basis(1, 1, 0, 1));
  const auto elems = ball(Z2, WeightAssignment::unit(*Z2), Rational(4));
  for (const auto& g : elems)
    for (const auto& h : elems) {
      CHECK(same_point(A.space, orbit_point(A, g * h), apply(A, g, orbit_point(A, h))));
    }
  CHECK_THROWS_AS(lattice_action(Z2, basis(1, 2, 2, 4)), std::invalid_argument);
}

TEST_CASE("quasi-isometry constants") {
  const auto F2 = free_group(2, {"a", "b"});
  const ActionSpec X = tree_action(WeightedTree(F2, WeightAssignment::unit(*F2)));
  const ActionSpec Y = tree_action(WeightedTree(F2, WeightAssignment({Rational(2), Rational(1)})));
  const QiConstants same = estimate_qi_constants(X, X, Rational(4));
  CHECK(same.lambda == Rational(1));
  CHECK(same.C == Rational(0));
  const QiConstants q = estimate_qi_constants(X, Y, Rational(6));
  CHECK(q.lambda == Rational(2));
  CHECK(q.C == Rational(0));

  // Fresh sample of 1000 pairs inside the certified ball never fails.
  const auto elems = ball(F2, WeightAssignment::unit(*F2), Rational(3));
  std::mt19937 rng(37);
  std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
  for (int i = 0; i < 1000; ++i) CHECK(qi_sandwich_holds(X, Y, q, elems[pick(rng)], elems[pick(rng)]));

  // A larger allowance for C never needs a larger lambda.
  const QiConstants loose = estimate_qi_constants(X, Y, Rational(6), Rational(4));
  CHECK(loose.lambda <= q.lambda);
  CHECK_THROWS_AS(estimate_qi_constants(X, tree_action(WeightedTree(free_group(3), WeightAssignment::unit(*free_group(3))))
                                        , Rational(2)),
                  std::invalid_argument);
}

TEST_CASE("covering radii") {
  const auto Z2 = free_abelian(2);
  const CocompactnessRadius flat = cocompactness_radius(lattice_action(Z2, {}), Rational(2));
  CHECK(flat.N == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(flat.sampled <= flat.N + 1e-9);

  const ActionPair P = bowers_ruane_pair();
  const CocompactnessRadius unit = cocompactness_radius(P.x, Rational(2));
  CHECK(unit.N == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(unit.sampled <= unit.N + 1e-9);
  CHECK(unit.sampled >= unit.N - 0.2);

  const auto F2 = P.group->base();
  const ActionSpec wide = product_action(P.group, WeightedTree(F2, WeightAssignment({Rational(2), Rational(1)})));
  const CocompactnessRadius w = cocompactness_radius(wide, Rational(2));
  CHECK(w.N == doctest::Approx(std::sqrt(5.0) / 2));
  CHECK(w.sampled <= w.N + 1e-9);
}

namespace {

// Every element within radius of x, by brute force over a word ball that is
// large enough for the given complex and radius.
std::set<std::string> brute_near(const ActionSpec& A, const SpacePoint& x, double radius, int word_ball) {
  std::set<std::string> out;
  const auto& S = std::get<FreeProductComplex>(A.space);
  for (const auto& g : ball(A.group, WeightAssignment::unit(*A.group), Rational(word_ball)))
    if (complex_point_distance(S, std::get<ComplexPoint>(x), complex_orbit_point(g)) <= radius) out.insert(g.to_string());
  return out;
}

void check_near_search(const ActionSpec& A, int word_ball, std::uint32_t seed) {
  const auto& G = A.group;
  const auto elems = ball(G, WeightAssignment::unit(*G), Rational(2));
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, elems.size() - 1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 40; ++i) {
    const GeodesicPath path = geodesic(A.space, orbit_point(A, elems[pick(rng)]), orbit_point(A, elems[pick(rng)]));
    const SpacePoint x = path_eval(A.space, path, u(rng) * path.total);
    const double radius = 0.5 + 1.5 * u(rng);
    std::set<std::string> got;
    for (const auto& n : elements_near_point(A, x, radius)) {
      got.insert(n.element.to_string());
      CHECK(n.distance == doctest::Approx(distance(A.space, x, orbit_point(A, n.element))));
    }
    const auto expect = brute_near(A, x, radius, word_ball);
    for (const auto& g : got)
      if (!expect.count(g)) MESSAGE("extra " << g << " radius " << radius << " at " << describe_point(A.space, x));
    for (const auto& g : expect)
      if (!got.count(g)) MESSAGE("missing " << g << " radius " << radius << " at " << describe_point(A.space, x));
    CHECK(got == expect);
  }
}

}  // namespace

TEST_CASE("elements near a point of a complex match brute force") {
  const auto Z2 = free_abelian(2);
  const auto G = free_product({Z2, finite_cyclic(2)});
  check_near_search(complex_action(FreeProductComplex(G, {PieceSpec::flat(basis(1, 0, 0, 1)), PieceSpec::interval()})),
                    7, 41);
  const auto H = free_product({free_abelian(1), finite_cyclic(3)});
  check_near_search(
      complex_action(FreeProductComplex(H, {PieceSpec::flat({{Rational(1)}}), PieceSpec::cone(Rational(1, 2))})), 8,
      43);
}

TEST_CASE("elements near a point of a product") {
  const ActionPair P = bowers_ruane_pair();
  const auto elems = ball(P.group, WeightAssignment::unit(*P.group), Rational(9));
  const ProductPoint x{tree_vertex(tree_word(parse_element("a b", P.group->base()))), 0.5};
  std::set<std::string> expect;
  for (const auto& g : elems)
    if (distance(P.y.space, x, orbit_point(P.y, g)) <= 1.6) expect.insert(g.to_string());
  std::set<std::string> got;
  double prev = 0;
  for (const auto& n : elements_near_point(P.y, x, 1.6)) {
    got.insert(n.element.to_string());
    CHECK(n.distance >= prev);
    prev = n.distance;
  }
  CHECK(got == expect);
}
