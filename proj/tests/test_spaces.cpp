#include <doctest.h>

#include <cmath>
#include <random>

#include "cat0/oracles.hpp"
#include "cat0/spaces.hpp"

using namespace cat0;

namespace {

const FamilyPtr& F2() {
  static const FamilyPtr f = free_group(2, {"a", "b"});
  return f;
}

TreeWord word(const char* text) { return tree_word(parse_element(text, F2())); }

// Random point of a tree at depth at most max_letters + 1 edges, with edge
// offsets on the quarter grid so graph oracles locate them exactly.
TreePoint random_tree_point(std::mt19937& rng, const WeightedTree& T, int max_letters) {
  std::uniform_int_distribution<int> len(0, max_letters), gen(0, 1), sign(0, 1), coin(0, 2);
  TreeWord w;
  for (int n = len(rng); n > 0; --n) append_run(w, TreeRun{gen(rng), sign(rng) ? 1 : -1, 1}, *T.family);
  TreePoint p = tree_vertex(w);
  if (coin(rng) == 0) {
    // Extend by one letter that does not cancel the last one.
    while (true) {
      TreeRun r{gen(rng), sign(rng) ? 1 : -1, 1};
      if (!w.empty() && w.back().gen == r.gen && w.back().sign == -r.sign) continue;
      const int quarters = static_cast<int>(std::lround(T.weight(r.gen) * 4));
      std::uniform_int_distribution<int> q(1, quarters - 1);
      if (quarters < 2) break;
      p.edge = r;
      p.offset = q(rng) / 4.0;
      break;
    }
  }
  return p;
}

FreeProductComplex z2_interval() {
  const auto G = free_product({free_abelian(2), finite_cyclic(2)});
  return FreeProductComplex(G, {PieceSpec::flat({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}),
                                PieceSpec::interval(Rational(1))});
}

GroupElement lattice(const FamilyPtr& G, std::int64_t x, std::int64_t y) {
  return GroupElement::syllable(G, 0, GroupElement::abelian(G->factors()[0], {x, y}));
}

GroupElement swap_s(const FamilyPtr& G) {
  return GroupElement::syllable(G, 1, GroupElement::generator(G->factors()[1], 0));
}

}  // namespace

TEST_CASE("tree distances") {
  const WeightedTree unit(F2(), WeightAssignment::unit(*F2()));
  const WeightedTree T21(F2(), WeightAssignment({Rational(2), Rational(1)}));
  CHECK(tree_distance(unit, tree_vertex({}), tree_vertex(word("a b"))) == doctest::Approx(2));
  CHECK(tree_distance(T21, tree_vertex({}), tree_vertex(word("a b"))) == doctest::Approx(3));
}

TEST_CASE("tree distance equals Dijkstra on the subdivided ball for 200 random pairs") {
  const WeightedTree T21(F2(), WeightAssignment({Rational(2), Rational(1)}));
  const WeightedTree unit(F2(), WeightAssignment::unit(*F2()));
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    const WeightedTree& T = i % 2 ? T21 : unit;
    // Depth at most 2 letters plus one edge, weight <= 2 each: radius 6.
    const TreePoint p = random_tree_point(rng, T, 2), q = random_tree_point(rng, T, 2);
    const double oracle = tree_graph_distance(T, p, q, 6, 0.25);
    CHECK(tree_distance(T, p, q) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("tree geodesic evaluation") {
  const WeightedTree unit(F2(), WeightAssignment::unit(*F2()));
  const WeightedTree T21(F2(), WeightAssignment({Rational(2), Rational(1)}));
  const TreePoint e = tree_vertex({});
  CHECK(tree_point_equal(unit, tree_geodesic_eval(unit, e, tree_vertex(word("a^2")), 0), e));
  CHECK(tree_point_equal(unit, tree_geodesic_eval(unit, e, tree_vertex(word("a^2")), 1), tree_vertex(word("a"))));
  const TreePoint m = tree_geodesic_eval(T21, e, tree_vertex(word("a b")), 2.5);
  REQUIRE(m.edge.has_value());
  CHECK(from_tree_word(F2(), m.vertex) == parse_element("a", F2()));
  CHECK(m.edge->gen == 1);
  CHECK(m.offset == doctest::Approx(0.5));
  CHECK_THROWS(tree_geodesic_eval(unit, e, tree_vertex(word("a")), 2));
}

TEST_CASE("product distance and geodesics") {
  const ProductSpace X{WeightedTree(F2(), WeightAssignment::unit(*F2()))};
  const ProductPoint o{tree_vertex({}), 0};
  CHECK(product_distance(X, o, ProductPoint{tree_vertex({}), 5}) == doctest::Approx(5));
  for (int i = 1; i <= 8; ++i)
    for (int n = 1; n <= 4; ++n) {
      const auto g = power(parse_element(("a^" + std::to_string(i) + " b^" + std::to_string(i)).c_str(), F2()), n);
      const ProductPoint q{tree_vertex(tree_word(g)), 2.0 * n * i};
      CHECK(product_distance(X, o, q) == doctest::Approx(2.0 * n * i * std::sqrt(2.0)));
    }
  const ProductPoint end{tree_vertex(word("a^4")), 4};
  const ProductPoint mid = product_geodesic_eval(X, o, end, 2 * std::sqrt(2.0));
  CHECK(tree_point_equal(X.tree, mid.tree, tree_vertex(word("a^2")), 1e-9));
  CHECK(mid.height == doctest::Approx(2));
  const ProductPoint last = product_geodesic_eval(X, o, end, product_distance(X, o, end));
  CHECK(tree_point_equal(X.tree, last.tree, end.tree, 1e-9));
}

TEST_CASE("product geodesic projects to the tree geodesic at s cos(phi)") {
  const ProductSpace X{WeightedTree(F2(), WeightAssignment({Rational(2), Rational(1)}))};
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> h(-3, 3), u(0, 1);
  for (int i = 0; i < 100; ++i) {
    const ProductPoint p{random_tree_point(rng, X.tree, 3), h(rng)};
    const ProductPoint q{random_tree_point(rng, X.tree, 3), h(rng)};
    const double d = product_distance(X, p, q);
    const double t = tree_distance(X.tree, p.tree, q.tree);
    const double s = u(rng) * d;
    const ProductPoint z = product_geodesic_eval(X, p, q, s);
    const double cosphi = d > 0 ? t / d : 0;
    CHECK(tree_point_equal(X.tree, z.tree, tree_geodesic_eval(X.tree, p.tree, q.tree, s * cosphi), 1e-9));
  }
}

TEST_CASE("product distance matches the tree oracle combined with height") {
  const ProductSpace X{WeightedTree(F2(), WeightAssignment::unit(*F2()))};
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> h(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const ProductPoint p{random_tree_point(rng, X.tree, 3), h(rng)};
    const ProductPoint q{random_tree_point(rng, X.tree, 3), h(rng)};
    CHECK(product_distance(X, p, q) == doctest::Approx(product_graph_distance(X, p, q, 6, 0.25)).epsilon(1e-9));
  }
}

TEST_CASE("complex distances") {
  const FreeProductComplex S = z2_interval();
  const FamilyPtr& G = S.group;
  const GroupElement e = GroupElement::identity(G);
  const GroupElement s = swap_s(G);
  CHECK(complex_distance(S, e, s) == doctest::Approx(1));
  CHECK(complex_distance(S, e, e) == 0);
  const GroupElement g = lattice(G, 1, 1) * s * lattice(G, 1, 0);
  CHECK(complex_distance(S, e, g) == doctest::Approx(std::sqrt(2.0) + 2));
  CHECK(complex_graph_distance(S, g, 3, 2, 0.01) == doctest::Approx(std::sqrt(2.0) + 2).epsilon(1e-9));
}

TEST_CASE("complex geodesic walks through the glued basepoint") {
  const FreeProductComplex S = z2_interval();
  const FamilyPtr& G = S.group;
  const GroupElement e = GroupElement::identity(G);
  const GroupElement g = lattice(G, 2, 0) * swap_s(G);
  const SpacePoint start = complex_geodesic_eval(S, e, g, 0);
  CHECK(complex_point_distance(S, std::get<ComplexPoint>(start), complex_orbit_point(e)) == doctest::Approx(0));
  const SpacePoint mid = complex_geodesic_eval(S, e, g, 2);
  CHECK(complex_point_distance(S, std::get<ComplexPoint>(mid), complex_orbit_point(lattice(G, 2, 0))) ==
        doctest::Approx(0).epsilon(1e-12));
  CHECK_THROWS(complex_geodesic_eval(S, e, g, 3.5));
}

TEST_CASE("complex geodesics have unit speed") {
  const FreeProductComplex S = z2_interval();
  const FamilyPtr& G = S.group;
  const Space X = S;
  const GroupElement e = GroupElement::identity(G);
  const GroupElement g = lattice(G, 1, 2) * swap_s(G) * lattice(G, -1, 1) * swap_s(G);
  const GeodesicPath path = geodesic(X, complex_orbit_point(e), complex_orbit_point(g));
  CHECK(path.total == doctest::Approx(std::sqrt(5.0) + 1 + std::sqrt(2.0) + 1));
  double sum = 0;
  for (const auto& seg : path.segments) sum += seg.length;
  CHECK(sum == doctest::Approx(path.total));
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0, path.total);
  for (int i = 0; i < 200; ++i) {
    const double s = u(rng), t = u(rng);
    CHECK(distance(X, path_eval(X, path, s), path_eval(X, path, t)) <= std::abs(s - t) + 1e-9);
  }
  // Inside the first flat segment the speed is exactly one.
  CHECK(distance(X, path_eval(X, path, 0.3), path_eval(X, path, 1.7)) == doctest::Approx(1.4));
}

TEST_CASE("point to path distance") {
  const ProductSpace P{WeightedTree(F2(), WeightAssignment::unit(*F2()))};
  const Space X = P;
  const GeodesicPath path = geodesic(X, ProductPoint{tree_vertex({}), 0}, ProductPoint{tree_vertex(word("a^3")), 0});
  CHECK(point_to_path(X, ProductPoint{tree_vertex(word("b")), 0}, path).distance == doctest::Approx(1));
  CHECK(point_to_path(X, ProductPoint{tree_vertex(word("a^2")), 0}, path).distance == doctest::Approx(0));
}

TEST_CASE("point to path distance matches dense sampling on 100 instances") {
  const ProductSpace P{WeightedTree(F2(), WeightAssignment({Rational(2), Rational(1)}))};
  const Space X = P;
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> h(-3, 3);
  for (int i = 0; i < 100; ++i) {
    const ProductPoint a{random_tree_point(rng, P.tree, 3), h(rng)};
    const ProductPoint b{random_tree_point(rng, P.tree, 3), h(rng)};
    const ProductPoint x{random_tree_point(rng, P.tree, 3), h(rng)};
    const GeodesicPath path = geodesic(X, a, b);
    double best = 1e300;
    const int samples = 10000;
    for (int k = 0; k <= samples; ++k)
      best = std::min(best, distance(X, x, path_eval(X, path, path.total * k / samples)));
    const FootPoint f = point_to_path(X, x, path);
    CHECK(f.distance <= best + 1e-9);
    // The sampling grid is within half a step of the true foot point.
    CHECK(f.distance >= best - path.total / samples);
    CHECK(point_to_path_search(X, x, path).distance == doctest::Approx(f.distance).epsilon(1e-6));
  }
}

TEST_CASE("segment ball intersection") {
  const ProductSpace P{WeightedTree(F2(), WeightAssignment::unit(*F2()))};
  const Space X = P;
  const GeodesicPath path = geodesic(X, ProductPoint{tree_vertex({}), 0}, ProductPoint{tree_vertex(word("a^4")), 0});
  const ProductPoint c{tree_vertex(word("a^2")), 3};
  CHECK_FALSE(segment_ball_intersects(X, path, c, 2.9));
  CHECK(segment_ball_intersects(X, path, c, 3.0, Rational(9)));
  CHECK(segment_ball_intersects(X, path, ProductPoint{tree_vertex(word("a")), 0}, 0, Rational(0)));

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> h(-3, 3), r(0, 4);
  for (int i = 0; i < 200; ++i) {
    const ProductPoint a{random_tree_point(rng, P.tree, 3), h(rng)};
    const ProductPoint b{random_tree_point(rng, P.tree, 3), h(rng)};
    const ProductPoint x{random_tree_point(rng, P.tree, 3), h(rng)};
    const GeodesicPath pth = geodesic(X, a, b);
    double best = 1e300;
    for (int k = 0; k <= 10000; ++k) best = std::min(best, distance(X, x, path_eval(X, pth, pth.total * k / 10000)));
    const double radius = r(rng);
    // Skip radii inside the sampling resolution band.
    if (std::abs(best - radius) < pth.total / 10000 + 1e-9) continue;
    CHECK(segment_ball_intersects(X, pth, x, radius) == (best <= radius));
  }
}

TEST_CASE("metric axioms and CAT(0) midpoint convexity") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> h(-3, 3);
  const WeightedTree T(F2(), WeightAssignment({Rational(2), Rational(1)}));
  const Space tree = T;
  const Space prod = ProductSpace{T};
  const Space flat = EuclideanSpace{2};
  const FreeProductComplex S = z2_interval();
  const Space cplx = S;
  const auto& G = S.group;
  std::uniform_int_distribution<int> c(-2, 2), coin(0, 1);

  auto random_point = [&](const Space& X) -> SpacePoint {
    if (&X == &tree) return random_tree_point(rng, T, 3);
    if (&X == &prod) return ProductPoint{random_tree_point(rng, T, 3), h(rng)};
    if (&X == &flat) return EuclideanPoint{{h(rng), h(rng)}};
    // Complex: a point on the geodesic between two random orbit points.
    auto elem = [&] {
      GroupElement g = GroupElement::identity(G);
      for (int k = 0; k < 3; ++k) g *= coin(rng) ? lattice(G, c(rng), c(rng)) : swap_s(G);
      return g;
    };
    const GeodesicPath p = geodesic(X, complex_orbit_point(elem()), complex_orbit_point(elem()));
    std::uniform_real_distribution<double> s(0, p.total);
    return path_eval(X, p, s(rng));
  };

  for (const Space* X : {&tree, &prod, &flat, &cplx}) {
    for (int i = 0; i < 500; ++i) {
      const SpacePoint x = random_point(*X), y = random_point(*X), z = random_point(*X);
      const double dxy = distance(*X, x, y), dyx = distance(*X, y, x);
      CHECK(dxy == doctest::Approx(dyx));
      CHECK(distance(*X, x, x) == doctest::Approx(0));
      CHECK(dxy <= distance(*X, x, z) + distance(*X, z, y) + 1e-9);
    }
    for (int i = 0; i < 200; ++i) {
      const SpacePoint x1 = random_point(*X), y1 = random_point(*X);
      const SpacePoint x2 = random_point(*X), y2 = random_point(*X);
      const GeodesicPath p1 = geodesic(*X, x1, y1), p2 = geodesic(*X, x2, y2);
      const SpacePoint m1 = path_eval(*X, p1, p1.total / 2), m2 = path_eval(*X, p2, p2.total / 2);
      // Convexity of the metric: d(m1, m2) <= (d(x1, x2) + d(y1, y2)) / 2.
      CHECK(distance(*X, m1, m2) <= 0.5 * (distance(*X, x1, x2) + distance(*X, y1, y2)) + 1e-9);
    }
  }
}
