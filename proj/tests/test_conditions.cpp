#include <doctest.h>

#include <cmath>
#include <random>

#include "cat0/closed_forms.hpp"
#include "cat0/conditions.hpp"
#include "cat0/experiments.hpp"

using namespace cat0;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

const FamilyPtr& Z2() {
  static const FamilyPtr f = free_abelian(2);
  return f;
}

ActionSpec shear() { return lattice_action(Z2(), {{q(1), q(1)}, {q(0), q(1)}}); }

}  // namespace

TEST_CASE("derive_constants") {
  const ConstantSet k = derive_constants(q(1), q(0), q(1), q(1), q(2), q(1));
  CHECK(k.M_tilde == q(4));
  CHECK(k.M_prime == q(5));
  CHECK(k.r == q(3));
  CHECK(derive_constants(q(2), q(0), q(1), q(1), std::nullopt, q(2)).r == q(7));
  CHECK(derive_constants(q(2), q(0), q(1), q(1), std::nullopt, q(2)).N_tilde == q(2));
  const ConstantSet same = derive_constants(q(3, 2), q(1, 4), q(2), q(5), q(2), q(1));
  CHECK(same.M_tilde == q(3, 2) * q(4) + q(1, 4) + q(5));
  CHECK_THROWS_AS(derive_constants(q(0), q(0), q(1), q(1), std::nullopt, q(1)), std::invalid_argument);
  CHECK_THROWS_AS(derive_constants(q(1), q(-1), q(1), q(1), std::nullopt, q(1)), std::invalid_argument);
  CHECK_THROWS_AS(derive_constants(q(1), q(0), q(1), q(0), std::nullopt, q(1)), std::invalid_argument);
}

TEST_CASE("derive_constants scales linearly in (N, M, C, R) at fixed lambda") {
  std::mt19937 rng(59);
  std::uniform_int_distribution<std::int64_t> num(1, 40), den(1, 12);
  for (int i = 0; i < 200; ++i) {
    const Rational lambda(num(rng), den(rng)), C(num(rng) - 1, den(rng)), N(num(rng), den(rng)), M(num(rng), den(rng)),
        R(num(rng), den(rng)), s(num(rng), den(rng));
    const ConstantSet a = derive_constants(lambda, C, N, M, std::nullopt, R);
    const ConstantSet b = derive_constants(lambda, s * C, s * N, s * M, std::nullopt, s * R);
    CHECK(b.M_tilde == s * a.M_tilde);
    CHECK(b.r == s * a.r);
    // M' carries the constant lambda term from 2N + 1, so only its other parts scale.
    CHECK(b.M_prime - lambda == s * (a.M_prime - lambda));
  }
}

TEST_CASE("ceil_to_grid") {
  CHECK(ceil_to_grid(0.70710678, 8) == q(6, 8));
  CHECK(ceil_to_grid(0.75, 8) == q(3, 4));
  CHECK(ceil_to_grid(0.70710678, 1) == q(1));
}

TEST_CASE("exact strip test agrees with rational arithmetic") {
  std::mt19937 rng(61);
  std::uniform_int_distribution<std::int64_t> v(-24, 24), pos(0, 24), den(0, 3);
  int decided = 0;
  for (int i = 0; i < 20000; ++i) {
    auto r = [&](bool nonneg) { return Rational(nonneg ? pos(rng) : v(rng), std::int64_t(1) << den(rng)); };
    const Rational D = r(true), H = r(false), delta = r(true), h = r(false);
    Rational s = r(true);
    if (s > D) s = D;
    const Rational exact = strip_point_segment_sq<Rational>(D, H, s, delta, h);
    // Thresholds on both sides of and exactly at the true value.
    for (const Rational& K : {exact, exact + q(1, 1024), exact - q(1, 1024), r(true) * r(true)}) {
      if (K < 0) continue;
      const auto fast = strip_within_sq(D, H, s, delta, h, K);
      if (!fast) continue;
      ++decided;
      CHECK(*fast == (exact <= K));
    }
  }
  CHECK(decided > 50000);
}

TEST_CASE("fast and generic scans agree on product pairs") {
  const ActionPair P = bowers_ruane_pair();
  const auto F2 = P.group->base();
  const ActionSpec wide = product_action(P.group, WeightedTree(F2, WeightAssignment({q(2), q(1)})), {q(1), q(0)});
  for (const auto& [AX, AY] : {std::pair{P.x, P.y}, std::pair{P.y, P.x}, std::pair{P.x, wide}})
    for (const Rational& N : {q(1), q(3, 4)}) {
      REQUIRE(fast_scan_supported(AX, AY));
      const PairScanResult f = fast_pair_scan(AX, AY, N, q(1), 5);
      const PairScanResult g = generic_pair_scan(AX, AY, N, q(1), 5);
      CHECK(f.fast_path);
      CHECK_FALSE(g.fast_path);
      CHECK(f.elements == g.elements);
      CHECK(f.hits == g.hits);
      CHECK(f.failures == g.failures);
      REQUIRE(f.max_y_by_length.size() == g.max_y_by_length.size());
      for (std::size_t L = 0; L < f.max_y_by_length.size(); ++L) {
        CHECK(f.max_y_by_length[L] == doctest::Approx(g.max_y_by_length[L]));
        CHECK(f.max_y_sq_by_length[L] == g.max_y_sq_by_length[L]);
      }
      CHECK(f.first_failure.has_value() == g.first_failure.has_value());
      if (f.first_failure && g.first_failure) {
        CHECK(f.first_failure->first == g.first_failure->first);
        CHECK(f.first_failure->second == g.first_failure->second);
      }
    }
}

TEST_CASE("condition (*) on identical actions holds on every ball") {
  const ActionPair P = bowers_ruane_pair();
  for (int L = 1; L <= 5; ++L) {
    const ConditionReport r = check_condition_star(P.x, P.x, q(1), q(1), L);
    CHECK(r.holds);
    CHECK_FALSE(r.witness.has_value());
  }
  const ConditionReport flat = check_condition_star(shear(), shear(), q(1), q(1), 6);
  CHECK(flat.holds);
}

TEST_CASE("condition (*) for the dot and star actions has a replayable witness") {
  const ActionPair P = bowers_ruane_pair();
  const ConditionReport r = check_condition_star(P.x, P.y, q(1), q(1), 6);
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->x_distance <= 1 + 1e-12);
  CHECK(r.witness->y_distance > 1);
  CHECK(replay_star_witness(P.x, P.y, q(1), q(1), *r.witness));
  // The same witness is not a witness for a large enough M.
  CHECK_FALSE(replay_star_witness(P.x, P.y, q(1), q(100), *r.witness));
}

TEST_CASE("the covers flag reports a too-small N") {
  const ActionPair P = bowers_ruane_pair();
  const ConditionReport r = check_condition_star(P.x, P.x, q(1, 2), q(1), 2);
  CHECK_FALSE(r.covers);
  CHECK_FALSE(r.holds);
}

TEST_CASE("minimal M table is monotone and stabilizes for the lattice pair") {
  const ActionSpec std_lattice = lattice_action(Z2(), {});
  const auto t = minimal_M_table(std_lattice, shear(), q(1), 16);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i].M_hat >= t[i - 1].M_hat);
  CHECK(t[12].M_hat == t[16].M_hat);
  const ActionPair P = bowers_ruane_pair();
  const auto b = minimal_M_table(P.x, P.y, q(1), 8);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i].M_hat >= b[i - 1].M_hat);
  CHECK(b[8].M_hat > b[4].M_hat);
  // Identical actions: bounded by the covering radius.
  const auto same = minimal_M_table(P.x, P.x, q(1), 6);
  for (const auto& row : same) CHECK(row.M_hat <= 1 + 1e-12);
}

TEST_CASE("condition (**) verdicts") {
  const ActionPair P = bowers_ruane_pair();
  const auto F2 = P.group->base();
  std::vector<GroupElement> an, ray;
  for (int n = 1; n <= 40; ++n) {
    an.push_back(GroupElement::direct(P.group, power(parse_element("a", F2), n), 0));
    ray.push_back(GroupElement::direct(P.group, power(parse_element("a b^-1", F2), n), n));
  }
  const auto rows = check_condition_doublestar(P.x, P.y, {{"a^n", an}}, {}, 40);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].x.verdict == CauchyVerdict::Cauchy);
  CHECK(rows[0].y.verdict == CauchyVerdict::Cauchy);
  CHECK_FALSE(rows[0].refutes);
  CHECK(same_end(rows[0].x_limit.limit.end, rows[0].y_limit.limit.end));
  CHECK(rows[0].y_limit.limit.theta == 0);

  const auto same = check_condition_doublestar(P.x, P.x, {{"ray", ray}}, {}, 40);
  CHECK(same[0].x.verdict == CauchyVerdict::Cauchy);
  CHECK(same[0].y.verdict == CauchyVerdict::Cauchy);
  CHECK(same[0].case_tag == 0);

  const FamilyPtr G = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  const auto seq = lift_with_heights(G, doubling_sequence(F2, 0, 1, 16));
  const ActionSpec AX = product_action(G, WeightedTree(F2, WeightAssignment::unit(*F2)));
  const ActionSpec AY = product_action(G, WeightedTree(F2, WeightAssignment({q(2), q(1)})));
  const auto d = check_condition_doublestar(AX, AY, {{"doubling", seq}}, {}, 16);
  CHECK(d[0].refutes);
  CHECK(d[0].case_tag == 1);
  const auto rev = check_condition_doublestar(AY, AX, {{"doubling", seq}}, {}, 16);
  CHECK(rev[0].case_tag == 2);
}

TEST_CASE("boundary map on identical actions is the identity") {
  const ActionPair P = bowers_ruane_pair();
  const auto F2 = P.group->base();
  for (const char* period : {"a", "a b", "a b^-1 a"}) {
    for (double theta : {0.0, 0.6, -0.3}) {
      const BoundaryPoint alpha = product_boundary(periodic_end(GroupElement::identity(F2), parse_element(period, F2)), theta);
      const BoundaryMapResult m = build_boundary_map(P.x, P.x, alpha, q(1), 40);
      REQUIRE(m.image.kind == LimitKind::ConvergesTo);
      CHECK(same_end(m.image.limit.end, alpha.end));
      CHECK(m.image.limit.theta == doctest::Approx(theta).epsilon(0.05));
      for (double d : m.x_distances) CHECK(d <= 1 + 1e-9);
    }
  }
}

TEST_CASE("boundary map of the shear pair follows the linear map") {
  const ActionSpec X = lattice_action(Z2(), {});
  const BoundaryMapResult m = build_boundary_map(X, shear(), flat_boundary({0, 1}), q(1), 50);
  REQUIRE(m.image.kind == LimitKind::ConvergesTo);
  CHECK(m.image.limit.direction[0] == doctest::Approx(std::sqrt(0.5)).epsilon(0.02));
  CHECK(m.image.limit.direction[1] == doctest::Approx(std::sqrt(0.5)).epsilon(0.02));
  const BoundaryMapResult e1 = build_boundary_map(X, shear(), flat_boundary({1, 0}), q(1), 50);
  CHECK(e1.image.limit.direction[0] == doctest::Approx(1).epsilon(0.02));
}

TEST_CASE("map bounds hold for identical product actions") {
  const ActionPair P = bowers_ruane_pair();
  const auto F2 = P.group->base();
  const ConstantSet k = derive_constants(q(1), q(0), q(1), q(1), std::nullopt, q(1));
  const BoundaryPoint alpha = product_boundary(periodic_end(GroupElement::identity(F2), parse_element("a b", F2)), 0.4);
  const MapBoundsReport r = verify_map_bounds(P.x, P.x, alpha, k, 50);
  CHECK(r.bounds.size() == 6);
  CHECK(r.total_violations() == 0);
}

TEST_CASE("map bounds for the dot and star pair along the a-axis") {
  const ActionPair P = bowers_ruane_pair();
  const auto F2 = P.group->base();
  const QiConstants qi = estimate_qi_constants(P.x, P.y, q(4), q(4));
  const ConstantSet k = derive_constants(qi.lambda, qi.C, q(1), q(1), std::nullopt, q(1));
  const BoundaryPoint a = product_boundary(periodic_end(GroupElement::identity(F2), parse_element("a", F2)), 0);
  CHECK(verify_map_bounds(P.x, P.y, a, k, 50).total_violations() == 0);
}
