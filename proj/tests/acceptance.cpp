// Acceptance gate: one PASS/FAIL line per criterion. Reference values come
// from oracles written here, not from the library's own reports.
#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cat0/boundary.hpp"
#include "cat0/conditions.hpp"
#include "cat0/experiments.hpp"
#include "cat0/oracles.hpp"

using namespace cat0;

namespace {

using Clock = std::chrono::steady_clock;
const double kPi = std::numbers::pi;

int failures = 0;

struct Result {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

void criterion(int id, const char* name, const std::function<void(Result&)>& body) {
  Result r;
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!r.pass) ++failures;
  std::printf("%s %d %s (%.2f s)%s\n", r.pass ? "PASS" : "FAIL", id, name, secs, r.detail.str().c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

GroupElement pow_word(const FamilyPtr& F, const std::string& w, int n) { return power(parse_element(w, F), n); }

std::string gi(int i) { return "a^" + std::to_string(i) + " b^" + std::to_string(i); }

// ---------------------------------------------------------------------------

void bowers_ruane(Result& r) {
  const auto t0 = Clock::now();
  const ActionPair P = bowers_ruane_pair();
  const FamilyPtr F2 = P.group->base();
  const Space& X = P.x.space;
  const Space& Y = P.y.space;
  const BoundaryPoint a_end = product_boundary(periodic_end(GroupElement::identity(F2), parse_element("a", F2)), 0);

  std::vector<GroupElement> an;
  for (int n = 1; n <= 200; ++n) an.push_back(GroupElement::direct(P.group, pow_word(F2, "a", n), 0));
  const ConvergenceVerdict la = limit_point(X, orbit_points(P.x, an));
  r.require(la.kind == LimitKind::ConvergesTo && same_end(la.limit.end, a_end.end) && la.limit.theta == 0,
            "a^n limit is not exactly [a^inf, 0]");

  const double r0 = 8;
  const double chord = r0 * std::sqrt(2 - std::sqrt(2.0));  // gap of angles 0 and pi/4 at r = 8
  double worst_angle = 0, last_pre = 0, min_img = 1e300, prev_pre = 1e300;
  bool decreasing = true;
  for (int i = 1; i <= 8; ++i) {
    const GroupElement g = parse_element(gi(i), F2);
    std::vector<GroupElement> seq;
    for (int n = 1; n <= 200; ++n) seq.push_back(GroupElement::direct(P.group, power(g, n), 0));
    const ConvergenceVerdict v = limit_point(Y, orbit_points(P.y, seq));
    const End expect = periodic_end(GroupElement::identity(F2), g);
    r.require(v.kind == LimitKind::ConvergesTo, "g_" + std::to_string(i) + " does not converge");
    r.require(same_end(v.limit.end, expect), "end of g_" + std::to_string(i));
    worst_angle = std::max(worst_angle, std::abs(v.limit.theta - kPi / 4));
    const double pre = boundary_gap(X, product_boundary(expect, 0), a_end, r0);
    const double img = boundary_gap(Y, v.limit, a_end, r0);
    decreasing = decreasing && pre < prev_pre;
    prev_pre = pre;
    last_pre = pre;
    min_img = std::min(min_img, img);
  }
  r.require(worst_angle <= 1e-9, "angle error above 1e-9");
  r.require(decreasing && last_pre < 0.2, "preimage gaps do not fall below 0.2");
  r.require(min_img >= 0.8 * chord, "image gap below 0.8 chord");
  const double secs = seconds_since(t0);
  r.require(secs < 30, "runtime");
  r.detail << " angle_err=" << worst_angle << " last_preimage_gap=" << last_pre << " min_image_gap=" << min_img
           << " threshold=" << 0.8 * chord;
}

// Independent recurrence for the doubling family on T x R with weights
// (p, q): letter counts A_n, B_n and height 2^n.
std::vector<double> recurrence_angles(int p, int q, int horizon) {
  std::vector<double> out;
  long long A = 1, B = 1;
  for (int n = 1; n <= horizon; ++n) {
    if (n > 1) {
      if (n % 2 == 0)
        A += 1LL << (n - 1);
      else
        B += 1LL << (n - 1);
    }
    out.push_back(std::atan2(std::ldexp(1.0, n), static_cast<double>(p * A + q * B)));
  }
  return out;
}

void doubling(Result& r) {
  const double lo = std::atan(3.0 / 5), hi = std::atan(3.0 / 4);
  // Oracle first: the recurrence must reproduce the two claimed limits.
  const auto rec = recurrence_angles(2, 1, 20);
  const double odd = rec[18], even = rec[19];  // n = 19 and n = 20
  r.require(std::abs(odd - hi) < 1e-3 && std::abs(even - lo) < 1e-3, "recurrence oracle disagrees with the limits");
  for (double x : recurrence_angles(1, 1, 20)) r.require(std::abs(x - kPi / 4) < 1e-12, "unit recurrence is not pi/4");

  const auto t0 = Clock::now();
  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const auto g = doubling_sequence(F2, 0, 1, 20);
  for (int n = 1; n <= 10; ++n)
    r.require(g[n - 1].letter_count() == (std::size_t{1} << n), "letter count of g_" + std::to_string(n));
  const FamilyPtr G = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  const auto lifted = lift_with_heights(G, g);
  const ActionSpec AX = product_action(G, WeightedTree(F2, WeightAssignment::unit(*F2)));
  const ActionSpec AY = product_action(G, WeightedTree(F2, WeightAssignment({Rational(2), Rational(1)})));
  const auto px = orbit_points(AX, lifted), py = orbit_points(AY, lifted);
  const CauchyReport cx = is_cauchy(AX.space, px);
  const ConvergenceVerdict lx = limit_point(AX.space, px);
  r.require(cx.verdict == CauchyVerdict::Cauchy, "X side not Cauchy");
  r.require(lx.kind == LimitKind::ConvergesTo && std::abs(lx.limit.theta - kPi / 4) <= 1e-6, "X limit angle");
  const CauchyReport cy = is_cauchy(AY.space, py);
  const ConvergenceVerdict ly = limit_point(AY.space, py);
  r.require(cy.verdict == CauchyVerdict::NotCauchy, "Y side not NotCauchy");
  r.require(ly.clusters.size() == 2, "Y side does not split in two");
  if (ly.clusters.size() == 2) {
    double a = ly.clusters[0].limit.theta, b = ly.clusters[1].limit.theta;
    if (a > b) std::swap(a, b);
    r.require(std::abs(a - lo) <= 1e-3 && std::abs(b - hi) <= 1e-3, "subsequential angles");
    r.detail << " y_angles=" << a << "," << b;
  }
  // Orbit angles along the sequence agree with the recurrence.
  for (std::size_t n = 0; n < py.size(); ++n) {
    const auto& p = std::get<ProductPoint>(py[n]);
    const double ang = std::atan2(p.height, tree_depth(std::get<ProductSpace>(AY.space).tree, p.tree));
    r.require(std::abs(ang - rec[n]) < 1e-12, "orbit angle differs from recurrence at n=" + std::to_string(n + 1));
  }
  const double secs = seconds_since(t0);
  r.require(secs < 10, "runtime");
  r.detail << " oracle=" << odd << "," << even;
}

void m_hat_trend(Result& r) {
  const auto t0 = Clock::now();
  const ActionPair P = bowers_ruane_pair();
  const auto br = minimal_M_table(P.x, P.y, Rational(1), 12);
  const double ratio = br[12].M_hat / br[6].M_hat;
  r.require(ratio >= 1.5, "Bowers-Ruane growth below 1.5x");
  const FamilyPtr Z2 = free_abelian(2);
  const ActionSpec std_lattice = lattice_action(Z2, {});
  const ActionSpec shear = lattice_action(Z2, {{Rational(1), Rational(1)}, {Rational(0), Rational(1)}});
  const auto flat = minimal_M_table(std_lattice, shear, Rational(1), 16);
  r.require(flat[12].M_hat_sq && flat[16].M_hat_sq && *flat[12].M_hat_sq == *flat[16].M_hat_sq,
            "lattice M_hat(12) != M_hat(16)");
  const double secs = seconds_since(t0);
  r.require(secs < 60, "runtime");
  r.detail << " br_ratio=" << ratio << " (M6=" << br[6].M_hat << ", M12=" << br[12].M_hat << ")"
           << " lattice_M12_sq=" << (flat[12].M_hat_sq ? to_string(*flat[12].M_hat_sq) : "none")
           << " lattice_M16_sq=" << (flat[16].M_hat_sq ? to_string(*flat[16].M_hat_sq) : "none");
}

void constants(Result& r) {
  using Big = boost::multiprecision::cpp_rational;
  auto big = [](const Rational& x) { return Big(x.numerator()) / Big(x.denominator()); };
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::int64_t> num(1, 1000), den(1, 97);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const Rational lambda(num(rng), den(rng)), C(num(rng) - 1, den(rng)), N(num(rng), den(rng)),
        M(num(rng), den(rng)), Nt(num(rng), den(rng)), R(num(rng), den(rng));
    const ConstantSet k = derive_constants(lambda, C, N, M, Nt, R);
    const Big l = big(lambda), c = big(C), n = big(N), m = big(M), nt = big(Nt), rr = big(R);
    const bool ok = big(k.M_tilde) == l * (n + nt) + c + m && big(k.M_prime) == l * (2 * n + 1) + 2 * m + c &&
                    big(k.r) == l * (rr + c + m) + n;
    if (!ok) ++mismatches;
  }
  r.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  r.detail << " inputs=100 mismatches=" << mismatches;
}

void map_bounds(Result& r) {
  std::size_t total = 0, runs = 0;
  // Lattice pair: constants from the certified qi constants and the M_hat table.
  const FamilyPtr Z2 = free_abelian(2);
  const ActionSpec X = lattice_action(Z2, {});
  const ActionSpec Y = lattice_action(Z2, {{Rational(1), Rational(1)}, {Rational(0), Rational(1)}});
  const Rational N(1);
  {
    const QiConstants qi = estimate_qi_constants(X, Y, Rational(6));
    Rational M = ceil_to_grid(cocompactness_radius(Y, Rational(2)).N);
    for (const auto& row : minimal_M_table(X, Y, N, 16)) M = std::max(M, ceil_to_grid(row.M_hat));
    const ConstantSet k = derive_constants(qi.lambda, qi.C, N, M, std::nullopt, Rational(1));
    for (int d = 0; d < 8; ++d) {
      const double th = 2 * kPi * d / 8;
      total += verify_map_bounds(X, Y, flat_boundary({std::cos(th), std::sin(th)}), k, 50).total_violations();
      ++runs;
    }
    r.detail << " lattice(lambda=" << to_string(qi.lambda) << ",C=" << to_string(qi.C) << ",M=" << to_string(M) << ")";
  }
  // Identical F2 x Z actions.
  {
    const ActionPair P = bowers_ruane_pair();
    const FamilyPtr F2 = P.group->base();
    const QiConstants qi = estimate_qi_constants(P.x, P.x, Rational(4));
    Rational M = ceil_to_grid(cocompactness_radius(P.x, Rational(2)).N);
    for (const auto& row : minimal_M_table(P.x, P.x, N, 6)) M = std::max(M, ceil_to_grid(row.M_hat));
    const ConstantSet k = derive_constants(qi.lambda, qi.C, N, M, std::nullopt, Rational(1));
    const std::pair<const char*, double> alphas[] = {{"a", 0.0}, {"a b", 0.4}, {"a b^-1 a", -0.6},
                                                     {"b", 1.2}, {"a^2 b", -0.2}, {"b a b", 0.8}};
    for (const auto& [w, th] : alphas) {
      const BoundaryPoint alpha = product_boundary(periodic_end(GroupElement::identity(F2), parse_element(w, F2)), th);
      total += verify_map_bounds(P.x, P.x, alpha, k, 50).total_violations();
      ++runs;
    }
    r.detail << " identical(lambda=" << to_string(qi.lambda) << ",C=" << to_string(qi.C) << ",M=" << to_string(M) << ")";
  }
  r.require(total == 0, std::to_string(total) + " violations");
  r.detail << " rays=" << runs << " violations=" << total;
}

// Random tree point within the given number of letters plus one edge.
TreePoint random_tree_point(std::mt19937& rng, const WeightedTree& T, int letters) {
  std::uniform_int_distribution<int> len(0, letters), gen(0, 1), sgn(0, 1), coin(0, 1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  TreeWord w;
  for (int n = len(rng); n > 0; --n) append_run(w, TreeRun{gen(rng), sgn(rng) ? 1 : -1, 1}, *T.family);
  TreePoint p = tree_vertex(w);
  if (coin(rng)) {
    TreeRun e{gen(rng), sgn(rng) ? 1 : -1, 1};
    while (!w.empty() && w.back().gen == e.gen && w.back().sign == -e.sign) e = TreeRun{gen(rng), sgn(rng) ? 1 : -1, 1};
    p.edge = e;
    p.offset = u(rng) * T.weight(e.gen);
  }
  return p;
}

void metric_oracle(Result& r) {
  const double mesh = 0.01;
  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const WeightedTree unit(F2, WeightAssignment::unit(*F2));
  const WeightedTree wide(F2, WeightAssignment({Rational(2), Rational(1)}));
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> h(-3, 3);
  int instances = 0, passed = 0;
  double worst_ratio = 0;
  auto record = [&](double closed, double oracle, std::size_t segments) {
    const double tol = 2 * mesh * static_cast<double>(std::max<std::size_t>(segments, 1));
    ++instances;
    const double err = std::abs(closed - oracle);
    worst_ratio = std::max(worst_ratio, err / tol);
    if (err <= tol) ++passed;
  };

  // 70 tree instances at radius <= 6.
  for (int i = 0; i < 70; ++i) {
    const WeightedTree& T = i % 2 ? wide : unit;
    const int letters = i % 2 ? 1 : 4;  // depth stays within 6 for both weightings
    const TreePoint p = random_tree_point(rng, T, letters), q = random_tree_point(rng, T, letters);
    const Space X = T;
    record(tree_distance(T, p, q), tree_graph_distance(T, p, q, 6, mesh), geodesic(X, p, q).segments.size());
  }
  // 70 product instances.
  for (int i = 0; i < 70; ++i) {
    const ProductSpace X{i % 2 ? wide : unit};
    const int letters = i % 2 ? 1 : 4;
    const ProductPoint p{random_tree_point(rng, X.tree, letters), h(rng)};
    const ProductPoint q{random_tree_point(rng, X.tree, letters), h(rng)};
    record(product_distance(X, p, q), product_graph_distance(X, p, q, 6, mesh), geodesic(Space(X), p, q).segments.size());
  }
  // 60 complex instances with at most 3 syllables, syllable values of length <= 2.
  const FamilyPtr Z2 = free_abelian(2), Z1 = free_abelian(1), C2 = finite_cyclic(2), C3 = finite_cyclic(3);
  const FamilyPtr FZ = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  std::vector<FreeProductComplex> complexes = {
      FreeProductComplex(free_product({Z2, C2}), {PieceSpec::flat({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}),
                                                   PieceSpec::interval(Rational(1))}),
      FreeProductComplex(free_product({Z2, C3}), {PieceSpec::flat({{Rational(1), Rational(1)}, {Rational(0), Rational(1)}}),
                                                   PieceSpec::cone(Rational(1, 2))}),
      FreeProductComplex(free_product({Z1, Z2}), {PieceSpec::flat({{Rational(2)}}),
                                                   PieceSpec::flat({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}})}),
      FreeProductComplex(free_product({FZ, C2}), {PieceSpec::tree_times_line(wide), PieceSpec::interval(Rational(1))}),
  };
  for (std::size_t c = 0; c < complexes.size(); ++c) {
    const FreeProductComplex& S = complexes[c];
    const Space X = S;
    const auto& factors = S.group->factors();
    std::vector<std::vector<GroupElement>> values(factors.size());
    for (std::size_t f = 0; f < factors.size(); ++f)
      for (const auto& x : ball(factors[f], WeightAssignment::unit(*factors[f]), Rational(2)))
        if (!x.is_identity()) values[f].push_back(x);
    std::uniform_int_distribution<int> nsyl(1, 3), first(0, static_cast<int>(factors.size()) - 1);
    for (int i = 0; i < 15; ++i) {
      GroupElement k = GroupElement::identity(S.group);
      int f = first(rng);
      for (int s = nsyl(rng); s > 0; --s) {
        std::uniform_int_distribution<std::size_t> pick(0, values[f].size() - 1);
        k *= GroupElement::syllable(S.group, f, values[f][pick(rng)]);
        f = (f + 1) % static_cast<int>(factors.size());
      }
      const GroupElement e = GroupElement::identity(S.group);
      const std::size_t segs = geodesic(X, complex_orbit_point(e), complex_orbit_point(k)).segments.size();
      record(complex_distance(S, e, k), complex_graph_distance(S, k, 3, 2, mesh), segs);
    }
  }
  r.require(instances == 200 && passed == instances, std::to_string(instances - passed) + " mismatches");
  r.detail << " instances=" << instances << " within_tolerance=" << passed << " worst_error_over_tolerance=" << worst_ratio;
}

void cauchy_equivalence(Result& r) {
  struct Seq {
    std::string name;
    Space space;
    std::vector<SpacePoint> points;
  };
  std::vector<Seq> seqs;
  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const ProductSpace unit{WeightedTree(F2, WeightAssignment::unit(*F2))};
  // 15 rays in T x R.
  const char* periods[] = {"a", "b", "a b", "a b^-1", "a^2 b"};
  const double thetas[] = {0.0, 0.5, -1.0};
  for (const char* p : periods)
    for (double th : thetas) {
      const BoundaryPoint a = product_boundary(periodic_end(GroupElement::identity(F2), parse_element(p, F2)), th);
      Seq s{std::string("ray ") + p, unit, {}};
      for (int n = 1; n <= 40; ++n) s.points.push_back(ray_eval(unit, a, 1.5 * n));
      seqs.push_back(std::move(s));
    }
  // 5 vertical lines over different vertices.
  const char* verts[] = {"e", "a", "b^-1", "a b", "b a^-1"};
  for (int i = 0; i < 5; ++i) {
    Seq s{std::string("vertical ") + verts[i], unit, {}};
    const double sign = i % 2 ? -1 : 1;
    for (int n = 1; n <= 40; ++n)
      s.points.push_back(ProductPoint{tree_vertex(tree_word(parse_element(verts[i], F2))), sign * n});
    seqs.push_back(std::move(s));
  }
  // 10 doubling sequences under several weightings, both tree orders.
  const FamilyPtr G = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  const std::pair<int, int> weights[] = {{1, 1}, {2, 1}, {1, 2}, {3, 1}, {3, 2}};
  for (const auto& [p, q] : weights)
    for (int order = 0; order < 2; ++order) {
      const auto g = lift_with_heights(G, doubling_sequence(F2, order, 1 - order, 18));
      const ActionSpec A = product_action(G, WeightedTree(F2, WeightAssignment({Rational(p), Rational(q)})));
      seqs.push_back({"doubling " + std::to_string(p) + ":" + std::to_string(q), A.space, orbit_points(A, g)});
    }
  // 15 lattice lines, some offset from the origin.
  const EuclideanSpace plane{2};
  const int dirs[][2] = {{1, 0}, {0, 1}, {1, 1}, {1, 2}, {-3, 1}};
  const double offsets[][2] = {{0, 0}, {2, -1}, {-4, 5}};
  for (const auto& d : dirs)
    for (const auto& o : offsets) {
      Seq s{"lattice line", plane, {}};
      for (int n = 1; n <= 40; ++n) s.points.push_back(EuclideanPoint{{o[0] + d[0] * n, o[1] + d[1] * n}});
      seqs.push_back(std::move(s));
    }
  // 5 lattice sequences alternating between two directions.
  const int alt[][4] = {{1, 0, 0, 1}, {1, 1, 1, -1}, {2, 1, -1, 2}, {1, 0, -1, 0}, {1, 3, 3, 1}};
  for (const auto& a : alt) {
    Seq s{"alternating", plane, {}};
    for (int n = 1; n <= 40; ++n) {
      const int* d = n % 2 ? a : a + 2;
      s.points.push_back(EuclideanPoint{{double(d[0] * n), double(d[1] * n)}});
    }
    seqs.push_back(std::move(s));
  }

  int disagreements = 0, cauchy = 0;
  for (const auto& s : seqs) {
    const CauchyOptions opt{0.5, {}};
    const bool c = is_cauchy(s.space, s.points, opt).verdict == CauchyVerdict::Cauchy;
    const bool l = limit_point(s.space, s.points, opt).kind == LimitKind::ConvergesTo;
    cauchy += c;
    if (c != l) {
      ++disagreements;
      r.detail << " disagree:" << s.name;
    }
  }
  r.require(seqs.size() == 50 && disagreements == 0, std::to_string(disagreements) + " disagreements");
  r.detail << " sequences=" << seqs.size() << " cauchy=" << cauchy << " disagreements=" << disagreements;
}

void coxeter(Result& r) {
  const auto t0 = Clock::now();
  const Report rep = run_experiment("coxeter-family", Config::parse("horizon = 20"));
  const std::string x = rep.verdicts.at("x").at("verdict"), y = rep.verdicts.at("y").at("verdict");
  r.require(x == "Cauchy" && y == "NotCauchy", "verdicts " + x + ", " + y);
  r.require(rep.verdicts.at("ball_counts_match_closed_form").get<bool>(), "ball counts");
  const double secs = seconds_since(t0);
  r.require(secs < 10, "runtime");
  r.detail << " verdicts=(" << x << ", " << y << ") case=" << rep.verdicts.at("case");
}

void conjecture(Result& r) {
  // Oracle: for cyclically reduced w, the translation length in T_{p,q} is
  // p #a + q #b, so the direction angle is atan2(k, that length).
  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const FamilyPtr G = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  auto oracle = [&](const GroupElement& g, int p, int q) {
    double len = 0;
    for (int code : g.base().letters()) len += code / 2 == 0 ? p : q;
    return std::atan2(static_cast<double>(g.line()), len);
  };
  const GroupElement abt2 = GroupElement::direct(G, parse_element("a b", F2), 2);
  r.require(std::abs(conjecture_angle(Rational(1), Rational(1), abt2) - kPi / 4) < 1e-9, "(ab, 2) at (1, 1)");
  r.require(std::abs(conjecture_angle(Rational(2), Rational(1), abt2) - std::atan(2.0 / 3)) < 1e-9, "(ab, 2) at (2, 1)");

  double max_diff = 0;
  std::size_t family = 0, checked = 0, oracle_mismatch = 0;
  std::string argmax;
  for (const auto& g : ball(G, WeightAssignment::unit(*G), Rational(6))) {
    const auto letters = g.base().letters();
    if (letters.empty() || letters.front() == (letters.back() ^ 1)) continue;  // cyclically reduced only
    ++family;
    const double d = std::abs(oracle(g, 1, 1) - oracle(g, 2, 1));
    if (d > max_diff) {
      max_diff = d;
      argmax = g.to_string();
    }
    // Cross-check the complex-metric reading on a stride sample.
    if (family % 25 == 0) {
      ++checked;
      for (const auto& [p, q] : {std::pair{1, 1}, std::pair{2, 1}})
        if (std::abs(conjecture_angle(Rational(p), Rational(q), g) - oracle(g, p, q)) > 1e-6) ++oracle_mismatch;
    }
  }
  r.require(max_diff >= 0.1, "spectra differ by less than 0.1 rad");
  r.require(oracle_mismatch == 0, "complex reading disagrees with the length oracle");
  const Report rep = run_experiment("conjecture-scan", Config::parse("pairs = 1:1, 2:1\nmax_length = 6"));
  const std::string disclaimer = rep.verdicts.value("disclaimer", "");
  r.require(disclaimer.find("invariant sampling only") != std::string::npos, "disclaimer missing");
  const double reported = std::stod(rep.tables.at("distances").rows.at(0).at(2));
  r.require(std::abs(reported - max_diff) < 1e-9, "reported max difference differs from the oracle");
  r.detail << " family=" << family << " max_difference=" << max_diff << " at " << argmax
           << " cross_checked=" << checked;
}

}  // namespace

int main() {
  criterion(1, "Bowers-Ruane limits and discontinuity certificate", bowers_ruane);
  criterion(2, "doubling family: Cauchy in X, two limit angles in Y", doubling);
  criterion(3, "minimal M trend: linear growth vs stabilization", m_hat_trend);
  criterion(4, "derived constants are exact on 100 random rationals", constants);
  criterion(5, "map bounds at horizon 50 have zero violations", map_bounds);
  criterion(6, "closed-form metrics match the graph oracle on 200 instances", metric_oracle);
  criterion(7, "is_cauchy agrees with limit_point on 50 sequences", cauchy_equivalence);
  criterion(8, "Coxeter pair gives (Cauchy, NotCauchy) at horizon 20", coxeter);
  criterion(9, "conjecture spectra (1,1) vs (2,1) differ by >= 0.1 rad", conjecture);
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
