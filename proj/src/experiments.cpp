#include "cat0/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>

#include "cat0/conditions.hpp"
#include "cat0/oracles.hpp"

namespace cat0 {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_positive(const std::string& key, long long v) {
  if (v <= 0) throw ConfigError(key + " must be positive");
}

CauchyOptions cauchy_options(const Config& cfg) {
  CauchyOptions opt;
  opt.eps0 = cfg.get_double("eps0", 1.0);
  if (!(opt.eps0 > 0)) throw ConfigError("eps0 must be positive");
  for (const auto& r : cfg.get_list("radii")) {
    try {
      opt.radii.push_back(std::stod(r));
    } catch (const std::exception&) {
      throw ConfigError("radii: bad entry '" + r + "'");
    }
  }
  return opt;
}

int threads_of(const Config& cfg) {
  const auto t = cfg.get_int("threads", 1);
  check_positive("threads", t);
  return static_cast<int>(t);
}

// N for condition (*): the "N" key, else the covering radius of X rounded up
// to an integer. A finer grid makes N track the covering radius closely, and
// then M_hat for sheared lattices keeps creeping up along directions
// approaching the irrational singular direction.
Rational condition_N(const Config& cfg, const ActionSpec& A) {
  const Rational cover = ceil_to_grid(cocompactness_radius(A, Rational(2)).N, 1);
  const Rational N = cfg.get_rational("N", cover);
  if (N < cover) throw ConfigError("N is below the covering radius of X");
  return N;
}

const std::set<std::string> kCommon = {"eps0", "radii", "threads"};

std::set<std::string> keys(std::initializer_list<const char*> extra) {
  std::set<std::string> out = kCommon;
  for (const char* k : extra) out.insert(k);
  return out;
}

double product_angle(const SpacePoint& p, const WeightedTree& T) {
  const auto& q = std::get<ProductPoint>(p);
  return std::atan2(q.height, tree_depth(T, q.tree));
}

}  // namespace

ActionPair bowers_ruane_pair() {
  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const FamilyPtr G = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  const WeightedTree T(F2, WeightAssignment::unit(*F2));
  return {G, product_action(G, T), product_action(G, T, {Rational(0), Rational(2)})};
}

std::vector<GroupElement> doubling_sequence(const FamilyPtr& F, int x, int y, int count) {
  std::vector<GroupElement> out;
  if (count <= 0) return out;
  GroupElement g = GroupElement::generator(F, x) * GroupElement::generator(F, y);
  out.push_back(g);
  for (int n = 2; n <= count; ++n) {
    const std::int64_t e = std::int64_t(1) << (n - 1);
    g *= GroupElement::generator(F, n % 2 == 0 ? x : y, e);
    out.push_back(g);
  }
  return out;
}

std::vector<GroupElement> coxeter_doubling_sequence(const FamilyPtr& F, int u, int v, int w, int count) {
  std::vector<GroupElement> out;
  if (count <= 0) return out;
  const GroupElement uw = GroupElement::generator(F, u) * GroupElement::generator(F, w);
  const GroupElement vw = GroupElement::generator(F, v) * GroupElement::generator(F, w);
  GroupElement g = uw;
  out.push_back(g);
  for (int n = 2; n <= count; ++n) {
    const std::int64_t e = std::int64_t(1) << (n - 2);
    g *= power(n % 2 == 0 ? uw : vw, e);
    out.push_back(g);
  }
  return out;
}

std::vector<TreeWord> coxeter_doubling_words(const FamilyPtr& F, int u, int v, int w, int count) {
  std::vector<TreeWord> out;
  if (count <= 0) return out;
  TreeWord g;
  append_run(g, {u, 1, 1}, *F);
  append_run(g, {w, 1, 1}, *F);
  out.push_back(g);
  for (int n = 2; n <= count; ++n) {
    const int first = n % 2 == 0 ? u : v;
    for (std::int64_t k = 0; k < (std::int64_t(1) << (n - 2)); ++k) {
      append_run(g, {first, 1, 1}, *F);
      append_run(g, {w, 1, 1}, *F);
    }
    out.push_back(g);
  }
  return out;
}

std::vector<GroupElement> lift_with_heights(const FamilyPtr& direct, const std::vector<GroupElement>& base) {
  std::vector<GroupElement> out;
  for (std::size_t i = 0; i < base.size(); ++i)
    out.push_back(GroupElement::direct(direct, base[i], std::int64_t(1) << (i + 1)));
  return out;
}

namespace {

FreeProductComplex conjecture_complex(const Rational& p, const Rational& q) {
  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const FamilyPtr F2Z = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  const FamilyPtr G = free_product({F2Z, finite_cyclic(2)}, {"a", "b", "t", "s"});
  return FreeProductComplex(G, {PieceSpec::tree_times_line(WeightedTree(F2, WeightAssignment({p, q}))),
                                PieceSpec::interval()});
}

}  // namespace

double conjecture_angle(const Rational& p, const Rational& q, const GroupElement& wk, int n) {
  const FreeProductComplex S = conjecture_complex(p, q);
  const GroupElement g = GroupElement::syllable(S.group, 0, power(wk, n));
  const double d = complex_distance(S, GroupElement::identity(S.group), g);
  const double h = static_cast<double>(n) * static_cast<double>(wk.line());
  const double t = std::sqrt(std::max(0.0, d * d - h * h));
  return std::atan2(h, t);
}

// ---------------------------------------------------------------------------

Report run_bowers_ruane(const Config& cfg) {
  cfg.require_known(keys({"i_max", "horizon", "gap_radius", "ball", "witness_ball", "N", "M", "identity"}));
  const auto t0 = Clock::now();
  const auto i_max = cfg.get_int("i_max", 8);
  const auto horizon = cfg.get_int("horizon", 200);
  const auto ball_L = cfg.get_int("ball", 12);
  const auto witness_L = cfg.get_int("witness_ball", 6);
  check_positive("i_max", i_max);
  check_positive("horizon", horizon);
  check_positive("ball", ball_L);
  check_positive("witness_ball", witness_L);
  const double r = cfg.get_double("gap_radius", 8.0);
  if (!(r > 0)) throw ConfigError("gap_radius must be positive");
  const bool identity = cfg.get_bool("identity", false);
  const CauchyOptions opt = cauchy_options(cfg);
  ScanOptions scan;
  scan.threads = threads_of(cfg);

  ActionPair pair = bowers_ruane_pair();
  if (identity) pair.y = pair.x;
  const FamilyPtr& G = pair.group;
  const FamilyPtr F2 = G->base();
  const Space& X = pair.x.space;
  const Space& Y = pair.y.space;
  const GroupElement a = GroupElement::generator(F2, 0);

  Report rep;
  rep.experiment = "bowers-ruane";
  rep.config = cfg;
  Json& v = rep.verdicts;
  v["x_action"] = pair.x.describe();
  v["y_action"] = pair.y.describe();

  auto orbit_seq = [&](const ActionSpec& A, const GroupElement& base) {
    std::vector<SpacePoint> pts;
    GroupElement g = GroupElement::identity(G);
    const GroupElement step = GroupElement::direct(G, base, 0);
    for (long long n = 1; n <= horizon; ++n) {
      g *= step;
      pts.push_back(orbit_point(A, g));
    }
    return pts;
  };

  // Limits along a.
  const ConvergenceVerdict a_dot = limit_point(X, orbit_seq(pair.x, a), opt);
  const ConvergenceVerdict a_star = limit_point(Y, orbit_seq(pair.y, a), opt);
  const End a_end = periodic_end(GroupElement::identity(F2), a);
  const bool a_exact = a_dot.kind == LimitKind::ConvergesTo && same_end(a_dot.limit.end, a_end) &&
                       a_dot.limit.theta == 0.0;
  v["a_limit_x"] = to_json(X, a_dot);
  v["a_limit_y"] = to_json(Y, a_star);
  v["a_limit_exact"] = a_exact;

  const double expected = identity ? 0.0 : std::numbers::pi / 4;
  const BoundaryPoint a_x = product_boundary(a_end, 0.0);
  const double chord = r * std::sqrt(2 - std::sqrt(2.0));

  Table limits{{"i", "x_angle", "y_angle", "y_angle_error", "y_end", "end_matches"}, {}};
  Table gaps{{"i", "preimage_gap", "image_gap"}, {}};
  Json per_i = Json::array();
  double worst_error = 0;
  bool ends_ok = true;
  std::vector<double> pre_gaps, img_gaps;
  for (long long i = 1; i <= i_max; ++i) {
    const GroupElement gi = GroupElement::generator(F2, 0, i) * GroupElement::generator(F2, 1, i);
    const End end = periodic_end(GroupElement::identity(F2), gi);
    const ConvergenceVerdict dot = limit_point(X, orbit_seq(pair.x, gi), opt);
    const ConvergenceVerdict star = limit_point(Y, orbit_seq(pair.y, gi), opt);
    const bool matches = star.kind == LimitKind::ConvergesTo && same_end(star.limit.end, end);
    const double err = std::abs(star.limit.theta - expected);
    worst_error = std::max(worst_error, err);
    ends_ok = ends_ok && matches;
    const double pre = boundary_gap(X, product_boundary(end, 0.0), a_x, r);
    const double img = boundary_gap(Y, star.limit, a_star.limit, r);
    pre_gaps.push_back(pre);
    img_gaps.push_back(img);
    const std::string end_text = describe_end(star.limit.end, *F2);
    limits.rows.push_back({std::to_string(i), format_double(dot.limit.theta), format_double(star.limit.theta),
                           format_double(err), end_text, matches ? "true" : "false"});
    gaps.rows.push_back({std::to_string(i), format_double(pre), format_double(img)});
    per_i.push_back({{"i", i}, {"g", gi.to_string()}, {"x_limit", to_json(X, dot)}, {"y_limit", to_json(Y, star)}});
  }
  v["limits"] = per_i;
  v["image_angle_expected"] = expected;
  v["image_angle_worst_error"] = worst_error;
  v["image_ends_match"] = ends_ok;

  bool decreasing = true;
  for (std::size_t k = 1; k < pre_gaps.size(); ++k) decreasing = decreasing && pre_gaps[k] < pre_gaps[k - 1];
  const double min_img = *std::min_element(img_gaps.begin(), img_gaps.end());
  const bool certificate = !identity && pre_gaps.back() < 0.2 && min_img >= 0.8 * chord;
  v["discontinuity"] = {{"reference_radius", r},
                        {"angle_chord", chord},
                        {"preimage_gaps_strictly_decreasing", decreasing},
                        {"last_preimage_gap", pre_gaps.back()},
                        {"min_image_gap", min_img},
                        {"certified", certificate}};

  // Condition (*): a witness on a small ball and the growth of M_hat.
  const Rational N = condition_N(cfg, pair.x);
  const Rational M = cfg.get_rational("M", Rational(1));
  const ConditionReport star = check_condition_star(pair.x, pair.y, N, M, static_cast<int>(witness_L), scan);
  v["condition_star"] = to_json(star);
  if (star.witness) v["witness_replayed"] = replay_star_witness(pair.x, pair.y, N, M, *star.witness);
  const auto table = minimal_M_table(pair.x, pair.y, N, static_cast<int>(ball_L), scan);
  rep.tables["m_hat"] = m_table(table);
  if (ball_L >= 2) {
    const double lo = table[static_cast<std::size_t>(ball_L / 2)].M_hat;
    const double hi = table.back().M_hat;
    v["m_hat_growth"] = {{"from_L", ball_L / 2}, {"to_L", ball_L}, {"ratio", lo > 0 ? hi / lo : 0.0}};
  }

  rep.tables["limits"] = std::move(limits);
  rep.tables["gaps"] = std::move(gaps);
  // Sanity mode: identical actions admit no witness.
  rep.invariant_violation = identity && star.witness.has_value();
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct DoublingRun {
  std::vector<TreeWord> words;
  std::vector<std::int64_t> heights;
  DoubleStarRow row;
};

DoublingRun run_doubling(const ActionSpec& AX, const ActionSpec& AY, std::string name, std::vector<TreeWord> words,
                         const CauchyOptions& opt) {
  DoublingRun run;
  run.words = std::move(words);
  std::vector<SpacePoint> px, py;
  for (std::size_t i = 0; i < run.words.size(); ++i) {
    run.heights.push_back(std::int64_t(1) << (i + 1));
    px.push_back(product_orbit_point(AX, run.words[i], run.heights.back()));
    py.push_back(product_orbit_point(AY, run.words[i], run.heights.back()));
  }
  run.row = doublestar_row(std::move(name), AX.space, AY.space, px, py, opt);
  return run;
}

void doubling_tables(Report& rep, const ActionSpec& AX, const ActionSpec& AY, const DoublingRun& run) {
  const WeightedTree& TX = std::get<ProductSpace>(AX.space).tree;
  const WeightedTree& TY = std::get<ProductSpace>(AY.space).tree;
  Table t{{"n", "letters", "x_length", "y_length", "height", "x_angle", "y_angle"}, {}};
  for (std::size_t i = 0; i < run.words.size(); ++i) {
    const auto& w = run.words[i];
    t.rows.push_back({std::to_string(i + 1), std::to_string(tree_word_letters(w)),
                      to_string(tree_word_length(w, TX.weights)), to_string(tree_word_length(w, TY.weights)),
                      std::to_string(run.heights[i]),
                      format_double(product_angle(product_orbit_point(AX, w, run.heights[i]), TX)),
                      format_double(product_angle(product_orbit_point(AY, w, run.heights[i]), TY))});
  }
  rep.tables["sequence"] = std::move(t);
  Json& v = rep.verdicts;
  v["x"] = to_json(run.row.x);
  v["y"] = to_json(run.row.y);
  v["x_limit"] = to_json(AX.space, run.row.x_limit);
  v["y_limit"] = to_json(AY.space, run.row.y_limit);
  v["refutes_doublestar"] = run.row.refutes;
  v["case"] = run.row.case_tag;
  Json sub = Json::array();
  for (const auto& c : run.row.y_limit.clusters) sub.push_back(c.limit.theta);
  v["y_subsequential_angles"] = sub;
}

}  // namespace

Report run_doubling_family(const Config& cfg) {
  cfg.require_known(keys({"horizon", "length_check", "weights_x", "weights_y"}));
  const auto t0 = Clock::now();
  const auto horizon = cfg.get_int("horizon", 20);
  const auto length_check = cfg.get_int("length_check", 10);
  check_positive("horizon", horizon);
  check_positive("length_check", length_check);
  if (horizon > 40) throw ConfigError("horizon must be at most 40");
  const CauchyOptions opt = cauchy_options(cfg);

  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const FamilyPtr G = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  const WeightedTree TX(F2, parse_weights(cfg.get("weights_x", "a=1, b=1"), *F2));
  const WeightedTree TY(F2, parse_weights(cfg.get("weights_y", "a=2, b=1"), *F2));
  const ActionSpec AX = product_action(G, TX);
  const ActionSpec AY = product_action(G, TY);

  Report rep;
  rep.experiment = "doubling-family";
  rep.config = cfg;
  Json& v = rep.verdicts;
  v["x_action"] = AX.describe();
  v["y_action"] = AY.describe();

  const int count = static_cast<int>(std::max(horizon, length_check));
  const auto base = doubling_sequence(F2, 0, 1, count);
  bool lengths_ok = true;
  Json lengths = Json::array();
  for (long long n = 1; n <= length_check; ++n) {
    const auto letters = base[static_cast<std::size_t>(n - 1)].letter_count();
    lengths.push_back(letters);
    lengths_ok = lengths_ok && letters == (std::size_t(1) << n);
  }
  v["letter_counts"] = lengths;
  v["letter_counts_are_powers_of_two"] = lengths_ok;

  std::vector<TreeWord> words;
  for (long long n = 1; n <= horizon; ++n) words.push_back(tree_word(base[static_cast<std::size_t>(n - 1)]));
  doubling_tables(rep, AX, AY, run_doubling(AX, AY, "doubling", std::move(words), opt));
  rep.seconds = seconds_since(t0);
  return rep;
}

Report run_coxeter_family(const Config& cfg) {
  cfg.require_known(keys({"horizon", "weights_x", "weights_y", "ball_check", "identity"}));
  const auto t0 = Clock::now();
  const auto horizon = cfg.get_int("horizon", 20);
  const auto ball_check = cfg.get_int("ball_check", 8);
  check_positive("horizon", horizon);
  check_positive("ball_check", ball_check);
  if (horizon > 40) throw ConfigError("horizon must be at most 40");
  const bool identity = cfg.get_bool("identity", false);
  const CauchyOptions opt = cauchy_options(cfg);

  const FamilyPtr Z2 = finite_cyclic(2);
  const FamilyPtr F = free_product({Z2, Z2, Z2}, {"a1", "a2", "a3"});
  const FamilyPtr W = direct_with_line(F, LineKind::Dihedral, {"a1", "a2", "a3", "c1", "c2"});
  const WeightedTree TX(F, parse_weights(cfg.get("weights_x", "a1=1, a2=1, a3=1"), *F));
  const WeightedTree TY(F, parse_weights(cfg.get("weights_y", "a1=2, a2=1, a3=1"), *F));
  const ActionSpec AX = product_action(W, TX);
  const ActionSpec AY = identity ? AX : product_action(W, TY);

  Report rep;
  rep.experiment = "coxeter-family";
  rep.config = cfg;
  Json& v = rep.verdicts;
  v["x_action"] = AX.describe();
  v["y_action"] = AY.describe();

  // Ball growth of the unit tree: 3 * 2^L - 2 elements of length <= L.
  Table balls{{"L", "count", "closed_form"}, {}};
  bool balls_ok = true;
  for (long long L = 0; L <= ball_check; ++L) {
    const auto n = ball(F, WeightAssignment::unit(*F), Rational(L)).size();
    const auto closed = L == 0 ? 1 : 3 * (std::size_t(1) << L) - 2;
    balls_ok = balls_ok && n == closed;
    balls.rows.push_back({std::to_string(L), std::to_string(n), std::to_string(closed)});
  }
  rep.tables["ball_growth"] = std::move(balls);
  v["ball_counts_match_closed_form"] = balls_ok;

  const DoublingRun run = run_doubling(AX, AY, "coxeter-doubling",
                                       coxeter_doubling_words(F, 0, 1, 2, static_cast<int>(horizon)), opt);
  doubling_tables(rep, AX, AY, run);
  rep.invariant_violation = !balls_ok || (identity && run.row.refutes);
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<Rational>> identity_basis(int n) {
  std::vector<std::vector<Rational>> b(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) b[i][i] = 1;
  return b;
}

// Identity plus one off-diagonal entry; (2) in rank one.
std::vector<std::vector<Rational>> shear_basis(int n) {
  auto b = identity_basis(n);
  if (n == 1)
    b[0][0] = 2;
  else
    b[0][1] = 1;
  return b;
}

std::vector<std::vector<Rational>> basis_or(const Config& cfg, const std::string& key,
                                            std::vector<std::vector<Rational>> fallback, int n) {
  if (!cfg.has(key)) return fallback;
  auto b = parse_basis(cfg.get(key, ""));
  if (static_cast<int>(b.size()) != n) throw ConfigError(key + ": expected a " + std::to_string(n) + "x" +
                                                         std::to_string(n) + " basis");
  return b;
}

struct RigidSetup {
  ActionSpec x, y;
  bool complex = false;
};

RigidSetup rigid_setup(const Config& cfg, const std::string& family) {
  RigidSetup s;
  const bool identity = cfg.get_bool("identity", false);
  try {
    if (family == "z2-lattice") {
      const FamilyPtr G = free_abelian(2);
      s.x = lattice_action(G, basis_or(cfg, "basis_x", identity_basis(2), 2));
      s.y = lattice_action(G, basis_or(cfg, "basis_y", shear_basis(2), 2));
    } else if (family == "z2-interval-complex" || family == "zn-cyclic-complex" || family == "zn1-zn2-complex") {
      s.complex = true;
      std::vector<FamilyPtr> factors;
      std::vector<PieceSpec> px, py;
      if (family == "zn1-zn2-complex") {
        const int n1 = static_cast<int>(cfg.get_int("n1", 1));
        const int n2 = static_cast<int>(cfg.get_int("n2", 2));
        if (n1 < 1 || n2 < 1) throw ConfigError("n1 and n2 must be positive");
        factors = {free_abelian(n1), free_abelian(n2)};
        px = {PieceSpec::flat(basis_or(cfg, "basis_x", identity_basis(n1), n1)), PieceSpec::flat(identity_basis(n2))};
        py = {PieceSpec::flat(basis_or(cfg, "basis_y", shear_basis(n1), n1)), PieceSpec::flat(shear_basis(n2))};
      } else {
        const int n = family == "z2-interval-complex" ? 2 : static_cast<int>(cfg.get_int("n", 2));
        if (n < 1) throw ConfigError("n must be positive");
        const auto flat_x = PieceSpec::flat(basis_or(cfg, "basis_x", identity_basis(n), n));
        const auto flat_y = PieceSpec::flat(basis_or(cfg, "basis_y", shear_basis(n), n));
        if (family == "z2-interval-complex") {
          factors = {free_abelian(2), finite_cyclic(2)};
          px = {flat_x, PieceSpec::interval(cfg.get_rational("interval_x", Rational(1)))};
          py = {flat_y, PieceSpec::interval(cfg.get_rational("interval_y", Rational(2)))};
        } else {
          const int m = static_cast<int>(cfg.get_int("m", 3));
          factors = {free_abelian(n), finite_cyclic(m)};
          px = {flat_x, PieceSpec::cone(cfg.get_rational("spoke_x", Rational(1)))};
          py = {flat_y, PieceSpec::cone(cfg.get_rational("spoke_y", Rational(2)))};
        }
      }
      const FamilyPtr G = free_product(factors);
      s.x = complex_action(FreeProductComplex(G, px));
      s.y = complex_action(FreeProductComplex(G, py));
    } else {
      throw ConfigError("unsupported family '" + family +
                        "'; expected z2-lattice, z2-interval-complex, zn-cyclic-complex or zn1-zn2-complex");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (identity) s.y = s.x;
  return s;
}

}  // namespace

Report run_rigid_family(const Config& cfg) {
  cfg.require_known(keys({"family", "N", "basis_x", "basis_y", "ball", "identity", "n", "m", "n1", "n2", "interval_x",
                          "interval_y", "spoke_x", "spoke_y", "qi_ball", "c_max", "bounds_horizon", "directions", "R",
                          "oracle_syllables", "oracle_syllable_radius", "oracle_mesh", "oracle_tolerance"}));
  const auto t0 = Clock::now();
  const std::string family = cfg.get("family", "z2-lattice");
  const RigidSetup s = rigid_setup(cfg, family);
  const auto L = cfg.get_int("ball", s.complex ? 4 : 16);
  check_positive("ball", L);
  const CauchyOptions opt = cauchy_options(cfg);
  ScanOptions scan;
  scan.threads = threads_of(cfg);

  Report rep;
  rep.experiment = "rigid-family";
  rep.config = cfg;
  Json& v = rep.verdicts;
  v["family"] = family;
  v["x_action"] = s.x.describe();
  v["y_action"] = s.y.describe();

  const Rational N = condition_N(cfg, s.x);
  v["covering_x"] = to_json(cocompactness_radius(s.x, Rational(2)));
  v["covering_y"] = to_json(cocompactness_radius(s.y, Rational(2)));
  v["N"] = to_json(N);

  const auto table = minimal_M_table(s.x, s.y, N, static_cast<int>(L), scan);
  rep.tables["m_hat"] = m_table(table);
  const std::size_t half = static_cast<std::size_t>(L * 3 / 4);
  const auto& a = table[half];
  const auto& b = table.back();
  const bool stable = a.M_hat_sq && b.M_hat_sq ? *a.M_hat_sq == *b.M_hat_sq : a.M_hat == b.M_hat;
  v["m_hat_stabilization"] = {{"from_L", half}, {"to_L", L}, {"from", a.M_hat}, {"to", b.M_hat}, {"equal", stable}};

  const Rational qi_ball = cfg.get_rational("qi_ball", Rational(s.complex ? 3 : 6));
  const QiConstants qi = estimate_qi_constants(s.x, s.y, qi_ball, cfg.get_rational("c_max", Rational(0)));
  v["qi"] = to_json(qi);

  if (!s.complex) {
    // Map bounds and boundary-map samples on a grid of directions.
    Rational M(0);
    for (const auto& row : table)
      if (row.M_hat > 0) M = std::max(M, ceil_to_grid(row.M_hat));
    M = std::max(M, ceil_to_grid(cocompactness_radius(s.y, Rational(2)).N));
    const ConstantSet k = derive_constants(qi.lambda, qi.C, N, M, std::nullopt, cfg.get_rational("R", Rational(1)));
    v["constants"] = to_json(k);
    const auto bounds_h = cfg.get_int("bounds_horizon", 50);
    const auto dirs = cfg.get_int("directions", 8);
    check_positive("bounds_horizon", bounds_h);
    check_positive("directions", dirs);
    Table phi{{"direction", "x_theta", "y_theta", "image_kind", "violations"}, {}};
    Json bounds_json = Json::array();
    std::size_t violations = 0;
    for (long long d = 0; d < dirs; ++d) {
      const double th = 2 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(dirs);
      const BoundaryPoint alpha = flat_boundary({std::cos(th), std::sin(th)});
      const MapBoundsReport lr = verify_map_bounds(s.x, s.y, alpha, k, static_cast<std::size_t>(bounds_h), opt);
      violations += lr.total_violations();
      const auto& dir = lr.image.direction;
      const double yth = dir.size() == 2 ? std::atan2(dir[1], dir[0]) : 0.0;
      phi.rows.push_back({std::to_string(d), format_double(th), format_double(yth),
                          dir.size() == 2 ? "direction" : "none", std::to_string(lr.total_violations())});
      Json e = to_json(lr, s.y.space);
      e["alpha"] = to_json(s.x.space, alpha);
      bounds_json.push_back(e);
    }
    rep.tables["boundary_map"] = std::move(phi);
    v["map_bounds"] = bounds_json;
    v["bound_total_violations"] = violations;
    rep.invariant_violation = violations > 0;
  } else {
    // Syllable geodesics against the graph oracle.
    const int syl = static_cast<int>(cfg.get_int("oracle_syllables", 3));
    const int syl_r = static_cast<int>(cfg.get_int("oracle_syllable_radius", 2));
    const double mesh = cfg.get_double("oracle_mesh", 0.01);
    const double tol = cfg.get_double("oracle_tolerance", 0.05);
    if (syl < 1 || syl_r < 1 || !(mesh > 0) || !(tol >= 0)) throw ConfigError("oracle settings must be positive");
    Table oracle{{"space", "g", "closed_form", "oracle", "error"}, {}};
    std::size_t checked = 0, mismatches = 0;
    double worst = 0;
    for (const auto* A : {&s.x, &s.y}) {
      const auto& S = std::get<FreeProductComplex>(A->space);
      // Elements with at most syl syllables of bounded length.
      std::vector<GroupElement> elems{GroupElement::identity(S.group)};
      std::vector<std::pair<GroupElement, int>> layer{{elems[0], -1}};
      for (int k = 0; k < syl; ++k) {
        std::vector<std::pair<GroupElement, int>> next;
        for (const auto& [g, last] : layer)
          for (int f = 0; f < static_cast<int>(S.pieces.size()); ++f) {
            if (f == last) continue;
            const FamilyPtr& fac = S.group->factors()[f];
            for (const auto& x : ball(fac, WeightAssignment::unit(*fac), Rational(syl_r))) {
              if (x.is_identity()) continue;
              next.emplace_back(g * GroupElement::syllable(S.group, f, x), f);
            }
          }
        for (const auto& n : next) elems.push_back(n.first);
        layer = std::move(next);
      }
      const std::string name = A == &s.x ? "X" : "Y";
      // Dijkstra per element is the expensive part; sample every k-th.
      const std::size_t stride = std::max<std::size_t>(1, elems.size() / 200);
      for (std::size_t i = 0; i < elems.size(); i += stride) {
        const auto& g = elems[i];
        const double exact = complex_distance(S, GroupElement::identity(S.group), g);
        const double graph = complex_graph_distance(S, g, syl, syl_r, mesh);
        const double err = std::abs(exact - graph);
        ++checked;
        worst = std::max(worst, err);
        if (err > tol) ++mismatches;
        oracle.rows.push_back({name, g.to_string(), format_double(exact), format_double(graph), format_double(err)});
      }
    }
    rep.tables["oracle"] = std::move(oracle);
    v["oracle"] = {{"checked", checked}, {"mismatches", mismatches}, {"worst_error", worst}, {"tolerance", tol},
                   {"mesh", mesh}};
    v["boundary_map"] = "not sampled: limit detection covers trees, products and flat space";
    rep.invariant_violation = mismatches > 0;
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

Report run_conjecture_scan(const Config& cfg) {
  cfg.require_known(keys({"pairs", "max_length", "power"}));
  const auto t0 = Clock::now();
  const auto max_len = cfg.get_int("max_length", 6);
  const auto pw = cfg.get_int("power", 8);
  check_positive("max_length", max_len);
  check_positive("power", pw);
  std::vector<std::pair<Rational, Rational>> pairs;
  for (const auto& item : cfg.has("pairs") ? cfg.get_list("pairs") : std::vector<std::string>{"1:1", "2:1"}) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError("pairs: expected p:q, got '" + item + "'");
    Rational p, q;
    try {
      p = parse_rational(parts[0]);
      q = parse_rational(parts[1]);
    } catch (const std::exception&) {
      throw ConfigError("pairs: bad entry '" + item + "'");
    }
    if (q < 1 || p < q) throw ConfigError("pairs: need p >= q >= 1, got '" + item + "'");
    pairs.emplace_back(p, q);
  }
  if (pairs.empty()) throw ConfigError("pairs: empty");

  const FamilyPtr F2 = free_group(2, {"a", "b"});
  const FamilyPtr F2Z = direct_with_line(F2, LineKind::Translation, {"a", "b", "t"});
  // (w, k) with w nontrivial and cyclically reduced; conjugates share angles.
  std::vector<GroupElement> family;
  for (const auto& g : ball(F2Z, WeightAssignment::unit(*F2Z), Rational(max_len))) {
    const auto w = g.base().letters();
    if (w.empty()) continue;
    const int first = w.front(), last = w.back();
    if (w.size() > 1 && (first ^ 1) == last) continue;
    family.push_back(g);
  }

  Report rep;
  rep.experiment = "conjecture-scan";
  rep.config = cfg;
  Json& v = rep.verdicts;
  v["disclaimer"] = kSamplingDisclaimer;
  v["group"] = "(F2 x Z) * Z_2";
  v["elements"] = family.size();

  Table spec{{"element"}, {}};
  std::vector<std::vector<double>> spectra;
  for (const auto& [p, q] : pairs) {
    spec.header.push_back("theta_" + to_string(p) + "_" + to_string(q));
    std::vector<double> s;
    for (const auto& g : family) s.push_back(conjecture_angle(p, q, g, static_cast<int>(pw)));
    spectra.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    std::vector<std::string> row{family[i].to_string()};
    for (const auto& s : spectra) row.push_back(format_double(s[i]));
    spec.rows.push_back(std::move(row));
  }
  rep.tables["spectra"] = std::move(spec);

  Table dist{{"pair_1", "pair_2", "max_difference", "mean_difference", "entries_over_0.1", "argmax"}, {}};
  Json dj = Json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      double mx = 0, sum = 0;
      std::size_t over = 0, arg = 0;
      for (std::size_t k = 0; k < family.size(); ++k) {
        const double d = std::abs(spectra[i][k] - spectra[j][k]);
        sum += d;
        if (d >= 0.1) ++over;
        if (d > mx) {
          mx = d;
          arg = k;
        }
      }
      const std::string pi = to_string(pairs[i].first) + ":" + to_string(pairs[i].second);
      const std::string pj = to_string(pairs[j].first) + ":" + to_string(pairs[j].second);
      const double mean = family.empty() ? 0.0 : sum / static_cast<double>(family.size());
      const std::string argname = family.empty() ? "" : family[arg].to_string();
      dist.rows.push_back({pi, pj, format_double(mx), format_double(mean), std::to_string(over), argname});
      dj.push_back({{"pair_1", pi}, {"pair_2", pj}, {"max_difference", mx}, {"mean_difference", mean},
                    {"entries_over_0.1", over}, {"argmax", argname}});
    }
  rep.tables["distances"] = std::move(dist);
  v["distances"] = dj;
  rep.seconds = seconds_since(t0);
  return rep;
}

std::vector<std::string> experiment_names() {
  return {"bowers-ruane", "doubling-family", "rigid-family", "coxeter-family", "conjecture-scan"};
}

Report run_experiment(const std::string& name, const Config& cfg) {
  if (name == "bowers-ruane") return run_bowers_ruane(cfg);
  if (name == "doubling-family") return run_doubling_family(cfg);
  if (name == "rigid-family") return run_rigid_family(cfg);
  if (name == "coxeter-family") return run_coxeter_family(cfg);
  if (name == "conjecture-scan") return run_conjecture_scan(cfg);
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace cat0
