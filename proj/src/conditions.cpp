#include "cat0/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cat0 {

namespace {

bool covered(const CocompactnessRadius& c, const Rational& R) {
  if (c.exact_sq) return R * R >= *c.exact_sq;
  return to_double(R) >= c.sampled - 1e-9;
}

BoundCheck make_check(std::string name, double bound) {
  BoundCheck b;
  b.name = std::move(name);
  b.bound = bound;
  return b;
}

double within(double bound) { return bound + 1e-9 * std::max(1.0, std::abs(bound)); }

}  // namespace

ConstantSet derive_constants(const Rational& lambda, const Rational& C, const Rational& N, const Rational& M,
                             std::optional<Rational> N_tilde, const Rational& R) {
  const Rational Nt = N_tilde ? *N_tilde : Rational(2) * N;
  if (lambda <= 0 || N <= 0 || M <= 0 || Nt <= 0 || R <= 0)
    throw std::invalid_argument("derive_constants: lambda, N, M, N_tilde and R must be positive");
  if (C < 0) throw std::invalid_argument("derive_constants: C must be nonnegative");
  ConstantSet k;
  k.lambda = lambda;
  k.C = C;
  k.N = N;
  k.M = M;
  k.N_tilde = Nt;
  k.R = R;
  k.M_tilde = lambda * (N + Nt) + C + M;
  k.M_prime = lambda * (Rational(2) * N + Rational(1)) + Rational(2) * M + C;
  k.r = lambda * (R + C + M) + N;
  return k;
}

Rational ceil_to_grid(double x, std::int64_t denominator) {
  const double scaled = x * static_cast<double>(denominator);
  auto k = static_cast<std::int64_t>(std::ceil(scaled - 1e-9));
  return Rational(k, denominator);
}

ConditionReport check_condition_star(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, const Rational& M,
                                     int L, const ScanOptions& opt) {
  ConditionReport rep;
  rep.N = N;
  rep.M = M;
  rep.ball_radius = L;
  rep.covering_x = cocompactness_radius(AX, opt.covering_horizon);
  rep.covering_y = cocompactness_radius(AY, opt.covering_horizon);
  rep.covers = covered(rep.covering_x, N) && covered(rep.covering_y, M);
  if (!rep.covers) return rep;
  const PairScanResult scan = opt.allow_fast_path ? pair_scan(AX, AY, N, M, L, opt.threads)
                                                  : generic_pair_scan(AX, AY, N, M, L, opt.threads);
  rep.fast_path = scan.fast_path;
  rep.elements = scan.elements;
  rep.pairs_hit = scan.hits;
  rep.failures = scan.failures;
  rep.holds = scan.failures == 0;
  if (scan.first_failure) {
    StarWitness w;
    w.g = scan.first_failure->first;
    w.a = scan.first_failure->second;
    const GroupElement e = GroupElement::identity(AX.group);
    const GeodesicPath path = geodesic(AX.space, orbit_point(AX, e), orbit_point(AX, w.g));
    const FootPoint foot = point_to_path(AX.space, orbit_point(AX, w.a), path);
    w.x_distance = foot.distance;
    w.x_parameter = foot.parameter;
    w.y_distance = orbit_segment_distance(AY, w.g, w.a);
    rep.witness = w;
  }
  return rep;
}

bool replay_star_witness(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, const Rational& M,
                         const StarWitness& w) {
  const GroupElement e = GroupElement::identity(AX.group);
  const GeodesicPath px = geodesic(AX.space, orbit_point(AX, e), orbit_point(AX, w.g));
  const GeodesicPath py = geodesic(AY.space, orbit_point(AY, e), orbit_point(AY, w.g));
  const double dx = point_to_path_search(AX.space, orbit_point(AX, w.a), px).distance;
  const double dy = point_to_path_search(AY.space, orbit_point(AY, w.a), py).distance;
  bool x_hit = dx <= to_double(N) + 1e-7;
  bool y_miss = dy > to_double(M) - 1e-7;
  if (auto sq = orbit_segment_distance_sq(AX, w.g, w.a)) x_hit = x_hit && *sq <= N * N;
  if (auto sq = orbit_segment_distance_sq(AY, w.g, w.a)) y_miss = y_miss && *sq > M * M;
  return x_hit && y_miss;
}

std::vector<MTableRow> m_table_from_scan(const PairScanResult& scan) {
  std::vector<MTableRow> rows;
  MTableRow cur;
  double best = -1;
  for (int l = 0; l <= scan.L; ++l) {
    const auto& arg = scan.argmax_by_length[l];
    if (arg) {
      const auto& sq = scan.max_y_sq_by_length[l];
      bool better = scan.max_y_by_length[l] > best;
      if (sq && cur.M_hat_sq) better = *sq > *cur.M_hat_sq;
      if (!cur.g || better) {
        best = scan.max_y_by_length[l];
        cur.M_hat = best;
        cur.M_hat_sq = sq;
        cur.g = arg->first;
        cur.a = arg->second;
      }
    }
    cur.L = l;
    rows.push_back(cur);
  }
  return rows;
}

std::vector<MTableRow> minimal_M_table(const ActionSpec& AX, const ActionSpec& AY, const Rational& N, int L,
                                       const ScanOptions& opt) {
  const PairScanResult scan = opt.allow_fast_path ? pair_scan(AX, AY, N, std::nullopt, L, opt.threads)
                                                  : generic_pair_scan(AX, AY, N, std::nullopt, L, opt.threads);
  return m_table_from_scan(scan);
}

std::vector<SpacePoint> orbit_points(const ActionSpec& A, const std::vector<GroupElement>& elements) {
  std::vector<SpacePoint> out;
  out.reserve(elements.size());
  for (const auto& g : elements) out.push_back(orbit_point(A, g));
  return out;
}

DoubleStarRow doublestar_row(std::string name, const Space& X, const Space& Y, const std::vector<SpacePoint>& px,
                             const std::vector<SpacePoint>& py, const CauchyOptions& opt) {
  DoubleStarRow row;
  row.name = std::move(name);
  row.x = is_cauchy(X, px, opt);
  row.y = is_cauchy(Y, py, opt);
  if (!std::holds_alternative<FreeProductComplex>(X)) row.x_limit = limit_point(X, px, opt);
  if (!std::holds_alternative<FreeProductComplex>(Y)) row.y_limit = limit_point(Y, py, opt);
  if (row.x.verdict == CauchyVerdict::Cauchy && row.y.verdict == CauchyVerdict::NotCauchy) row.case_tag = 1;
  if (row.x.verdict == CauchyVerdict::NotCauchy && row.y.verdict == CauchyVerdict::Cauchy) row.case_tag = 2;
  row.refutes = row.case_tag != 0;
  return row;
}

std::vector<DoubleStarRow> check_condition_doublestar(const ActionSpec& AX, const ActionSpec& AY,
                                                      const std::vector<NamedSequence>& sequences,
                                                      const CauchyOptions& opt, std::size_t horizon) {
  std::vector<DoubleStarRow> rows;
  for (const auto& seq : sequences) {
    std::vector<GroupElement> elems(seq.elements.begin(),
                                    seq.elements.begin() + static_cast<std::ptrdiff_t>(std::min(horizon, seq.elements.size())));
    rows.push_back(doublestar_row(seq.name, AX.space, AY.space, orbit_points(AX, elems), orbit_points(AY, elems), opt));
  }
  return rows;
}

BoundaryMapResult build_boundary_map(const ActionSpec& AX, const ActionSpec& AY, const BoundaryPoint& alpha,
                                     const Rational& N, std::size_t horizon, const CauchyOptions& opt) {
  BoundaryMapResult out;
  out.alpha = alpha;
  const double n = to_double(N);
  for (std::size_t i = 1; i <= horizon; ++i) {
    const SpacePoint z = ray_eval(AX.space, alpha, static_cast<double>(i));
    const auto near = elements_near_point(AX, z, n + 1e-9 * std::max(1.0, n));
    if (near.empty())
      throw std::runtime_error("no orbit point within N of the ray at arclength " + std::to_string(i) +
                               "; N is below the covering radius");
    out.sequence.push_back(near.front().element);
    out.x_distances.push_back(near.front().distance);
  }
  out.image = limit_point(AY.space, orbit_points(AY, out.sequence), opt);
  return out;
}

std::size_t MapBoundsReport::total_violations() const {
  std::size_t n = 0;
  for (const auto& b : bounds) n += b.violations;
  return n;
}

MapBoundsReport verify_map_bounds(const ActionSpec& AX, const ActionSpec& AY, const BoundaryPoint& alpha,
                                    const ConstantSet& k, std::size_t horizon, const CauchyOptions& opt) {
  MapBoundsReport rep;
  rep.constants = k;
  rep.alpha = alpha;
  const BoundaryMapResult bm = build_boundary_map(AX, AY, alpha, k.N, horizon, opt);
  rep.sequence = bm.sequence;
  rep.image = bm.image.limit;
  const auto& g = bm.sequence;
  const std::size_t h = g.size();
  const double Nt = to_double(k.N_tilde), Mt = to_double(k.M_tilde);
  const double lam = to_double(k.lambda), C = to_double(k.C), N = to_double(k.N);

  auto record = [](BoundCheck& b, double value, std::size_t i, std::size_t j) {
    ++b.checked;
    b.worst = std::max(b.worst, value);
    if (value > within(b.bound)) {
      if (!b.first_violation) b.first_violation = std::make_pair(i, j);
      ++b.violations;
    }
  };

  BoundCheck b1 = make_check("(1) dX(g_i x0, [x0, g_j x0]) <= N~", Nt);
  BoundCheck b2 = make_check("(2) dY(g_i y0, [y0, g_j y0]) <= M~", Mt);
  for (std::size_t j = 0; j < h; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      record(b1, orbit_segment_distance(AX, g[j], g[i]), i + 1, j + 1);
      record(b2, orbit_segment_distance(AY, g[j], g[i]), i + 1, j + 1);
    }

  const Space& Y = AY.space;
  const SpacePoint y0 = canonical_basepoint(Y);
  const auto py = orbit_points(AY, g);
  const double reach = ray_reach(Y, rep.image);
  BoundCheck b3 = make_check("(3) dY(g_i y0, image ray) <= M~ + 1", Mt + 1);
  for (std::size_t i = 0; i < h; ++i) {
    const double len = std::min(reach, distance(Y, y0, py[i]) + Mt + 2);
    const GeodesicPath ray = geodesic(Y, y0, ray_eval(Y, rep.image, len));
    record(b3, point_to_path(Y, py[i], ray).distance, i + 1, i + 1);
  }

  BoundCheck b4 = make_check("(4) dX(g_i x0, g_i+1 x0) <= 2N + 1", 2 * N + 1);
  BoundCheck b5 = make_check("(5) dY(g_i y0, g_i+1 y0) <= lambda(2N + 1) + C", lam * (2 * N + 1) + C);
  for (std::size_t i = 0; i + 1 < h; ++i) {
    record(b4, orbit_distance(AX, g[i], g[i + 1]), i + 1, i + 2);
    record(b5, orbit_distance(AY, g[i], g[i + 1]), i + 1, i + 2);
  }

  // (6) ray points up to the projection of the last image point.
  BoundCheck b6 = make_check("(6) image ray within 3(M~ + 1) + lambda(2N + 1) + C of the images", 3 * (Mt + 1) + lam * (2 * N + 1) + C);
  if (h > 0) {
    const double len = std::min(reach, distance(Y, y0, py.back()) + Mt + 2);
    const GeodesicPath ray = geodesic(Y, y0, ray_eval(Y, rep.image, len));
    const double top = point_to_path(Y, py.back(), ray).parameter;
    const int steps = std::max(1, static_cast<int>(std::ceil(top * 4)));
    for (int s = 0; s <= steps; ++s) {
      const SpacePoint z = path_eval(Y, ray, top * s / steps);
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t i = 0; i < h; ++i) {
        const double d = distance(Y, z, py[i]);
        if (d < best) {
          best = d;
          arg = i;
        }
      }
      record(b6, best, static_cast<std::size_t>(s), arg + 1);
    }
  }
  rep.bounds = {b1, b2, b3, b4, b5, b6};
  return rep;
}

}  // namespace cat0
