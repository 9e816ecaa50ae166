#include "cat0/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cat0 {

namespace {

constexpr std::size_t kMaxLetters = std::size_t(1) << 23;

using Letters = std::vector<int>;

int code(const TreeRun& r) { return 2 * r.gen + (r.sign < 0 ? 1 : 0); }

Letters expand(const TreeWord& w) {
  Letters out;
  for (const TreeRun& r : w) out.insert(out.end(), static_cast<std::size_t>(r.count), code(r));
  return out;
}

TreeWord compress(Letters::const_iterator begin, Letters::const_iterator end) {
  TreeWord out;
  for (auto it = begin; it != end; ++it) {
    const TreeRun r{*it / 2, (*it % 2) ? -1 : 1, 1};
    if (!out.empty() && out.back().gen == r.gen && out.back().sign == r.sign)
      ++out.back().count;
    else
      out.push_back(r);
  }
  return out;
}

int inverse_code(const GroupFamily& F, int c) { return F.is_involution(c / 2) ? c : (c ^ 1); }

TreeWord common_prefix(const TreeWord& a, const TreeWord& b) {
  TreeWord out;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i].gen != b[i].gen || a[i].sign != b[i].sign) break;
    const std::int64_t k = std::min(a[i].count, b[i].count);
    out.push_back({a[i].gen, a[i].sign, k});
    if (a[i].count != b[i].count) break;
  }
  return out;
}

const WeightedTree& tree_of(const Space& X) {
  if (auto* t = std::get_if<WeightedTree>(&X)) return *t;
  if (auto* p = std::get_if<ProductSpace>(&X)) return p->tree;
  throw std::invalid_argument("space has no tree factor");
}

// Point at depth d along an end.
TreePoint end_point(const WeightedTree& T, const End& e, double d) {
  const double lp = to_double(tree_word_length(e.prefix, T.weights));
  const double slack = 1e-9 * std::max(1.0, d);
  if (e.period.empty()) {
    if (d > lp + slack) throw std::out_of_range("ray beyond the observed prefix of an approximate end");
    return tree_point_toward(T, tree_vertex(e.prefix), std::min(d, lp));
  }
  const double per = to_double(tree_word_length(e.period, T.weights));
  TreeWord w = e.prefix;
  const auto copies = d <= lp ? std::int64_t(0) : static_cast<std::int64_t>(std::floor((d - lp) / per)) + 1;
  if (e.period.size() == 1) {
    TreeRun r = e.period[0];
    r.count *= copies;
    if (copies > 0) append_run(w, r, *T.family);
  } else {
    for (std::int64_t k = 0; k < copies; ++k)
      for (const TreeRun& r : e.period) append_run(w, r, *T.family);
  }
  return tree_point_toward(T, tree_vertex(std::move(w)), d);
}

// Prefix-function based detection of an eventually periodic tail covering at
// least half of the word with at least three repetitions.
End detect_end(const GroupFamily& F, const TreeWord& P) {
  if (tree_word_letters(P) > static_cast<std::int64_t>(kMaxLetters)) return approximate_end(P);
  const Letters s = expand(P);
  const std::size_t n = s.size();
  if (n == 0) return approximate_end(P);
  Letters r(s.rbegin(), s.rend());
  std::vector<std::size_t> pi(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && r[i] != r[k]) k = pi[k - 1];
    if (r[i] == r[k]) ++k;
    pi[i] = k;
  }
  for (std::size_t L = n; 2 * L >= n && L > 0; --L) {
    const std::size_t per = L - pi[L - 1];
    if (L >= 3 * per) {
      const std::size_t start = n - L;
      return periodic_end(F, compress(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(start)),
                          compress(s.begin() + static_cast<std::ptrdiff_t>(start),
                                   s.begin() + static_cast<std::ptrdiff_t>(start + per)));
    }
  }
  return approximate_end(P);
}

double angle_of(const Space& X, const SpacePoint& p) {
  if (auto* q = std::get_if<ProductPoint>(&p))
    return std::atan2(q->height, tree_depth(std::get<ProductSpace>(X).tree, q->tree));
  if (auto* q = std::get_if<EuclideanPoint>(&p))
    return q->coords.size() >= 2 ? std::atan2(q->coords[1], q->coords[0]) : (q->coords[0] >= 0 ? 0.0 : std::numbers::pi);
  return 0;
}

TreeWord tree_part(const SpacePoint& p) {
  if (auto* q = std::get_if<ProductPoint>(&p)) return q->tree.vertex;
  return std::get<TreePoint>(p).vertex;
}

double tree_part_depth(const Space& X, const SpacePoint& p) {
  if (auto* q = std::get_if<ProductPoint>(&p)) return tree_depth(tree_of(X), q->tree);
  return tree_depth(tree_of(X), std::get<TreePoint>(p));
}

struct Horizon {
  std::size_t n = 0;
  std::size_t mid = 0;  // last index of the first half
  std::vector<double> dist;
  bool bounded = true;
  std::vector<double> radii;
};

Horizon horizon_of(const Space& X, const std::vector<SpacePoint>& points, const CauchyOptions& opt) {
  Horizon h;
  h.n = points.size();
  if (h.n < 2) return h;
  h.mid = (h.n - 1) / 2;
  const SpacePoint x0 = canonical_basepoint(X);
  for (const auto& p : points) h.dist.push_back(distance(X, x0, p));
  const double first = *std::max_element(h.dist.begin(), h.dist.begin() + static_cast<std::ptrdiff_t>(h.mid + 1));
  const double second = *std::max_element(h.dist.begin() + static_cast<std::ptrdiff_t>(h.mid + 1), h.dist.end());
  h.bounded = second <= first + 1e-12 * std::max(1.0, first);
  if (!opt.radii.empty()) {
    h.radii = opt.radii;
  } else if (h.dist[h.mid] > 0) {
    for (double f : {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2}) h.radii.push_back(h.dist[h.mid] * f);
  }
  return h;
}

// 1-D 2-means on sorted values: the split minimizing the within-group sum of
// squares.
std::optional<std::size_t> two_means_split(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n < 2) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  std::size_t split = 0;
  for (std::size_t k = 1; k < n; ++k) {
    auto sse = [&](std::size_t lo, std::size_t hi) {
      double mean = 0;
      for (std::size_t i = lo; i < hi; ++i) mean += sorted[i];
      mean /= static_cast<double>(hi - lo);
      double s = 0;
      for (std::size_t i = lo; i < hi; ++i) s += (sorted[i] - mean) * (sorted[i] - mean);
      return s;
    };
    const double v = sse(0, k) + sse(k, n);
    if (v < best) {
      best = v;
      split = k;
    }
  }
  return split;
}

}  // namespace

End periodic_end(const GroupFamily& F, TreeWord prefix, TreeWord period) {
  Letters p = expand(period);
  Letters q = expand(prefix);
  if (p.empty()) throw std::invalid_argument("periodic end needs a nontrivial period");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[(i + 1) % p.size()] == inverse_code(F, p[i]) && (p.size() > 1 || F.is_involution(p[i] / 2)))
      throw std::invalid_argument("period is not cyclically reduced");
  for (std::size_t i = 0; i + 1 < q.size(); ++i)
    if (q[i + 1] == inverse_code(F, q[i])) throw std::invalid_argument("prefix is not reduced");
  if (!q.empty() && p.front() == inverse_code(F, q.back()))
    throw std::invalid_argument("period cancels against the prefix");
  // Primitive period.
  for (std::size_t d = 1; d < p.size(); ++d) {
    if (p.size() % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < p.size() && ok; ++i) ok = p[i] == p[i - d];
    if (ok) {
      p.resize(d);
      break;
    }
  }
  // Shortest prefix: absorb trailing prefix letters into a rotated period.
  while (!q.empty() && q.back() == p.back()) {
    q.pop_back();
    std::rotate(p.begin(), p.end() - 1, p.end());
  }
  End e;
  e.prefix = compress(q.begin(), q.end());
  e.period = compress(p.begin(), p.end());
  return e;
}

End periodic_end(const GroupElement& prefix, const GroupElement& period) {
  return periodic_end(*prefix.family(), tree_word(prefix), tree_word(period));
}

End finite_end() { return End{}; }

End approximate_end(TreeWord prefix) {
  End e;
  e.prefix = std::move(prefix);
  e.approximate = true;
  return e;
}

bool same_end(const End& a, const End& b) {
  return a.prefix == b.prefix && a.period == b.period && a.approximate == b.approximate;
}

std::string describe_end(const End& e, const GroupFamily& F) {
  if (e.is_finite()) return "finite";
  std::ostringstream os;
  const std::string pre = e.prefix.empty() ? "" : tree_word_string(e.prefix, F);
  if (e.approximate) {
    os << "approx[" << (pre.empty() ? "e" : pre) << "...]";
    return os.str();
  }
  if (!pre.empty()) os << pre << ' ';
  os << '(' << tree_word_string(e.period, F) << ")^inf";
  return os.str();
}

BoundaryPoint tree_boundary(End end) {
  if (end.is_finite()) throw std::invalid_argument("a tree end cannot be finite");
  BoundaryPoint a;
  a.kind = BoundaryKind::TreeEnd;
  a.end = std::move(end);
  return a;
}

BoundaryPoint product_boundary(End end, double theta) {
  const double half = std::numbers::pi / 2;
  if (theta < -half - 1e-12 || theta > half + 1e-12) throw std::invalid_argument("angle outside [-pi/2, pi/2]");
  const bool vertical = std::abs(std::abs(theta) - half) <= 1e-12;
  if (vertical != end.is_finite())
    throw std::invalid_argument("vertical boundary points carry the finite end and no other does");
  BoundaryPoint a;
  a.kind = BoundaryKind::ProductEnd;
  a.end = std::move(end);
  a.theta = vertical ? std::copysign(half, theta) : theta;
  return a;
}

BoundaryPoint flat_boundary(std::vector<double> direction) {
  double n = 0;
  for (double v : direction) n += v * v;
  n = std::sqrt(n);
  if (n == 0) throw std::invalid_argument("zero direction");
  for (double& v : direction) v /= n;
  BoundaryPoint a;
  a.kind = BoundaryKind::FlatDirection;
  a.direction = std::move(direction);
  return a;
}

BoundaryPoint complex_boundary(GroupElement prefix, GroupElement period) {
  if (period.is_identity()) throw std::invalid_argument("complex direction needs a nontrivial period");
  BoundaryPoint a;
  a.kind = BoundaryKind::ComplexDirection;
  a.prefix = std::move(prefix);
  a.period = std::move(period);
  return a;
}

std::string describe_boundary(const Space& X, const BoundaryPoint& a) {
  std::ostringstream os;
  os.precision(12);
  switch (a.kind) {
    case BoundaryKind::TreeEnd: os << describe_end(a.end, *tree_of(X).family); break;
    case BoundaryKind::ProductEnd:
      os << '[' << describe_end(a.end, *tree_of(X).family) << ", " << a.theta << ']';
      break;
    case BoundaryKind::FlatDirection:
      os << "dir(";
      for (std::size_t i = 0; i < a.direction.size(); ++i) os << (i ? "," : "") << a.direction[i];
      os << ')';
      break;
    case BoundaryKind::ComplexDirection:
      os << a.prefix->to_string() << " (" << a.period->to_string() << ")^inf";
      break;
  }
  return os.str();
}

SpacePoint canonical_basepoint(const Space& X) {
  if (std::holds_alternative<WeightedTree>(X)) return TreePoint{};
  if (std::holds_alternative<ProductSpace>(X)) return ProductPoint{};
  if (auto* e = std::get_if<EuclideanSpace>(&X)) return EuclideanPoint{std::vector<double>(e->dim, 0.0)};
  return complex_orbit_point(GroupElement::identity(std::get<FreeProductComplex>(X).group));
}

double ray_reach(const Space& X, const BoundaryPoint& a) {
  if (!a.end.approximate) return std::numeric_limits<double>::infinity();
  const double len = to_double(tree_word_length(a.end.prefix, tree_of(X).weights));
  const double c = a.kind == BoundaryKind::ProductEnd ? std::cos(a.theta) : 1.0;
  return c <= 0 ? std::numeric_limits<double>::infinity() : len / c;
}

SpacePoint ray_eval(const Space& X, const BoundaryPoint& a, double r) {
  if (r < 0) throw std::out_of_range("ray_eval: negative arclength");
  switch (a.kind) {
    case BoundaryKind::TreeEnd: return end_point(std::get<WeightedTree>(X), a.end, r);
    case BoundaryKind::ProductEnd: {
      const auto& P = std::get<ProductSpace>(X);
      ProductPoint out;
      out.height = r * std::sin(a.theta);
      if (!a.end.is_finite()) out.tree = end_point(P.tree, a.end, r * std::cos(a.theta));
      return out;
    }
    case BoundaryKind::FlatDirection: {
      EuclideanPoint out{a.direction};
      for (double& v : out.coords) v *= r;
      return out;
    }
    case BoundaryKind::ComplexDirection: {
      const auto& S = std::get<FreeProductComplex>(X);
      const GroupElement e = GroupElement::identity(S.group);
      GroupElement before = *a.prefix;
      // The geodesic to prefix * period^n x0 extends the one to
      // prefix * period^(n-1) x0, so evaluating past the latter is stable.
      for (int guard = 0; guard < 100000; ++guard) {
        const GroupElement target = before * *a.period;
        if (complex_distance(S, e, before) >= r) {
          const GeodesicPath path = complex_geodesic(S, complex_orbit_point(e), complex_orbit_point(target));
          return path_eval(X, path, r);
        }
        before = target;
      }
      throw std::runtime_error("ray_eval: complex direction does not escape");
    }
  }
  throw std::logic_error("ray_eval: unknown boundary kind");
}

SpacePoint ray_eval(const Space& X, const Ray& ray, double r) { return ray_eval(X, ray.target, r); }

SpacePoint segment_point(const Space& X, const SpacePoint& x, double r) {
  const GeodesicPath path = geodesic(X, canonical_basepoint(X), x);
  return path_eval(X, path, std::clamp(r, 0.0, path.total));
}

bool in_U(const Space& X, const SpacePoint& x, const BoundaryPoint& a, double r, double eps) {
  if (distance(X, canonical_basepoint(X), x) <= r) return false;
  return distance(X, ray_eval(X, a, r), segment_point(X, x, r)) < eps;
}

bool in_U_prime(const Space& X, const SpacePoint& x, const BoundaryPoint& a, double r, double eps) {
  const SpacePoint x0 = canonical_basepoint(X);
  if (distance(X, x0, x) <= r) return false;
  return point_to_path(X, ray_eval(X, a, r), geodesic(X, x0, x)).distance < eps;
}

bool in_U_point(const Space& X, const SpacePoint& x, const SpacePoint& c, double r, double eps) {
  const SpacePoint x0 = canonical_basepoint(X);
  if (distance(X, x0, c) < r || distance(X, x0, x) <= r) return false;
  return distance(X, segment_point(X, c, r), segment_point(X, x, r)) < eps;
}

double boundary_gap(const Space& X, const BoundaryPoint& a, const BoundaryPoint& b, double r) {
  if (r <= 0) throw std::invalid_argument("boundary_gap: reference radius must be positive");
  return distance(X, ray_eval(X, a, r), ray_eval(X, b, r));
}

CauchyReport is_cauchy(const Space& X, const std::vector<SpacePoint>& points, const CauchyOptions& opt) {
  CauchyReport rep;
  rep.horizon = points.size();
  const Horizon h = horizon_of(X, points, opt);
  if (h.n < 2 || h.bounded) return rep;
  for (double r : h.radii) {
    std::vector<SpacePoint> at;
    at.reserve(h.n);
    for (const auto& p : points) at.push_back(segment_point(X, p, r));
    bool testable = false, found = false;
    CauchyWitness worst{r, 0, 0, -1};
    for (std::size_t i0 = 0; i0 <= h.mid && !found; ++i0) {
      if (h.dist[i0] <= r) continue;
      testable = true;
      CauchyWitness w{r, i0, i0, 0};
      bool ok = true;
      for (std::size_t i = i0 + 1; i < h.n; ++i) {
        const double gap = h.dist[i] <= r ? std::numeric_limits<double>::infinity() : distance(X, at[i0], at[i]);
        if (gap >= opt.eps0) {
          ok = false;
          if (gap > w.gap) w = {r, i0, i, gap};
        }
      }
      if (ok) {
        found = true;
        rep.i0.push_back(i0);
      } else {
        worst = w;  // the latest candidate is the most informative witness
      }
    }
    if (!testable) continue;
    rep.radii.push_back(r);
    if (!found) {
      rep.verdict = CauchyVerdict::NotCauchy;
      rep.witness = worst;
      return rep;
    }
  }
  rep.verdict = rep.radii.empty() ? CauchyVerdict::Bounded : CauchyVerdict::Cauchy;
  return rep;
}

ConvergenceVerdict limit_point(const Space& X, const std::vector<SpacePoint>& points, const CauchyOptions& opt) {
  if (std::holds_alternative<FreeProductComplex>(X))
    throw std::invalid_argument("limit_point: complexes support only explicitly given periodic directions");
  ConvergenceVerdict out;
  out.horizon = points.size();
  const Horizon h = horizon_of(X, points, opt);
  if (h.n < 2 || h.bounded) return out;

  const bool has_tree = !std::holds_alternative<EuclideanSpace>(X);
  const std::size_t tail0 = h.mid + 1;
  std::vector<double> angles;
  for (std::size_t i = tail0; i < h.n; ++i) angles.push_back(angle_of(X, points[i]));
  double mean = 0;
  for (double a : angles) mean += a;
  mean /= static_cast<double>(angles.size());
  out.mean_angle = mean;
  out.spread = *std::max_element(angles.begin(), angles.end()) - *std::min_element(angles.begin(), angles.end());

  // Candidate from the tail.
  auto candidate_for = [&](const std::vector<std::size_t>& idx) {
    const SpacePoint& last = points[idx.back()];
    if (!has_tree) {
      const auto& c = std::get<EuclideanPoint>(last).coords;
      return flat_boundary(c);
    }
    TreeWord P = tree_part(points[idx.front()]);
    for (std::size_t i : idx) P = common_prefix(P, tree_part(points[i]));
    const GroupFamily& F = *tree_of(X).family;
    if (std::holds_alternative<WeightedTree>(X)) return tree_boundary(detect_end(F, P));
    const auto& q = std::get<ProductPoint>(last);
    const double grow = tree_part_depth(X, last) - tree_part_depth(X, points[h.mid]);
    if (grow <= 1e-9 || tree_part_depth(X, last) == 0)
      return product_boundary(finite_end(), std::copysign(std::numbers::pi / 2, q.height));
    return product_boundary(detect_end(F, P), angle_of(X, last));
  };
  std::vector<std::size_t> tail;
  for (std::size_t i = tail0; i < h.n; ++i) tail.push_back(i);
  out.limit = candidate_for(tail);

  // Convergence is decided by the same pairwise test as is_cauchy, so the two
  // verdicts agree at matched options. The candidate must then lie within
  // 2 eps0 of the last sample at every testable radius within its reach: the
  // tail stays within eps0 of its stabilization point, and so does the limit.
  const CauchyReport cauchy = is_cauchy(X, points, opt);
  out.radii = cauchy.radii;
  if (cauchy.verdict == CauchyVerdict::Bounded) return out;
  if (cauchy.verdict == CauchyVerdict::Cauchy) {
    const double reach = ray_reach(X, out.limit);
    const std::size_t last = h.n - 1;
    for (double r : cauchy.radii) {
      if (r > reach || h.dist[last] <= r) continue;
      const double gap = distance(X, ray_eval(X, out.limit, r), segment_point(X, points[last], r));
      if (gap >= 2 * opt.eps0) {
        out.kind = LimitKind::Divergent;
        out.witness = CauchyWitness{r, last, last, gap};
        return out;
      }
    }
    out.kind = LimitKind::ConvergesTo;
    return out;
  }
  out.witness = cauchy.witness;
  out.kind = LimitKind::Divergent;

  // Two subsequential limits: split the tail by angle, or by the branch
  // taken after the common prefix when the angles agree.
  std::vector<std::pair<double, std::size_t>> by_angle;
  for (std::size_t k = 0; k < tail.size(); ++k) by_angle.emplace_back(angles[k], tail[k]);
  std::sort(by_angle.begin(), by_angle.end());
  std::vector<double> sorted;
  for (const auto& [a, i] : by_angle) sorted.push_back(a);
  std::vector<std::vector<std::size_t>> groups;
  const auto split = two_means_split(sorted);
  if (split && sorted[*split] - sorted[*split - 1] > 1e-9) {
    groups.resize(2);
    for (std::size_t k = 0; k < by_angle.size(); ++k) groups[k < *split ? 0 : 1].push_back(by_angle[k].second);
  } else if (has_tree) {
    TreeWord P = tree_part(points[tail.front()]);
    for (std::size_t i : tail) P = common_prefix(P, tree_part(points[i]));
    const std::int64_t plen = tree_word_letters(P);
    std::map<int, std::vector<std::size_t>> branch;
    for (std::size_t i : tail) {
      const Letters l = expand(tree_part(points[i]));
      if (static_cast<std::int64_t>(l.size()) > plen) branch[l[static_cast<std::size_t>(plen)]].push_back(i);
    }
    std::vector<std::vector<std::size_t>> all;
    for (auto& [c, v] : branch) all.push_back(v);
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (std::size_t k = 0; k < all.size() && k < 2; ++k) groups.push_back(all[k]);
  }
  if (groups.size() == 2 && !groups[0].empty() && !groups[1].empty()) {
    for (auto& g : groups) {
      std::sort(g.begin(), g.end());
      Subsequence s;
      s.indices = g;
      s.limit = candidate_for(g);
      if (g.size() >= 2) s.spread = std::abs(angle_of(X, points[g.back()]) - angle_of(X, points[g[g.size() - 2]]));
      out.clusters.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace cat0
