#include "cat0/spaces.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cat0/closed_forms.hpp"

namespace cat0 {

// Defined in complex.cpp.
SpacePoint complex_segment_eval(const FreeProductComplex& S, const PathSegment& seg, double s);
FootPoint complex_point_to_segment(const FreeProductComplex& S, const ComplexPoint& x, const PathSegment& seg);
std::string describe_complex_point(const FreeProductComplex& S, const ComplexPoint& p);

WeightedTree::WeightedTree(FamilyPtr f, WeightAssignment w) : family(std::move(f)), weights(std::move(w)) {
  if (!family || !family->has_tree_cayley_graph())
    throw std::invalid_argument("weighted tree needs a free group or a free product of Z and Z_2 factors");
  if (static_cast<int>(weights.size()) != family->generator_count())
    throw std::invalid_argument("weighted tree: weight count mismatch");
}

namespace {

constexpr double kTol = 1e-12;

TreeRun inverse_letter(const WeightedTree& T, TreeRun r) {
  if (!T.family->is_involution(r.gen)) r.sign = -r.sign;
  return r;
}

bool same_letter(const TreeRun& a, const TreeRun& b) { return a.gen == b.gen && a.sign == b.sign; }

// Shared walk for exact and floating depths. weight(gen) and offset(point)
// return values of type T.
template <class T, class W, class O>
T common_depth_t(const TreePoint& p, const TreePoint& q, W weight, O offset) {
  T acc(0);
  std::size_t i = 0, j = 0;
  std::int64_t ri = p.vertex.empty() ? 0 : p.vertex[0].count;
  std::int64_t rj = q.vertex.empty() ? 0 : q.vertex[0].count;
  while (i < p.vertex.size() && j < q.vertex.size()) {
    if (!same_letter(p.vertex[i], q.vertex[j])) return acc;
    const std::int64_t m = std::min(ri, rj);
    acc += weight(p.vertex[i].gen) * T(m);
    ri -= m;
    rj -= m;
    if (ri == 0 && ++i < p.vertex.size()) ri = p.vertex[i].count;
    if (rj == 0 && ++j < q.vertex.size()) rj = q.vertex[j].count;
  }
  // At most one of the two next letters is a full vertex letter.
  auto next = [](const TreePoint& t, std::size_t idx, bool& full) -> std::optional<TreeRun> {
    if (idx < t.vertex.size()) {
      full = true;
      return t.vertex[idx];
    }
    full = false;
    return t.edge;
  };
  bool fp = false, fq = false;
  const auto lp = next(p, i, fp);
  const auto lq = next(q, j, fq);
  if (!lp || !lq || !same_letter(*lp, *lq)) return acc;
  const T w = weight(lp->gen);
  const T ep = fp ? w : offset(p);
  const T eq = fq ? w : offset(q);
  return acc + (ep < eq ? ep : eq);
}

template <class T, class W, class O>
T depth_t(const TreePoint& p, W weight, O offset) {
  T acc(0);
  for (const TreeRun& r : p.vertex) acc += weight(r.gen) * T(r.count);
  if (p.edge) acc += offset(p);
  return acc;
}

std::optional<Rational> exact_offset(const TreePoint& p) {
  if (!p.edge) return Rational(0);
  return exact_rational(p.offset);
}

struct ExactTree {
  const WeightedTree& T;
  Rational depth(const TreePoint& p) const {
    return depth_t<Rational>(p, [&](int g) { return T.weights[g]; }, [](const TreePoint& t) { return *exact_offset(t); });
  }
  Rational common(const TreePoint& p, const TreePoint& q) const {
    return common_depth_t<Rational>(p, q, [&](int g) { return T.weights[g]; },
                                     [](const TreePoint& t) { return *exact_offset(t); });
  }
  Rational dist(const TreePoint& p, const TreePoint& q) const { return depth(p) + depth(q) - Rational(2) * common(p, q); }
};

FootPoint tree_foot(const WeightedTree& T, const TreePoint& x, const TreePoint& p, const TreePoint& q) {
  const double D = tree_distance(T, p, q);
  const double dp = tree_distance(T, x, p);
  const double dq = tree_distance(T, x, q);
  double s = 0.5 * (dp + D - dq);
  s = std::clamp(s, 0.0, D);
  return {std::max(0.0, 0.5 * (dp + dq - D)), s};
}

FootPoint product_foot(const ProductSpace& X, const ProductPoint& x, const ProductPoint& p, const ProductPoint& q,
                       double seg_length) {
  const WeightedTree& T = X.tree;
  const double D = tree_distance(T, p.tree, q.tree);
  const double dp = tree_distance(T, x.tree, p.tree);
  const double dq = tree_distance(T, x.tree, q.tree);
  const double s = std::clamp(0.5 * (dp + D - dq), 0.0, D);
  const double delta = std::max(0.0, 0.5 * (dp + dq - D));
  double t = 0;
  const double sq = strip_point_segment_sq<double>(D, q.height - p.height, s, delta, x.height - p.height, &t);
  return {std::sqrt(std::max(0.0, sq)), t * seg_length};
}

}  // namespace

TreePoint tree_vertex(TreeWord word) {
  TreePoint p;
  p.vertex = std::move(word);
  return p;
}

double tree_depth(const WeightedTree& T, const TreePoint& p) {
  return depth_t<double>(p, [&](int g) { return T.weight(g); }, [](const TreePoint& t) { return t.offset; });
}

double tree_common_depth(const WeightedTree& T, const TreePoint& p, const TreePoint& q) {
  return common_depth_t<double>(p, q, [&](int g) { return T.weight(g); }, [](const TreePoint& t) { return t.offset; });
}

double tree_distance(const WeightedTree& T, const TreePoint& p, const TreePoint& q) {
  const double d = tree_depth(T, p) + tree_depth(T, q) - 2.0 * tree_common_depth(T, p, q);
  return d < 0 ? 0 : d;
}

TreePoint tree_point_toward(const WeightedTree& T, const TreePoint& p, double d) {
  const double total = tree_depth(T, p);
  const double eps = kTol * std::max(1.0, total);
  if (d < -eps || d > total + eps) throw std::out_of_range("tree_point_toward: depth out of range");
  TreePoint out;
  double acc = 0;
  for (const TreeRun& r : p.vertex) {
    const double w = T.weight(r.gen);
    const double W = w * static_cast<double>(r.count);
    if (acc + W >= d - eps) {
      const double rem = std::max(0.0, d - acc);
      auto k = static_cast<std::int64_t>(std::floor(rem / w));
      double part = rem - static_cast<double>(k) * w;
      if (part > w - eps) {
        ++k;
        part = 0;
      }
      if (part < eps) part = 0;
      k = std::min(k, r.count);
      if (k > 0) out.vertex.push_back({r.gen, r.sign, k});
      if (part > 0) {
        out.edge = TreeRun{r.gen, r.sign, 1};
        out.offset = part;
      }
      return out;
    }
    acc += W;
    out.vertex.push_back(r);
  }
  const double part = d - acc;
  if (p.edge && part > eps) {
    out.edge = p.edge;
    out.offset = std::min(part, p.offset);
  }
  return out;
}

TreePoint tree_geodesic_eval(const WeightedTree& T, const TreePoint& p, const TreePoint& q, double s) {
  const double dp = tree_depth(T, p);
  const double dq = tree_depth(T, q);
  const double c = tree_common_depth(T, p, q);
  const double d = dp + dq - 2 * c;
  const double eps = kTol * std::max(1.0, d);
  if (s < -eps || s > d + eps) throw std::out_of_range("tree_geodesic_eval: arclength out of range");
  s = std::clamp(s, 0.0, d);
  if (s <= dp - c) return tree_point_toward(T, p, dp - s);
  return tree_point_toward(T, q, std::min(dq, c + (s - (dp - c))));
}

TreePoint tree_translate(const WeightedTree& T, const TreeWord& g, const TreePoint& p) {
  TreeWord parent = g;
  for (const TreeRun& r : p.vertex) append_run(parent, r, *T.family);
  if (!p.edge) return tree_vertex(std::move(parent));
  TreeWord child = parent;
  append_run(child, *p.edge, *T.family);
  if (tree_word_length(child, T.weights) > tree_word_length(parent, T.weights)) {
    TreePoint out = tree_vertex(std::move(parent));
    out.edge = p.edge;
    out.offset = p.offset;
    return out;
  }
  TreePoint out = tree_vertex(std::move(child));
  out.edge = inverse_letter(T, *p.edge);
  out.offset = T.weight(p.edge->gen) - p.offset;
  return out;
}

bool tree_point_equal(const WeightedTree& T, const TreePoint& p, const TreePoint& q, double tol) {
  return tree_distance(T, p, q) <= tol;
}

double product_distance(const ProductSpace& X, const ProductPoint& p, const ProductPoint& q) {
  const double dt = tree_distance(X.tree, p.tree, q.tree);
  const double dh = p.height - q.height;
  return std::sqrt(dt * dt + dh * dh);
}

ProductPoint product_geodesic_eval(const ProductSpace& X, const ProductPoint& p, const ProductPoint& q, double s) {
  const double total = product_distance(X, p, q);
  const double eps = kTol * std::max(1.0, total);
  if (s < -eps || s > total + eps) throw std::out_of_range("product_geodesic_eval: arclength out of range");
  if (total == 0) return p;
  const double frac = std::clamp(s / total, 0.0, 1.0);
  const double dt = tree_distance(X.tree, p.tree, q.tree);
  ProductPoint out;
  out.tree = tree_geodesic_eval(X.tree, p.tree, q.tree, frac * dt);
  out.height = p.height + frac * (q.height - p.height);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double euclid_distance(const EuclideanPoint& p, const EuclideanPoint& q) {
  if (p.coords.size() != q.coords.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    const double d = p.coords[i] - q.coords[i];
    s += d * d;
  }
  return std::sqrt(s);
}

template <class P>
const P& as(const SpacePoint& p, const char* what) {
  if (const auto* v = std::get_if<P>(&p)) return *v;
  throw std::invalid_argument(std::string("point does not belong to the ") + what);
}

}  // namespace

double distance(const Space& X, const SpacePoint& p, const SpacePoint& q) {
  return std::visit(
      [&](const auto& space) -> double {
        using S = std::decay_t<decltype(space)>;
        if constexpr (std::is_same_v<S, WeightedTree>) {
          return tree_distance(space, as<TreePoint>(p, "tree"), as<TreePoint>(q, "tree"));
        } else if constexpr (std::is_same_v<S, ProductSpace>) {
          return product_distance(space, as<ProductPoint>(p, "product"), as<ProductPoint>(q, "product"));
        } else if constexpr (std::is_same_v<S, EuclideanSpace>) {
          return euclid_distance(as<EuclideanPoint>(p, "flat space"), as<EuclideanPoint>(q, "flat space"));
        } else {
          return complex_point_distance(space, as<ComplexPoint>(p, "complex"), as<ComplexPoint>(q, "complex"));
        }
      },
      X);
}

GeodesicPath geodesic(const Space& X, const SpacePoint& p, const SpacePoint& q) {
  if (const auto* S = std::get_if<FreeProductComplex>(&X))
    return complex_geodesic(*S, as<ComplexPoint>(p, "complex"), as<ComplexPoint>(q, "complex"));
  GeodesicPath path;
  const double d = distance(X, p, q);
  path.segments.push_back({p, q, d});
  path.total = d;
  return path;
}

SpacePoint segment_eval(const Space& X, const PathSegment& seg, double s) {
  return std::visit(
      [&](const auto& space) -> SpacePoint {
        using S = std::decay_t<decltype(space)>;
        if constexpr (std::is_same_v<S, WeightedTree>) {
          return tree_geodesic_eval(space, as<TreePoint>(seg.start, "tree"), as<TreePoint>(seg.end, "tree"), s);
        } else if constexpr (std::is_same_v<S, ProductSpace>) {
          return product_geodesic_eval(space, as<ProductPoint>(seg.start, "product"),
                                       as<ProductPoint>(seg.end, "product"), s);
        } else if constexpr (std::is_same_v<S, EuclideanSpace>) {
          const auto& a = as<EuclideanPoint>(seg.start, "flat space");
          const auto& b = as<EuclideanPoint>(seg.end, "flat space");
          const double eps = kTol * std::max(1.0, seg.length);
          if (s < -eps || s > seg.length + eps) throw std::out_of_range("segment_eval: arclength out of range");
          const double f = seg.length == 0 ? 0 : std::clamp(s / seg.length, 0.0, 1.0);
          EuclideanPoint out;
          for (std::size_t i = 0; i < a.coords.size(); ++i) out.coords.push_back(a.coords[i] + f * (b.coords[i] - a.coords[i]));
          return out;
        } else {
          return complex_segment_eval(space, seg, s);
        }
      },
      X);
}

SpacePoint path_eval(const Space& X, const GeodesicPath& path, double s) {
  const double eps = kTol * std::max(1.0, path.total);
  if (s < -eps || s > path.total + eps) throw std::out_of_range("path_eval: arclength out of range");
  if (path.segments.empty()) throw std::invalid_argument("path_eval: empty path");
  double acc = 0;
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const auto& seg = path.segments[i];
    if (s <= acc + seg.length || i + 1 == path.segments.size())
      return segment_eval(X, seg, std::clamp(s - acc, 0.0, seg.length));
    acc += seg.length;
  }
  return path.segments.back().end;
}

FootPoint point_to_path(const Space& X, const SpacePoint& x, const GeodesicPath& path) {
  FootPoint best{std::numeric_limits<double>::infinity(), 0};
  double acc = 0;
  for (const auto& seg : path.segments) {
    FootPoint f = std::visit(
        [&](const auto& space) -> FootPoint {
          using S = std::decay_t<decltype(space)>;
          if constexpr (std::is_same_v<S, WeightedTree>) {
            return tree_foot(space, as<TreePoint>(x, "tree"), as<TreePoint>(seg.start, "tree"),
                             as<TreePoint>(seg.end, "tree"));
          } else if constexpr (std::is_same_v<S, ProductSpace>) {
            return product_foot(space, as<ProductPoint>(x, "product"), as<ProductPoint>(seg.start, "product"),
                                as<ProductPoint>(seg.end, "product"), seg.length);
          } else if constexpr (std::is_same_v<S, EuclideanSpace>) {
            double t = 0;
            const double sq = euclid_point_segment_sq<double>(as<EuclideanPoint>(x, "flat space").coords,
                                                              as<EuclideanPoint>(seg.start, "flat space").coords,
                                                              as<EuclideanPoint>(seg.end, "flat space").coords, &t);
            return {std::sqrt(std::max(0.0, sq)), t * seg.length};
          } else {
            return complex_point_to_segment(space, as<ComplexPoint>(x, "complex"), seg);
          }
        },
        X);
    if (f.distance < best.distance) best = {f.distance, acc + f.parameter};
    acc += seg.length;
  }
  return best;
}

FootPoint point_to_path_search(const Space& X, const SpacePoint& x, const GeodesicPath& path, double tol) {
  FootPoint best{std::numeric_limits<double>::infinity(), 0};
  double acc = 0;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (const auto& seg : path.segments) {
    auto f = [&](double s) { return distance(X, x, segment_eval(X, seg, s)); };
    double lo = 0, hi = seg.length;
    double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    double f1 = f(m1), f2 = f(m2);
    while (hi - lo > tol) {
      if (f1 <= f2) {
        hi = m2;
        m2 = m1;
        f2 = f1;
        m1 = hi - phi * (hi - lo);
        f1 = f(m1);
      } else {
        lo = m1;
        m1 = m2;
        f1 = f2;
        m2 = lo + phi * (hi - lo);
        f2 = f(m2);
      }
    }
    for (double s : {0.0, seg.length, 0.5 * (lo + hi)}) {
      const double v = f(s);
      if (v < best.distance) best = {v, acc + s};
    }
    acc += seg.length;
  }
  return best;
}

std::optional<Rational> exact_point_to_path_sq(const Space& X, const SpacePoint& x, const GeodesicPath& path) {
  if (path.segments.size() != 1) return std::nullopt;
  const auto& seg = path.segments[0];
  if (const auto* T = std::get_if<WeightedTree>(&X)) {
    const auto& px = std::get<TreePoint>(x);
    const auto& pa = std::get<TreePoint>(seg.start);
    const auto& pb = std::get<TreePoint>(seg.end);
    if (!exact_offset(px) || !exact_offset(pa) || !exact_offset(pb)) return std::nullopt;
    ExactTree E{*T};
    const Rational delta = (E.dist(px, pa) + E.dist(px, pb) - E.dist(pa, pb)) / Rational(2);
    return delta * delta;
  }
  if (const auto* P = std::get_if<ProductSpace>(&X)) {
    const auto& px = std::get<ProductPoint>(x);
    const auto& pa = std::get<ProductPoint>(seg.start);
    const auto& pb = std::get<ProductPoint>(seg.end);
    if (!exact_offset(px.tree) || !exact_offset(pa.tree) || !exact_offset(pb.tree)) return std::nullopt;
    const auto hx = exact_rational(px.height), ha = exact_rational(pa.height), hb = exact_rational(pb.height);
    if (!hx || !ha || !hb) return std::nullopt;
    ExactTree E{P->tree};
    const Rational D = E.dist(pa.tree, pb.tree);
    const Rational dp = E.dist(px.tree, pa.tree);
    const Rational dq = E.dist(px.tree, pb.tree);
    Rational s = (dp + D - dq) / Rational(2);
    if (s < 0) s = 0;
    if (s > D) s = D;
    Rational delta = (dp + dq - D) / Rational(2);
    if (delta < 0) delta = 0;
    return strip_point_segment_sq<Rational>(D, *hb - *ha, s, delta, *hx - *ha);
  }
  if (std::get_if<EuclideanSpace>(&X)) {
    auto conv = [](const EuclideanPoint& p) -> std::optional<std::vector<Rational>> {
      std::vector<Rational> out;
      for (double c : p.coords) {
        const auto r = exact_rational(c);
        if (!r) return std::nullopt;
        out.push_back(*r);
      }
      return out;
    };
    const auto a = conv(std::get<EuclideanPoint>(x));
    const auto b = conv(std::get<EuclideanPoint>(seg.start));
    const auto c = conv(std::get<EuclideanPoint>(seg.end));
    if (!a || !b || !c) return std::nullopt;
    return euclid_point_segment_sq<Rational>(*a, *b, *c);
  }
  return std::nullopt;
}

bool segment_ball_intersects(const Space& X, const GeodesicPath& path, const SpacePoint& center, double radius,
                             std::optional<Rational> radius_sq) {
  if (radius_sq) {
    if (const auto exact = exact_point_to_path_sq(X, center, path)) return *exact <= *radius_sq;
  }
  return point_to_path(X, center, path).distance <= radius + 1e-12 * std::max(1.0, radius);
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

std::string describe_tree_point(const WeightedTree& T, const TreePoint& p) {
  std::string s = tree_word_string(p.vertex, *T.family);
  if (p.edge) {
    TreeWord w;
    w.push_back(*p.edge);
    s += " +" + fmt(p.offset) + " toward " + tree_word_string(w, *T.family);
  }
  return s;
}

}  // namespace

std::string describe_point(const Space& X, const SpacePoint& p) {
  return std::visit(
      [&](const auto& space) -> std::string {
        using S = std::decay_t<decltype(space)>;
        if constexpr (std::is_same_v<S, WeightedTree>) {
          return describe_tree_point(space, std::get<TreePoint>(p));
        } else if constexpr (std::is_same_v<S, ProductSpace>) {
          const auto& q = std::get<ProductPoint>(p);
          return "(" + describe_tree_point(space.tree, q.tree) + ", " + fmt(q.height) + ")";
        } else if constexpr (std::is_same_v<S, EuclideanSpace>) {
          std::string s = "(";
          const auto& c = std::get<EuclideanPoint>(p).coords;
          for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + fmt(c[i]);
          return s + ")";
        } else {
          return describe_complex_point(space, std::get<ComplexPoint>(p));
        }
      },
      X);
}

std::string describe_space(const Space& X) {
  return std::visit(
      [](const auto& space) -> std::string {
        using S = std::decay_t<decltype(space)>;
        auto weights = [](const WeightedTree& T) {
          std::string s;
          for (int g = 0; g < T.family->generator_count(); ++g)
            s += (g ? " " : "") + T.family->generator_name(g) + "=" + to_string(T.weights[g]);
          return s;
        };
        if constexpr (std::is_same_v<S, WeightedTree>) {
          return "tree of " + space.family->describe() + " [" + weights(space) + "]";
        } else if constexpr (std::is_same_v<S, ProductSpace>) {
          return "tree of " + space.tree.family->describe() + " [" + weights(space.tree) + "] x R";
        } else if constexpr (std::is_same_v<S, EuclideanSpace>) {
          return "R^" + std::to_string(space.dim);
        } else {
          return "complex of " + space.group->describe();
        }
      },
      X);
}

}  // namespace cat0
