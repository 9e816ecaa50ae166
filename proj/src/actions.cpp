#include "cat0/actions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "cat0/closed_forms.hpp"

namespace cat0 {

namespace {

Rational det(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational out(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return Rational(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      out = -out;
    }
    out *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return out;
}

const WeightedTree& tree_of(const ActionSpec& A) {
  if (auto* t = std::get_if<WeightedTree>(&A.space)) return *t;
  return std::get<ProductSpace>(A.space).tree;
}

bool is_tree(const ActionSpec& A) { return std::holds_alternative<WeightedTree>(A.space); }
bool is_product(const ActionSpec& A) { return std::holds_alternative<ProductSpace>(A.space); }
bool is_flat(const ActionSpec& A) { return std::holds_alternative<EuclideanSpace>(A.space); }
bool is_complex(const ActionSpec& A) { return std::holds_alternative<FreeProductComplex>(A.space); }

void check_group(const ActionSpec& A, const GroupElement& g) {
  if (!g.family() || !same_family(*g.family(), *A.group))
    throw std::invalid_argument("element " + (g.family() ? g.to_string() : std::string("<empty>")) +
                                " is outside the acting group " + A.group->describe());
}

// Height shift of a tree word: the homomorphism to R given per generator.
Rational shift_of(const ActionSpec& A, const TreeWord& w) {
  Rational out(0);
  if (A.shift.empty()) return out;
  for (const TreeRun& r : w) out += A.shift[r.gen] * Rational(r.sign * r.count);
  return out;
}

bool dihedral(const ActionSpec& A) { return A.group->line_kind() == LineKind::Dihedral; }

Rational tree_len(const ActionSpec& A, const GroupElement& g) {
  const WeightedTree& T = tree_of(A);
  return tree_word_length(tree_word(g), T.weights);
}

std::vector<Rational> lattice_image(const ActionSpec& A, const std::vector<std::int64_t>& c) {
  const std::size_t n = A.basis.size();
  std::vector<Rational> out(n, Rational(0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) out[r] += A.basis[r][k] * Rational(c[k]);
  return out;
}

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Rational& r : v) out.push_back(to_double(r));
  return out;
}

// Letters of the tree family as (gen, sign) steps.
std::vector<TreeRun> tree_steps(const GroupFamily& F) {
  std::vector<TreeRun> out;
  for (int gen = 0; gen < F.generator_count(); ++gen) {
    out.push_back({gen, 1, 1});
    if (!F.is_involution(gen)) out.push_back({gen, -1, 1});
  }
  return out;
}

TreeRun invert(const GroupFamily& F, TreeRun r) {
  if (!F.is_involution(r.gen)) r.sign = -r.sign;
  return r;
}

// Vertices of the tree within distance radius of p, with their distances.
void tree_vertices_near(const WeightedTree& T, const TreePoint& p, double radius,
                        const std::function<void(const TreeWord&, double)>& visit) {
  const GroupFamily& F = *T.family;
  const auto steps = tree_steps(F);
  const double slack = 1e-12 * std::max(1.0, radius);
  std::function<void(TreeWord&, double, std::optional<TreeRun>)> walk = [&](TreeWord& v, double d,
                                                                             std::optional<TreeRun> back) {
    if (d > radius + slack) return;
    visit(v, d);
    for (const TreeRun& s : steps) {
      if (back && s.gen == back->gen && s.sign == back->sign) continue;
      const double nd = d + T.weight(s.gen);
      if (nd > radius + slack) continue;
      TreeWord next = v;
      append_run(next, s, F);
      walk(next, nd, invert(F, s));
    }
  };
  TreeWord start = p.vertex;
  if (!p.edge) {
    walk(start, 0.0, std::nullopt);
    return;
  }
  walk(start, p.offset, *p.edge);
  TreeWord child = p.vertex;
  append_run(child, *p.edge, F);
  walk(child, T.weight(p.edge->gen) - p.offset, invert(F, *p.edge));
}

struct RankedNear {
  std::int64_t key;
  Rational length;
  std::vector<int> letters;
  NearElement near;
};

std::vector<NearElement> rank(std::vector<NearElement> found, const ActionSpec& A) {
  const WeightAssignment unit = unit_weights(A);
  std::vector<RankedNear> ranked;
  ranked.reserve(found.size());
  for (auto& n : found)
    ranked.push_back({std::llround(n.distance * 1e9), word_length(n.element, unit), n.element.letters(), n});
  std::sort(ranked.begin(), ranked.end(), [](const RankedNear& a, const RankedNear& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.length != b.length) return a.length < b.length;
    return a.letters < b.letters;
  });
  std::vector<NearElement> out;
  out.reserve(ranked.size());
  for (auto& r : ranked) out.push_back(std::move(r.near));
  return out;
}

// Squared covering radius of a lattice with the given basis columns, when a
// closed form is available.
std::optional<Rational> lattice_covering_sq(const std::vector<std::vector<Rational>>& basis) {
  const std::size_t n = basis.size();
  auto col = [&](std::size_t j) {
    std::vector<Rational> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = basis[r][j];
    return v;
  };
  auto dot = [](const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  if (n == 1) return basis[0][0] * basis[0][0] / Rational(4);
  if (n == 2) {
    // Lagrange reduction, then the circumradius of the non-obtuse triangle
    // 0, u, v: R^2 = |u|^2 |v|^2 |u - v|^2 / (4 det^2).
    std::vector<Rational> u = col(0), v = col(1);
    for (int guard = 0; guard < 256; ++guard) {
      if (dot(u, u) > dot(v, v)) std::swap(u, v);
      const Rational q = dot(u, v) / dot(u, u);
      const auto k = static_cast<std::int64_t>(std::llround(to_double(q)));
      if (k == 0) break;
      for (std::size_t i = 0; i < 2; ++i) v[i] -= Rational(k) * u[i];
    }
    if (dot(u, v) < 0)
      for (auto& c : v) c = -c;
    std::vector<Rational> w{u[0] - v[0], u[1] - v[1]};
    const Rational d = u[0] * v[1] - u[1] * v[0];
    return dot(u, u) * dot(v, v) * dot(w, w) / (Rational(4) * d * d);
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (r != c && basis[r][c] != 0) return std::nullopt;
  Rational s(0);
  for (std::size_t i = 0; i < n; ++i) s += basis[i][i] * basis[i][i] / Rational(4);
  return s;
}

Rational half_sq(const Rational& x) { return x * x / Rational(4); }

}  // namespace

WeightAssignment unit_weights(const ActionSpec& A) { return WeightAssignment::unit(*A.group); }

SpacePoint ActionSpec::basepoint() const { return orbit_point(*this, GroupElement::identity(group)); }

std::string ActionSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ActionKind::Natural: os << "natural"; break;
    case ActionKind::BowersRuaneDot: os << "product (dot)"; break;
    case ActionKind::BowersRuaneStar: os << "product with height shifts (star)"; break;
    case ActionKind::LatticeLinear: os << "lattice"; break;
    case ActionKind::ComplexNatural: os << "complex"; break;
  }
  os << " action of " << group->describe() << " on " << describe_space(space);
  if (!shift.empty()) {
    os << ", shifts";
    for (std::size_t i = 0; i < shift.size(); ++i) os << ' ' << group->generator_name(static_cast<int>(i)) << "->" << to_string(shift[i]);
  }
  if (!basis.empty()) {
    os << ", basis";
    for (std::size_t c = 0; c < basis.size(); ++c) {
      os << " (";
      for (std::size_t r = 0; r < basis.size(); ++r) os << (r ? "," : "") << to_string(basis[r][c]);
      os << ')';
    }
  }
  return os.str();
}

ActionSpec tree_action(WeightedTree tree) {
  ActionSpec A;
  A.group = tree.family;
  A.space = std::move(tree);
  return A;
}

ActionSpec product_action(FamilyPtr group, WeightedTree tree, std::vector<Rational> shift, Rational line_unit) {
  if (!group || group->kind() != FamilyKind::DirectWithLine)
    throw std::invalid_argument("product action needs a direct product with a line factor");
  if (!same_family(*group->base(), *tree.family))
    throw std::invalid_argument("product action: tree family differs from the base group");
  if (line_unit <= 0) throw std::invalid_argument("product action: line unit must be positive");
  const int k = tree.family->generator_count();
  if (!shift.empty() && static_cast<int>(shift.size()) != k)
    throw std::invalid_argument("product action: one height shift per tree generator expected");
  bool any = false;
  for (int gen = 0; gen < static_cast<int>(shift.size()); ++gen) {
    if (shift[gen] == 0) continue;
    any = true;
    if (tree.family->is_involution(gen))
      throw std::invalid_argument("product action: an involution cannot shift height");
  }
  if (any && group->line_kind() == LineKind::Dihedral)
    throw std::invalid_argument("product action: height shifts need a translation line factor");
  ActionSpec A;
  A.group = std::move(group);
  A.space = ProductSpace{std::move(tree)};
  A.kind = any ? ActionKind::BowersRuaneStar : ActionKind::Natural;
  if (any) A.shift = std::move(shift);
  A.line_unit = line_unit;
  return A;
}

ActionSpec lattice_action(FamilyPtr group, std::vector<std::vector<Rational>> basis) {
  if (!group || group->kind() != FamilyKind::FreeAbelian)
    throw std::invalid_argument("lattice action needs a free abelian group");
  const auto n = static_cast<std::size_t>(group->rank());
  if (basis.empty()) {
    basis.assign(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) basis[i][i] = 1;
  }
  if (basis.size() != n) throw std::invalid_argument("lattice action: basis size differs from the rank");
  for (const auto& row : basis)
    if (row.size() != n) throw std::invalid_argument("lattice action: basis must be square");
  if (det(basis) == 0) throw std::invalid_argument("lattice action: basis is singular");
  ActionSpec A;
  A.group = std::move(group);
  A.space = EuclideanSpace{static_cast<int>(n)};
  A.kind = ActionKind::LatticeLinear;
  bool identity = true;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (basis[r][c] != Rational(r == c ? 1 : 0)) identity = false;
  if (identity) A.kind = ActionKind::Natural;
  A.basis = std::move(basis);
  return A;
}

ActionSpec complex_action(FreeProductComplex complex) {
  ActionSpec A;
  A.group = complex.group;
  A.space = std::move(complex);
  A.kind = ActionKind::ComplexNatural;
  return A;
}

std::optional<Rational> orbit_height(const ActionSpec& A, const GroupElement& g) {
  if (!is_product(A)) return std::nullopt;
  check_group(A, g);
  Rational h = A.line_unit * Rational(g.line());
  if (!dihedral(A)) h += shift_of(A, tree_word(g));
  return h;
}

std::optional<std::vector<Rational>> orbit_coords(const ActionSpec& A, const GroupElement& g) {
  if (!is_flat(A)) return std::nullopt;
  check_group(A, g);
  return lattice_image(A, g.coords());
}

SpacePoint orbit_point(const ActionSpec& A, const GroupElement& g) {
  check_group(A, g);
  if (is_tree(A)) return tree_vertex(tree_word(g));
  if (is_product(A)) return ProductPoint{tree_vertex(tree_word(g)), to_double(*orbit_height(A, g))};
  if (is_flat(A)) return EuclideanPoint{to_doubles(*orbit_coords(A, g))};
  return complex_orbit_point(g);
}

SpacePoint product_orbit_point(const ActionSpec& A, const TreeWord& w, std::int64_t line) {
  if (!is_product(A)) throw std::invalid_argument("product_orbit_point: not a product action");
  Rational h = A.line_unit * Rational(line);
  if (!dihedral(A)) h += shift_of(A, w);
  return ProductPoint{tree_vertex(w), to_double(h)};
}

SpacePoint apply(const ActionSpec& A, const GroupElement& g, const SpacePoint& x) {
  check_group(A, g);
  if (is_tree(A)) {
    const auto* p = std::get_if<TreePoint>(&x);
    if (!p) throw std::invalid_argument("apply: point is not a tree point");
    return tree_translate(std::get<WeightedTree>(A.space), tree_word(g), *p);
  }
  if (is_product(A)) {
    const auto* p = std::get_if<ProductPoint>(&x);
    if (!p) throw std::invalid_argument("apply: point is not a product point");
    ProductPoint out;
    out.tree = tree_translate(tree_of(A), tree_word(g), p->tree);
    const double unit = to_double(A.line_unit) * static_cast<double>(g.line());
    if (dihedral(A))
      out.height = (g.line() % 2 == 0 ? p->height : -p->height) + unit;
    else
      out.height = p->height + unit + to_double(shift_of(A, tree_word(g)));
    return out;
  }
  if (is_flat(A)) {
    const auto* p = std::get_if<EuclideanPoint>(&x);
    if (!p || p->coords.size() != A.basis.size()) throw std::invalid_argument("apply: point is not in the flat");
    EuclideanPoint out = *p;
    const auto t = to_doubles(lattice_image(A, g.coords()));
    for (std::size_t i = 0; i < t.size(); ++i) out.coords[i] += t[i];
    return out;
  }
  const auto* p = std::get_if<ComplexPoint>(&x);
  if (!p) throw std::invalid_argument("apply: point is not a complex point");
  ComplexPoint out = *p;
  out.anchor = g * p->anchor;
  return out;
}

std::optional<Rational> orbit_distance_sq(const ActionSpec& A, const GroupElement& g, const GroupElement& h) {
  check_group(A, g);
  check_group(A, h);
  if (is_complex(A)) return std::nullopt;
  const GroupElement k = g.inverse() * h;
  if (is_tree(A)) {
    const Rational L = tree_len(A, k);
    return L * L;
  }
  if (is_product(A)) {
    const Rational L = tree_len(A, k);
    const Rational dh = *orbit_height(A, h) - *orbit_height(A, g);
    return L * L + dh * dh;
  }
  const auto p = *orbit_coords(A, g), q = *orbit_coords(A, h);
  Rational s(0);
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
  return s;
}

double orbit_distance(const ActionSpec& A, const GroupElement& g, const GroupElement& h) {
  if (auto sq = orbit_distance_sq(A, g, h)) return sqrt_of(*sq);
  return complex_distance(std::get<FreeProductComplex>(A.space), g, h);
}

std::optional<Rational> orbit_segment_distance_sq(const ActionSpec& A, const GroupElement& g, const GroupElement& a) {
  check_group(A, g);
  check_group(A, a);
  if (is_complex(A)) return std::nullopt;
  if (is_tree(A) || is_product(A)) {
    const Rational D = tree_len(A, g);
    const Rational dp = tree_len(A, a);
    const Rational dq = tree_len(A, a.inverse() * g);
    const Rational delta = (dp + dq - D) / Rational(2);
    if (is_tree(A)) return delta * delta;
    Rational s = (dp + D - dq) / Rational(2);
    if (s < 0) s = 0;
    if (s > D) s = D;
    return strip_point_segment_sq<Rational>(D, *orbit_height(A, g), s, delta, *orbit_height(A, a));
  }
  const auto origin = std::vector<Rational>(A.basis.size(), Rational(0));
  return euclid_point_segment_sq<Rational>(*orbit_coords(A, a), origin, *orbit_coords(A, g));
}

double orbit_segment_distance(const ActionSpec& A, const GroupElement& g, const GroupElement& a) {
  if (auto sq = orbit_segment_distance_sq(A, g, a)) return sqrt_of(*sq);
  const GroupElement e = GroupElement::identity(A.group);
  const GeodesicPath path = geodesic(A.space, orbit_point(A, e), orbit_point(A, g));
  return point_to_path(A.space, orbit_point(A, a), path).distance;
}

std::vector<NearElement> elements_near_point(const ActionSpec& A, const SpacePoint& x, double radius) {
  std::vector<NearElement> found;
  const double slack = 1e-12 * std::max(1.0, radius);
  if (radius < 0) return found;
  if (is_tree(A)) {
    const auto& T = std::get<WeightedTree>(A.space);
    tree_vertices_near(T, std::get<TreePoint>(x), radius, [&](const TreeWord& v, double d) {
      found.push_back({from_tree_word(A.group, v), d});
    });
    return rank(std::move(found), A);
  }
  if (is_product(A)) {
    const auto& p = std::get<ProductPoint>(x);
    const WeightedTree& T = tree_of(A);
    const double unit = to_double(A.line_unit);
    tree_vertices_near(T, p.tree, radius, [&](const TreeWord& v, double d) {
      const double room = std::sqrt(std::max(0.0, radius * radius - d * d));
      const double base = dihedral(A) ? 0.0 : to_double(shift_of(A, v));
      const auto lo = static_cast<std::int64_t>(std::ceil((p.height - room - base) / unit - 1e-9));
      const auto hi = static_cast<std::int64_t>(std::floor((p.height + room - base) / unit + 1e-9));
      const GroupElement w = from_tree_word(A.group->base(), v);
      for (std::int64_t k = lo; k <= hi; ++k) {
        const double dh = p.height - (base + unit * static_cast<double>(k));
        const double dist = std::sqrt(d * d + dh * dh);
        if (dist <= radius + slack) found.push_back({GroupElement::direct(A.group, w, k), dist});
      }
    });
    return rank(std::move(found), A);
  }
  if (is_flat(A)) {
    const auto& p = std::get<EuclideanPoint>(x);
    const std::size_t n = A.basis.size();
    // Solve basis * c = p in doubles by Gaussian elimination, then scan a box
    // whose half-width bounds |c - c0| through the Frobenius norm of the inverse.
    std::vector<std::vector<double>> m(n, std::vector<double>(2 * n, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) m[r][c] = to_double(A.basis[r][c]);
      m[r][n + r] = 1.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      std::swap(m[piv], m[c]);
      const double d = m[c][c];
      for (auto& v : m[c]) v /= d;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = m[r][c];
        for (std::size_t k = 0; k < 2 * n; ++k) m[r][k] -= f * m[c][k];
      }
    }
    double frob = 0;
    std::vector<double> c0(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        frob += m[r][n + c] * m[r][n + c];
        c0[r] += m[r][n + c] * p.coords[c];
      }
    const auto half = static_cast<std::int64_t>(std::ceil(std::sqrt(frob) * radius)) + 1;
    std::vector<std::int64_t> lo(n), c(n);
    for (std::size_t i = 0; i < n; ++i) lo[i] = static_cast<std::int64_t>(std::floor(c0[i])) - half;
    c = lo;
    while (true) {
      const auto img = to_doubles(lattice_image(A, c));
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += (img[i] - p.coords[i]) * (img[i] - p.coords[i]);
      const double d = std::sqrt(s);
      if (d <= radius + slack) found.push_back({GroupElement::abelian(A.group, c), d});
      std::size_t i = 0;
      while (i < n && ++c[i] > lo[i] + 2 * half + 1) {
        c[i] = lo[i];
        ++i;
      }
      if (i == n) break;
    }
    return rank(std::move(found), A);
  }
  // Complexes: pieces meet only at orbit points, so a geodesic from x to an
  // orbit point leaves the copy of x through one of its orbit points and then
  // crosses whole copies. Distances add along that chain.
  const auto& S = std::get<FreeProductComplex>(A.space);
  const auto& p = std::get<ComplexPoint>(x);
  const FamilyPtr& G = A.group;
  const auto& factors = G->factors();
  const int nf = static_cast<int>(factors.size());
  const double budget = radius + slack;

  // Factor elements u with d(y, u x0) <= limit inside one piece. A greedy
  // descent from the identity seeds a generator search; pieces are convex, so
  // word paths toward any target stay within a few hops of the straight
  // segment and the prune margin covers them.
  auto factor_search = [&](int f, const std::function<double(const GroupElement&)>& dist, double limit) {
    const FamilyPtr& F = factors[f];
    std::vector<GroupElement> steps;
    double hop = 0;
    for (int gen = 0; gen < F->generator_count(); ++gen)
      for (int sign : {1, -1}) {
        if (sign < 0 && F->is_involution(gen)) continue;
        steps.push_back(GroupElement::generator(F, gen, sign));
        hop = std::max(hop, complex_distance(S, GroupElement::identity(G), GroupElement::syllable(G, f, steps.back())));
      }
    GroupElement seed = GroupElement::identity(F);
    double seed_d = dist(seed);
    for (bool moved = true; moved;) {
      moved = false;
      for (const auto& s : steps) {
        GroupElement v = seed * s;
        const double d = dist(v);
        if (d < seed_d - 1e-12) {
          seed = std::move(v);
          seed_d = d;
          moved = true;
        }
      }
    }
    const double prune = std::max(limit, seed_d) + (F->generator_count() + 1) * hop;
    std::vector<std::pair<GroupElement, double>> out;
    std::unordered_set<GroupElement, GroupElementHash> seen{seed};
    std::deque<GroupElement> queue{seed};
    while (!queue.empty()) {
      GroupElement u = std::move(queue.front());
      queue.pop_front();
      const double d = dist(u);
      if (d <= limit) out.emplace_back(u, d);
      if (d > prune) continue;
      for (const auto& s : steps) {
        GroupElement v = u * s;
        if (seen.insert(v).second) queue.push_back(std::move(v));
      }
    }
    return out;
  };
  auto lift = [&](int f, const GroupElement& u) {
    return u.is_identity() ? GroupElement::identity(G) : GroupElement::syllable(G, f, u);
  };

  // Orbit points of each factor copy through a shared orbit point, by distance.
  std::vector<std::vector<std::pair<GroupElement, double>>> hops(nf);
  for (int f = 0; f < nf; ++f) {
    const GroupElement e = GroupElement::identity(G);
    hops[f] = factor_search(f, [&](const GroupElement& u) { return complex_distance(S, e, lift(f, u)); }, budget);
  }

  std::unordered_set<GroupElement, GroupElementHash> seen;
  // (element, distance so far, factor of the copy it was reached through)
  std::deque<std::tuple<GroupElement, double, int>> queue;
  auto visit = [&](GroupElement g, double d, int via) {
    if (!seen.insert(g).second) return;
    found.push_back({g, d});
    queue.emplace_back(std::move(g), d, via);
  };
  if (p.piece < 0) {
    visit(p.anchor, 0.0, -1);
  } else {
    for (auto& [u, d] : factor_search(
             p.piece,
             [&](const GroupElement& u) {
               return complex_point_distance(S, p, complex_orbit_point(p.anchor * lift(p.piece, u)));
             },
             budget))
      visit(p.anchor * lift(p.piece, u), d, p.piece);
  }
  while (!queue.empty()) {
    auto [g, d, via] = std::move(queue.front());
    queue.pop_front();
    for (int f = 0; f < nf; ++f) {
      if (f == via) continue;
      for (const auto& [u, h] : hops[f]) {
        if (u.is_identity() || d + h > budget) continue;
        visit(g * lift(f, u), d + h, f);
      }
    }
  }
  return rank(std::move(found), A);
}

QiConstants estimate_qi_constants(const ActionSpec& AX, const ActionSpec& AY, const Rational& L, const Rational& c_max) {
  if (!same_family(*AX.group, *AY.group)) throw std::invalid_argument("qi constants: actions of different groups");
  const auto elems = ball(AX.group, unit_weights(AX), L);
  if (elems.empty()) throw std::invalid_argument("qi constants: empty ball");
  const GroupElement e = GroupElement::identity(AX.group);
  std::vector<std::pair<double, double>> d;
  d.reserve(elems.size());
  for (const auto& k : elems) d.emplace_back(orbit_distance(AX, e, k), orbit_distance(AY, e, k));
  const Rational step(1, 8);
  QiConstants out;
  out.ball_radius = L;
  out.pairs_checked = elems.size();
  for (Rational lambda(1); lambda <= Rational(64); lambda += step) {
    const double l = to_double(lambda);
    double need = 0;
    for (const auto& [dx, dy] : d) need = std::max({need, dx - l * dy, dy / l - dx});
    const auto eighths = static_cast<std::int64_t>(std::ceil((need - 1e-9) * 8));
    const Rational C(std::max<std::int64_t>(0, eighths), 8);
    out.lambda = lambda;
    out.C = C;
    if (C <= c_max) break;
  }
  return out;
}

bool qi_sandwich_holds(const ActionSpec& AX, const ActionSpec& AY, const QiConstants& qi, const GroupElement& g,
                       const GroupElement& h) {
  const double dx = orbit_distance(AX, g, h);
  const double dy = orbit_distance(AY, g, h);
  const double l = to_double(qi.lambda), c = to_double(qi.C);
  const double tol = 1e-9 * std::max(1.0, dx + dy);
  return dy / l - c <= dx + tol && dx <= l * dy + c + tol;
}

CocompactnessRadius cocompactness_radius(const ActionSpec& A, const Rational& horizon) {
  CocompactnessRadius out;
  out.horizon = horizon;
  if (is_tree(A)) {
    out.exact_sq = half_sq(tree_of(A).weights.max_weight());
  } else if (is_product(A)) {
    out.exact_sq = half_sq(tree_of(A).weights.max_weight()) + half_sq(A.line_unit);
  } else if (is_flat(A)) {
    out.exact_sq = lattice_covering_sq(A.basis);
  } else {
    const auto& S = std::get<FreeProductComplex>(A.space);
    Rational best(0);
    bool known = true;
    for (const PieceSpec& piece : S.pieces) {
      std::optional<Rational> r;
      switch (piece.kind) {
        case PieceKind::FlatLattice: r = lattice_covering_sq(piece.basis); break;
        case PieceKind::Cone: r = piece.spoke * piece.spoke; break;
        case PieceKind::Interval: r = half_sq(piece.length); break;
        case PieceKind::TreeTimesLine:
          r = half_sq(piece.tree.weights.max_weight()) + half_sq(piece.line_unit);
          break;
      }
      if (!r) known = false;
      else best = std::max(best, *r);
    }
    if (known) out.exact_sq = best;
  }
  // Sample points on geodesics from the basepoint to orbit points in the ball.
  const GroupElement e = GroupElement::identity(A.group);
  const SpacePoint x0 = orbit_point(A, e);
  double search = out.exact_sq ? sqrt_of(*out.exact_sq) + 1e-9 : 1.0;
  for (const auto& h : ball(A.group, unit_weights(A), horizon)) {
    const GeodesicPath path = geodesic(A.space, x0, orbit_point(A, h));
    const int pieces = std::max(1, static_cast<int>(std::ceil(path.total * 4)));
    for (int k = 0; k <= pieces; ++k) {
      const SpacePoint z = path_eval(A.space, path, path.total * k / pieces);
      std::vector<NearElement> near;
      double r = search;
      while ((near = elements_near_point(A, z, r)).empty()) r *= 2;
      out.sampled = std::max(out.sampled, near.front().distance);
      ++out.samples;
    }
  }
  out.N = out.exact_sq ? sqrt_of(*out.exact_sq) : out.sampled;
  return out;
}

}  // namespace cat0
