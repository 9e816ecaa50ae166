#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cat0/closed_forms.hpp"
#include "cat0/spaces.hpp"

namespace cat0 {

PieceSpec PieceSpec::flat(std::vector<std::vector<Rational>> basis) {
  PieceSpec p;
  p.kind = PieceKind::FlatLattice;
  p.basis = std::move(basis);
  return p;
}

PieceSpec PieceSpec::cone(Rational spoke) {
  if (spoke <= 0) throw std::invalid_argument("cone spoke length must be positive");
  PieceSpec p;
  p.kind = PieceKind::Cone;
  p.spoke = spoke;
  return p;
}

PieceSpec PieceSpec::interval(Rational length) {
  if (length <= 0) throw std::invalid_argument("interval length must be positive");
  PieceSpec p;
  p.kind = PieceKind::Interval;
  p.length = length;
  return p;
}

PieceSpec PieceSpec::tree_times_line(WeightedTree tree, Rational line_unit) {
  if (line_unit <= 0) throw std::invalid_argument("line unit must be positive");
  PieceSpec p;
  p.kind = PieceKind::TreeTimesLine;
  p.tree = std::move(tree);
  p.line_unit = line_unit;
  return p;
}

namespace {

Rational determinant(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && m[pivot][c] == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

}  // namespace

FreeProductComplex::FreeProductComplex(FamilyPtr g, std::vector<PieceSpec> p) : group(std::move(g)), pieces(std::move(p)) {
  if (!group || group->kind() != FamilyKind::FreeProduct)
    throw std::invalid_argument("complex: group must be a free product");
  if (pieces.size() != group->factors().size()) throw std::invalid_argument("complex: one piece per factor required");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const GroupFamily& f = *group->factors()[i];
    const PieceSpec& piece = pieces[i];
    const std::string where = "complex piece " + std::to_string(i) + ": ";
    switch (piece.kind) {
      case PieceKind::FlatLattice: {
        if (f.kind() != FamilyKind::FreeAbelian) throw std::invalid_argument(where + "flat piece needs a Z^n factor");
        const auto n = static_cast<std::size_t>(f.rank());
        if (piece.basis.size() != n) throw std::invalid_argument(where + "basis must be n x n");
        for (const auto& row : piece.basis)
          if (row.size() != n) throw std::invalid_argument(where + "basis must be n x n");
        if (determinant(piece.basis) == 0) throw std::invalid_argument(where + "basis is singular");
        break;
      }
      case PieceKind::Cone:
        if (f.kind() != FamilyKind::FiniteCyclic) throw std::invalid_argument(where + "cone piece needs a Z_m factor");
        break;
      case PieceKind::Interval:
        if (f.kind() != FamilyKind::FiniteCyclic || f.order() != 2)
          throw std::invalid_argument(where + "interval piece needs a Z_2 factor");
        break;
      case PieceKind::TreeTimesLine:
        if (f.kind() != FamilyKind::DirectWithLine || f.line_kind() != LineKind::Translation)
          throw std::invalid_argument(where + "tree x line piece needs a (tree group) x Z factor");
        if (!piece.tree.family || !same_family(*piece.tree.family, *f.base()))
          throw std::invalid_argument(where + "tree family differs from the factor base");
        break;
    }
  }
}

namespace {

constexpr double kTol = 1e-12;

ComplexPoint local_point(int piece) {
  ComplexPoint p;
  p.piece = piece;
  return p;
}

// Applies x in the factor group to local coordinates of its piece.
ComplexPoint piece_apply(const FreeProductComplex& S, int piece, const GroupElement& x, const ComplexPoint& p) {
  const PieceSpec& spec = S.pieces[piece];
  ComplexPoint out = p;
  switch (spec.kind) {
    case PieceKind::FlatLattice:
      for (std::size_t r = 0; r < spec.basis.size(); ++r)
        for (std::size_t c = 0; c < spec.basis.size(); ++c)
          out.local[r] += to_double(spec.basis[r][c]) * static_cast<double>(x.coords()[c]);
      break;
    case PieceKind::Interval:
      if (x.coords()[0] != 0) out.local[0] = to_double(spec.length) - p.local[0];
      break;
    case PieceKind::Cone: {
      const int m = S.group->factors()[piece]->order();
      if (p.local[1] > 0) out.local[0] = static_cast<double>((static_cast<std::int64_t>(p.local[0]) + x.coords()[0]) % m);
      break;
    }
    case PieceKind::TreeTimesLine:
      out.product->tree = tree_translate(spec.tree, tree_word(x), p.product->tree);
      out.product->height = p.product->height + to_double(spec.line_unit) * static_cast<double>(x.line());
      break;
  }
  return out;
}

// Position of the orbit point x * x0 for x in the factor group.
ComplexPoint vertex_local(const FreeProductComplex& S, int piece, const GroupElement* x) {
  const PieceSpec& spec = S.pieces[piece];
  ComplexPoint p = local_point(piece);
  switch (spec.kind) {
    case PieceKind::FlatLattice:
      p.local.assign(spec.basis.size(), 0.0);
      break;
    case PieceKind::Interval:
      p.local = {0.0};
      break;
    case PieceKind::Cone:
      p.local = {0.0, to_double(spec.spoke)};
      break;
    case PieceKind::TreeTimesLine:
      p.product = ProductPoint{};
      break;
  }
  return x ? piece_apply(S, piece, *x, p) : p;
}

FootPoint local_foot(const FreeProductComplex& S, int piece, const ComplexPoint& x, const PathSegment& seg);

double local_distance(const FreeProductComplex& S, int piece, const ComplexPoint& p, const ComplexPoint& q) {
  const PieceSpec& spec = S.pieces[piece];
  switch (spec.kind) {
    case PieceKind::FlatLattice: {
      double s = 0;
      for (std::size_t i = 0; i < p.local.size(); ++i) {
        const double d = p.local[i] - q.local[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case PieceKind::Interval:
      return std::abs(p.local[0] - q.local[0]);
    case PieceKind::Cone:
      if (p.local[1] == 0 || q.local[1] == 0) return p.local[1] + q.local[1];
      if (p.local[0] == q.local[0]) return std::abs(p.local[1] - q.local[1]);
      return p.local[1] + q.local[1];
    case PieceKind::TreeTimesLine:
      return product_distance(ProductSpace{spec.tree}, *p.product, *q.product);
  }
  return 0;
}

struct Route {
  bool same_piece = false;
  GroupElement exit;   // orbit vertex leaving p's piece
  GroupElement entry;  // orbit vertex entering q's piece
  ComplexPoint exit_local;
  ComplexPoint entry_local;
  std::vector<std::pair<int, GroupElement>> middle;
  ComplexPoint q_in_p;  // same_piece only
};

Route route(const FreeProductComplex& S, const ComplexPoint& p, const ComplexPoint& q) {
  Route r;
  const GroupElement h = p.anchor.inverse() * q.anchor;
  auto syl = syllables(h);
  if (p.piece >= 0 && q.piece == p.piece &&
      (syl.empty() || (syl.size() == 1 && syl[0].first == p.piece))) {
    r.same_piece = true;
    r.q_in_p = syl.empty() ? q : piece_apply(S, p.piece, syl[0].second, q);
    return r;
  }
  std::size_t i0 = 0, i1 = syl.size();
  r.exit = p.anchor;
  if (p.piece >= 0) {
    if (!syl.empty() && syl[0].first == p.piece) {
      r.exit_local = vertex_local(S, p.piece, &syl[0].second);
      r.exit = p.anchor * GroupElement::syllable(S.group, p.piece, syl[0].second);
      i0 = 1;
    } else {
      r.exit_local = vertex_local(S, p.piece, nullptr);
    }
  }
  r.entry = q.anchor;
  if (q.piece >= 0) {
    if (i1 > i0 && syl[i1 - 1].first == q.piece) {
      const GroupElement back = syl[i1 - 1].second.inverse();
      r.entry_local = vertex_local(S, q.piece, &back);
      r.entry = q.anchor * GroupElement::syllable(S.group, q.piece, back);
      --i1;
    } else {
      r.entry_local = vertex_local(S, q.piece, nullptr);
    }
  }
  r.middle.assign(syl.begin() + static_cast<std::ptrdiff_t>(i0), syl.begin() + static_cast<std::ptrdiff_t>(i1));
  return r;
}

double hop_length(const FreeProductComplex& S, int piece, const GroupElement& x) {
  return local_distance(S, piece, vertex_local(S, piece, nullptr), vertex_local(S, piece, &x));
}

void push_local_segment(const FreeProductComplex& S, const GroupElement& anchor, ComplexPoint a, ComplexPoint b,
                        GeodesicPath& path) {
  const int piece = a.piece;
  a.anchor = anchor;
  b.anchor = anchor;
  auto push = [&](const ComplexPoint& u, const ComplexPoint& v) {
    const double len = local_distance(S, piece, u, v);
    if (len <= 0) return;
    path.segments.push_back({u, v, len});
    path.total += len;
  };
  if (S.pieces[piece].kind == PieceKind::Cone && a.local[0] != b.local[0] && a.local[1] > 0 && b.local[1] > 0) {
    ComplexPoint apex = a;
    apex.local[1] = 0;
    push(a, apex);
    ComplexPoint apex2 = b;
    apex2.local[1] = 0;
    push(apex2, b);
    return;
  }
  push(a, b);
}

}  // namespace

ComplexPoint complex_orbit_point(const GroupElement& g) {
  ComplexPoint p;
  p.anchor = g;
  return p;
}

ComplexPoint complex_vertex_in_piece(const FreeProductComplex& S, const GroupElement& anchor, int piece,
                                     const GroupElement& factor_element) {
  ComplexPoint p = vertex_local(S, piece, &factor_element);
  p.anchor = anchor;
  return p;
}

double piece_local_distance(const FreeProductComplex& S, int piece, const ComplexPoint& p, const ComplexPoint& q) {
  return local_distance(S, piece, p, q);
}

double complex_distance(const FreeProductComplex& S, const GroupElement& g, const GroupElement& h) {
  double total = 0;
  for (const auto& [piece, x] : syllables(g.inverse() * h)) total += hop_length(S, piece, x);
  return total;
}

double complex_point_distance(const FreeProductComplex& S, const ComplexPoint& p, const ComplexPoint& q) {
  const Route r = route(S, p, q);
  if (r.same_piece) return local_distance(S, p.piece, p, r.q_in_p);
  double total = 0;
  if (p.piece >= 0) total += local_distance(S, p.piece, p, r.exit_local);
  for (const auto& [piece, x] : r.middle) total += hop_length(S, piece, x);
  if (q.piece >= 0) total += local_distance(S, q.piece, r.entry_local, q);
  return total;
}

GeodesicPath complex_geodesic(const FreeProductComplex& S, const ComplexPoint& p, const ComplexPoint& q) {
  GeodesicPath path;
  const Route r = route(S, p, q);
  if (r.same_piece) {
    push_local_segment(S, p.anchor, p, r.q_in_p, path);
  } else {
    if (p.piece >= 0) push_local_segment(S, p.anchor, p, r.exit_local, path);
    GroupElement at = r.exit;
    for (const auto& [piece, x] : r.middle) {
      push_local_segment(S, at, vertex_local(S, piece, nullptr), vertex_local(S, piece, &x), path);
      at *= GroupElement::syllable(S.group, piece, x);
    }
    if (q.piece >= 0) push_local_segment(S, q.anchor, r.entry_local, q, path);
  }
  if (path.segments.empty()) path.segments.push_back({p, p, 0.0});
  return path;
}

SpacePoint complex_segment_eval(const FreeProductComplex& S, const PathSegment& seg, double s) {
  const auto& a = std::get<ComplexPoint>(seg.start);
  const auto& b = std::get<ComplexPoint>(seg.end);
  const double eps = kTol * std::max(1.0, seg.length);
  if (s < -eps || s > seg.length + eps) throw std::out_of_range("complex segment: arclength out of range");
  if (a.piece < 0 || seg.length == 0) return a;
  const double f = std::clamp(s / seg.length, 0.0, 1.0);
  ComplexPoint out = a;
  switch (S.pieces[a.piece].kind) {
    case PieceKind::FlatLattice:
    case PieceKind::Interval:
      for (std::size_t i = 0; i < a.local.size(); ++i) out.local[i] = a.local[i] + f * (b.local[i] - a.local[i]);
      break;
    case PieceKind::Cone:
      out.local[0] = a.local[1] == 0 ? b.local[0] : a.local[0];
      out.local[1] = a.local[1] + f * (b.local[1] - a.local[1]);
      break;
    case PieceKind::TreeTimesLine:
      out.product = product_geodesic_eval(ProductSpace{S.pieces[a.piece].tree}, *a.product, *b.product,
                                          f * seg.length);
      break;
  }
  return out;
}

SpacePoint complex_geodesic_eval(const FreeProductComplex& S, const GroupElement& g, const GroupElement& h, double s) {
  const Space X = S;
  return path_eval(X, complex_geodesic(S, complex_orbit_point(g), complex_orbit_point(h)), s);
}

namespace {

FootPoint local_foot(const FreeProductComplex& S, int piece, const ComplexPoint& x, const PathSegment& seg) {
  const auto& a = std::get<ComplexPoint>(seg.start);
  const auto& b = std::get<ComplexPoint>(seg.end);
  switch (S.pieces[piece].kind) {
    case PieceKind::FlatLattice:
    case PieceKind::Interval: {
      double t = 0;
      const double sq = euclid_point_segment_sq<double>(x.local, a.local, b.local, &t);
      return {std::sqrt(std::max(0.0, sq)), t * seg.length};
    }
    case PieceKind::Cone: {
      // Segments lie on one spoke (one endpoint may be the apex).
      const int spoke = static_cast<int>(a.local[1] == 0 ? b.local[0] : a.local[0]);
      const double lo = std::min(a.local[1], b.local[1]);
      const double hi = std::max(a.local[1], b.local[1]);
      const bool on_spoke = x.local[1] == 0 || static_cast<int>(x.local[0]) == spoke;
      double nearest = on_spoke ? std::clamp(x.local[1], lo, hi) : lo;
      const double d = on_spoke ? std::abs(x.local[1] - nearest) : x.local[1] + lo;
      const double param = std::abs(nearest - a.local[1]);
      return {d, param};
    }
    case PieceKind::TreeTimesLine: {
      const ProductSpace P{S.pieces[piece].tree};
      const Space X = P;
      GeodesicPath path;
      path.segments.push_back({*a.product, *b.product, seg.length});
      path.total = seg.length;
      return point_to_path(X, *x.product, path);
    }
  }
  return {0, 0};
}

}  // namespace

FootPoint complex_point_to_segment(const FreeProductComplex& S, const ComplexPoint& x, const PathSegment& seg) {
  const auto& a = std::get<ComplexPoint>(seg.start);
  if (a.piece < 0) return {complex_point_distance(S, x, a), 0.0};
  const int f = a.piece;
  const GroupElement h = a.anchor.inverse() * x.anchor;
  const auto syl = syllables(h);
  const bool h_in_factor = syl.empty() || (syl.size() == 1 && syl[0].first == f);
  if (h_in_factor && (x.piece == f || x.piece < 0)) {
    ComplexPoint local;
    if (x.piece == f)
      local = syl.empty() ? x : piece_apply(S, f, syl[0].second, x);
    else
      local = vertex_local(S, f, syl.empty() ? nullptr : &syl[0].second);
    return local_foot(S, f, local, seg);
  }
  // Every path from x into this piece passes through one gate vertex.
  GroupElement gate = a.anchor;
  ComplexPoint gate_local;
  if (!syl.empty() && syl[0].first == f) {
    gate = a.anchor * GroupElement::syllable(S.group, f, syl[0].second);
    gate_local = vertex_local(S, f, &syl[0].second);
  } else {
    gate_local = vertex_local(S, f, nullptr);
  }
  const double to_gate = complex_point_distance(S, x, complex_orbit_point(gate));
  FootPoint inner = local_foot(S, f, gate_local, seg);
  return {to_gate + inner.distance, inner.parameter};
}

std::string describe_complex_point(const FreeProductComplex& S, const ComplexPoint& p) {
  std::ostringstream out;
  out.precision(12);
  out << p.anchor.to_string();
  if (p.piece < 0) return out.str() + " x0";
  out << " * piece" << p.piece << "(";
  if (S.pieces[p.piece].kind == PieceKind::TreeTimesLine && p.product) {
    out << tree_word_string(p.product->tree.vertex, *S.pieces[p.piece].tree.family);
    if (p.product->tree.edge) out << " +" << p.product->tree.offset;
    out << ", " << p.product->height;
  } else {
    for (std::size_t i = 0; i < p.local.size(); ++i) out << (i ? ", " : "") << p.local[i];
  }
  out << ")";
  return out.str();
}

}  // namespace cat0
