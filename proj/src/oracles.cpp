#include "cat0/oracles.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cat0 {

namespace {

struct Graph {
  std::vector<std::vector<std::pair<int, double>>> adj;

  int add_node() {
    adj.emplace_back();
    return static_cast<int>(adj.size()) - 1;
  }
  void add_edge(int u, int v, double w) {
    adj[u].emplace_back(v, w);
    adj[v].emplace_back(u, w);
  }
  // Chain of pieces of length <= mesh between u and v.
  void add_subdivided(int u, int v, double length, double mesh) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(length / mesh - 1e-9)));
    const double step = length / pieces;
    int prev = u;
    for (int i = 1; i < pieces; ++i) {
      const int mid = add_node();
      add_edge(prev, mid, step);
      prev = mid;
    }
    add_edge(prev, v, step);
  }

  double shortest(int from, int to) const {
    std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[from] = 0;
    heap.emplace(0.0, from);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (u == to) return d;
      if (d > dist[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        if (d + w < dist[v]) {
          dist[v] = d + w;
          heap.emplace(dist[v], v);
        }
      }
    }
    return dist[to];
  }
};

// Letters of a tree word as (gen, sign) pairs.
std::vector<std::pair<int, int>> expand(const TreeWord& w) {
  std::vector<std::pair<int, int>> out;
  for (const auto& run : w)
    for (std::int64_t i = 0; i < run.count; ++i) out.emplace_back(run.gen, run.sign);
  return out;
}

// Subdivided ball of a weighted tree; vertices are keyed by their letters.
struct TreeBall {
  Graph graph;
  std::map<std::vector<std::pair<int, int>>, int> vertex;
  // Interior nodes of the edge from a vertex to its child: (child) -> chain.
  std::map<std::vector<std::pair<int, int>>, std::vector<int>> chain;
  std::map<std::vector<std::pair<int, int>>, double> edge_length;

  TreeBall(const WeightedTree& T, double radius, double mesh) {
    const GroupFamily& F = *T.family;
    std::vector<std::pair<std::vector<std::pair<int, int>>, double>> frontier{{{}, 0.0}};
    vertex[{}] = graph.add_node();
    while (!frontier.empty()) {
      std::vector<std::pair<std::vector<std::pair<int, int>>, double>> next;
      for (const auto& [word, depth] : frontier) {
        for (int gen = 0; gen < F.generator_count(); ++gen) {
          for (int sign : {1, -1}) {
            if (sign == -1 && F.is_involution(gen)) continue;
            if (!word.empty() && word.back().first == gen &&
                (word.back().second == -sign || F.is_involution(gen)))
              continue;
            const double w = T.weight(gen);
            if (depth + w > radius + 1e-9) continue;
            auto child = word;
            child.emplace_back(gen, sign);
            const int c = graph.add_node();
            vertex[child] = c;
            const int parent = vertex[word];
            // Build the chain explicitly so edge points can be located.
            const int pieces = std::max(1, static_cast<int>(std::ceil(w / mesh - 1e-9)));
            const double step = w / pieces;
            std::vector<int> nodes{parent};
            for (int i = 1; i < pieces; ++i) nodes.push_back(graph.add_node());
            nodes.push_back(c);
            for (std::size_t i = 0; i + 1 < nodes.size(); ++i) graph.add_edge(nodes[i], nodes[i + 1], step);
            chain[child] = nodes;
            edge_length[child] = w;
            next.emplace_back(child, depth + w);
          }
        }
      }
      frontier = std::move(next);
    }
  }

  int locate(const TreePoint& p) const {
    auto word = expand(p.vertex);
    if (!p.edge) {
      auto it = vertex.find(word);
      if (it == vertex.end()) throw std::invalid_argument("graph oracle: point outside the ball");
      return it->second;
    }
    word.emplace_back(p.edge->gen, p.edge->sign);
    auto it = chain.find(word);
    if (it == chain.end()) throw std::invalid_argument("graph oracle: point outside the ball");
    const auto& nodes = it->second;
    const double step = edge_length.at(word) / static_cast<double>(nodes.size() - 1);
    const auto idx = static_cast<std::size_t>(std::llround(p.offset / step));
    return nodes[std::min(idx, nodes.size() - 1)];
  }
};

double factor_tree_distance(const WeightedTree& T, const TreeWord& u, const TreeWord& v) {
  const auto a = expand(u);
  const auto b = expand(v);
  std::size_t common = 0;
  while (common < a.size() && common < b.size() && a[common] == b[common]) ++common;
  double d = 0;
  for (std::size_t i = common; i < a.size(); ++i) d += T.weight(a[i].first);
  for (std::size_t i = common; i < b.size(); ++i) d += T.weight(b[i].first);
  return d;
}

}  // namespace

double tree_graph_distance(const WeightedTree& T, const TreePoint& p, const TreePoint& q, double radius, double mesh) {
  if (mesh <= 0) throw std::invalid_argument("graph oracle: mesh must be positive");
  const TreeBall ball(T, radius, mesh);
  return ball.graph.shortest(ball.locate(p), ball.locate(q));
}

double product_graph_distance(const ProductSpace& X, const ProductPoint& p, const ProductPoint& q, double radius,
                              double mesh) {
  const double t = tree_graph_distance(X.tree, p.tree, q.tree, radius, mesh);
  return std::hypot(t, p.height - q.height);
}

double complex_graph_distance(const FreeProductComplex& S, const GroupElement& k, int max_syllables,
                              int syllable_radius, double mesh) {
  const FamilyPtr& G = S.group;
  const auto& factors = G->factors();
  const int nf = static_cast<int>(factors.size());

  // Nontrivial factor elements of bounded length.
  std::vector<std::vector<GroupElement>> values(nf);
  for (int f = 0; f < nf; ++f)
    for (const auto& x : ball(factors[f], WeightAssignment::unit(*factors[f]), Rational(syllable_radius)))
      if (!x.is_identity()) values[f].push_back(x);

  // Elements as syllable sequences with alternating factors.
  struct Node {
    GroupElement g;
    int last_factor = -1;
    GroupElement last_value;
  };
  std::vector<Node> nodes{{GroupElement::identity(G), -1, {}}};
  std::vector<std::size_t> layer{0};
  for (int s = 0; s < max_syllables; ++s) {
    std::vector<std::size_t> next;
    for (std::size_t idx : layer) {
      for (int f = 0; f < nf; ++f) {
        if (f == nodes[idx].last_factor) continue;
        for (const auto& x : values[f]) {
          nodes.push_back({nodes[idx].g * GroupElement::syllable(G, f, x), f, x});
          next.push_back(nodes.size() - 1);
        }
      }
    }
    layer = std::move(next);
  }

  Graph graph;
  for (std::size_t i = 0; i < nodes.size(); ++i) graph.add_node();
  int target = -1;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].g == k) target = static_cast<int>(i);
  if (target < 0) throw std::invalid_argument("graph oracle: element outside the enumerated set");

  // Group orbit points by piece copy g G_f: key is the coset representative
  // with the trailing f-syllable removed.
  std::map<std::pair<int, std::string>, std::vector<std::pair<int, GroupElement>>> cosets;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    for (int f = 0; f < nf; ++f) {
      if (n.last_factor == f) {
        const GroupElement rep = n.g * GroupElement::syllable(G, f, n.last_value).inverse();
        cosets[{f, rep.to_string()}].emplace_back(static_cast<int>(i), n.last_value);
      } else {
        cosets[{f, n.g.to_string()}].emplace_back(static_cast<int>(i), GroupElement::identity(factors[f]));
      }
    }
  }

  for (const auto& [key, members] : cosets) {
    const int f = key.first;
    const PieceSpec& piece = S.pieces[f];
    switch (piece.kind) {
      case PieceKind::FlatLattice: {
        const std::size_t n = piece.basis.size();
        auto embed = [&](const GroupElement& x) {
          std::vector<double> v(n, 0.0);
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) v[r] += to_double(piece.basis[r][c]) * static_cast<double>(x.coords()[c]);
          return v;
        };
        std::vector<std::vector<double>> pos;
        for (const auto& m : members) pos.push_back(embed(m.second));
        for (std::size_t a = 0; a < members.size(); ++a)
          for (std::size_t b = a + 1; b < members.size(); ++b) {
            double sq = 0;
            for (std::size_t r = 0; r < n; ++r) sq += (pos[a][r] - pos[b][r]) * (pos[a][r] - pos[b][r]);
            graph.add_edge(members[a].first, members[b].first, std::sqrt(sq));
          }
        break;
      }
      case PieceKind::Cone: {
        const int apex = graph.add_node();
        for (const auto& m : members) graph.add_subdivided(m.first, apex, to_double(piece.spoke), mesh);
        break;
      }
      case PieceKind::Interval: {
        for (std::size_t a = 0; a < members.size(); ++a)
          for (std::size_t b = a + 1; b < members.size(); ++b)
            graph.add_subdivided(members[a].first, members[b].first, to_double(piece.length), mesh);
        break;
      }
      case PieceKind::TreeTimesLine: {
        const double unit = to_double(piece.line_unit);
        for (std::size_t a = 0; a < members.size(); ++a)
          for (std::size_t b = a + 1; b < members.size(); ++b) {
            const GroupElement& x = members[a].second;
            const GroupElement& y = members[b].second;
            const double t = factor_tree_distance(piece.tree, tree_word(x), tree_word(y));
            const double h = unit * static_cast<double>(x.line() - y.line());
            graph.add_edge(members[a].first, members[b].first, std::hypot(t, h));
          }
        break;
      }
    }
  }
  return graph.shortest(0, target);
}

}  // namespace cat0
