#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "dendrolab/subdendrite.hpp"

namespace dendrolab {

/// Point of a metric graph: a node, or arclength s from the start of an edge.
struct GraphPoint {
  static constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

  NodeId node = kNoNode;
  EdgeId edge = 0;
  Rational s;

  static GraphPoint at_node(NodeId v) { return {v, 0, Rational(0)}; }
  static GraphPoint on_edge(EdgeId e, Rational s) { return {kNoNode, e, std::move(s)}; }
  bool is_node() const { return node != kNoNode; }
  friend bool operator==(const GraphPoint&, const GraphPoint&) = default;
};

/// Finite metric graph with positive rational edge lengths. Unlike Dendrite
/// it may contain cycles and parallel edges.
class MetricGraph {
public:
  using Edge = Dendrite::Edge;

  MetricGraph(std::size_t nodes, std::vector<Edge> edges) : nodes_(nodes), edges_(std::move(edges))
  {
    if (nodes_ == 0) throw PreconditionError("metric graph needs a node");
    for (const Edge& e : edges_) {
      if (e.u >= nodes_ || e.v >= nodes_) throw PreconditionError("edge endpoint out of range");
      if (e.u == e.v) throw PreconditionError("loops are not supported");
      if (e.length <= 0) throw PreconditionError("edge lengths must be positive");
    }
    all_pairs();
  }

  static MetricGraph from_dendrite(const Dendrite& w)
  {
    std::vector<Edge> edges;
    for (EdgeId e = 0; e < w.edge_count(); ++e) edges.push_back(w.edge(e));
    return MetricGraph(w.node_count(), std::move(edges));
  }

  /// K as a graph: its ambient nodes (renumbered in id order) and its
  /// edge-interior extremes become nodes, covered edge pieces become edges.
  static MetricGraph from_subdendrite(const Subdendrite& k)
  {
    const Dendrite& w = k.ambient();
    const Region& r = k.region();
    std::vector<NodeId> index(w.node_count(), GraphPoint::kNoNode);
    std::size_t count = 0;
    for (NodeId v : k.nodes()) index[v] = count++;
    std::vector<Edge> edges;
    auto point_node = [&](EdgeId e, const Rational& t) -> NodeId {
      if (t == 0) return index[w.edge(e).u];
      if (t == 1) return index[w.edge(e).v];
      return count++;
    };
    for (EdgeId e = 0; e < w.edge_count(); ++e) {
      const auto& iv = r.interval(e);
      if (!iv || iv->lo == iv->hi) continue;
      NodeId a = point_node(e, iv->lo), b = point_node(e, iv->hi);
      edges.push_back({a, b, (iv->hi - iv->lo) * w.edge(e).length});
    }
    if (count == 0) count = 1; // a single edge-interior point
    return MetricGraph(count, std::move(edges));
  }

  std::size_t node_count() const { return nodes_; }
  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }

  bool connected() const
  {
    for (NodeId v = 0; v < nodes_; ++v)
      if (!dist_[0][v]) return false;
    return true;
  }

  /// Node distance, or nullopt across components.
  const std::optional<Rational>& node_distance(NodeId u, NodeId v) const { return dist_.at(u).at(v); }

  std::optional<Rational> distance(const GraphPoint& p, const GraphPoint& q) const
  {
    std::optional<Rational> best;
    if (!p.is_node() && !q.is_node() && p.edge == q.edge) best = abs(p.s - q.s);
    Exit pe[2], qe[2];
    int pn = exits(p, pe), qn = exits(q, qe);
    for (int i = 0; i < pn; ++i)
      for (int j = 0; j < qn; ++j) {
        const auto& d = dist_[pe[i].node][qe[j].node];
        if (!d) continue;
        Rational via = *d + pe[i].cost + qe[j].cost;
        if (!best || via < *best) best = std::move(via);
      }
    return best;
  }

  /// Largest distance from p to a point of its component.
  Rational eccentricity(const GraphPoint& p) const
  {
    Rational worst(0);
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      auto a = distance(p, GraphPoint::at_node(edges_[e].u));
      auto b = distance(p, GraphPoint::at_node(edges_[e].v));
      if (!a) continue;
      const Rational& len = edges_[e].length;
      Rational far = (*a + *b + len) / 2;
      if (!p.is_node() && p.edge == e) {
        // Points of its own edge are reached directly or around through the
        // far end.
        const Rational& uv = *dist_[edges_[e].u][edges_[e].v];
        Rational around_left = len - p.s + uv, around_right = p.s + uv;
        far = std::max(std::min(p.s, (p.s + around_left) / 2),
                       std::min(len - p.s, (len - p.s + around_right) / 2));
      }
      worst = std::max(worst, far);
    }
    for (NodeId v = 0; v < nodes_; ++v)
      if (auto d = distance(p, GraphPoint::at_node(v))) worst = std::max(worst, *d);
    return worst;
  }

  Rational total_length() const
  {
    Rational out(0);
    for (const Edge& e : edges_) out += e.length;
    return out;
  }

  /// Nodes adjacent through edges, with the edge ids.
  std::vector<std::pair<NodeId, EdgeId>> neighbors(NodeId v) const
  {
    std::vector<std::pair<NodeId, EdgeId>> out;
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      if (edges_[e].u == v) out.emplace_back(edges_[e].v, e);
      else if (edges_[e].v == v) out.emplace_back(edges_[e].u, e);
    }
    return out;
  }

private:
  struct Exit {
    NodeId node;
    Rational cost;
  };

  /// Ways out of p to graph nodes, with the distance travelled.
  int exits(const GraphPoint& p, Exit* out) const
  {
    if (p.is_node()) {
      out[0] = {p.node, Rational(0)};
      return 1;
    }
    const Edge& e = edges_.at(p.edge);
    out[0] = {e.u, p.s};
    out[1] = {e.v, e.length - p.s};
    return 2;
  }

  void all_pairs()
  {
    dist_.assign(nodes_, std::vector<std::optional<Rational>>(nodes_));
    for (NodeId v = 0; v < nodes_; ++v) dist_[v][v] = Rational(0);
    for (const Edge& e : edges_) {
      if (!dist_[e.u][e.v] || e.length < *dist_[e.u][e.v]) dist_[e.u][e.v] = dist_[e.v][e.u] = e.length;
    }
    for (NodeId k = 0; k < nodes_; ++k)
      for (NodeId i = 0; i < nodes_; ++i) {
        if (!dist_[i][k]) continue;
        for (NodeId j = 0; j < nodes_; ++j) {
          if (!dist_[k][j]) continue;
          Rational via = *dist_[i][k] + *dist_[k][j];
          if (!dist_[i][j] || via < *dist_[i][j]) dist_[i][j] = via;
        }
      }
  }

  std::size_t nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::optional<Rational>>> dist_;
};

struct OpenBall {
  GraphPoint center;
  Rational radius;
};

struct Cover {
  std::vector<OpenBall> opens;

  /// Upper bound on the diameter of every open.
  Rational mesh_bound() const
  {
    Rational out(0);
    for (const auto& b : opens) out = std::max(out, 2 * b.radius);
    return out;
  }
};

struct NerveGraph {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges; ///< i < j, sorted
};

/// Open balls of a geodesic space meet exactly when their centers are closer
/// than the sum of the radii.
inline NerveGraph nerve(const MetricGraph& g, const Cover& c)
{
  NerveGraph out;
  out.vertices = c.opens.size();
  for (const auto& b : c.opens)
    if (b.radius <= 0) throw PreconditionError("cover opens must be nonempty");
  for (std::size_t i = 0; i < c.opens.size(); ++i)
    for (std::size_t j = i + 1; j < c.opens.size(); ++j) {
      auto d = g.distance(c.opens[i].center, c.opens[j].center);
      if (d && *d < c.opens[i].radius + c.opens[j].radius) out.edges.emplace_back(i, j);
    }
  return out;
}

/// Some cycle of the nerve as a vertex sequence, if there is one.
inline std::optional<std::vector<std::size_t>> find_cycle(const NerveGraph& n)
{
  std::vector<std::vector<std::size_t>> adj(n.vertices);
  for (const auto& [a, b] : n.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::size_t> parent(n.vertices, n.vertices);
  std::vector<char> seen(n.vertices, 0);
  for (std::size_t root = 0; root < n.vertices; ++root) {
    if (seen[root]) continue;
    std::vector<std::size_t> stack{root};
    seen[root] = 1;
    parent[root] = root;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u : adj[v]) {
        if (u == parent[v]) continue;
        if (!seen[u]) {
          seen[u] = 1;
          parent[u] = v;
          stack.push_back(u);
          continue;
        }
        // Non-tree edge v-u closes a cycle through their common ancestor.
        std::vector<std::size_t> up_v{v}, up_u{u};
        while (parent[up_v.back()] != up_v.back()) up_v.push_back(parent[up_v.back()]);
        while (parent[up_u.back()] != up_u.back()) up_u.push_back(parent[up_u.back()]);
        while (up_v.size() > 1 && up_u.size() > 1 && up_v[up_v.size() - 2] == up_u[up_u.size() - 2]) {
          up_v.pop_back();
          up_u.pop_back();
        }
        std::vector<std::size_t> cycle(up_v.begin(), up_v.end());
        for (std::size_t i = up_u.size() - 1; i-- > 0;) cycle.push_back(up_u[i]);
        return cycle;
      }
    }
  }
  return std::nullopt;
}

inline bool is_tree_nerve(const NerveGraph& n)
{
  if (n.vertices == 0 || n.edges.size() != n.vertices - 1) return false;
  std::vector<std::size_t> root(n.vertices);
  for (std::size_t i = 0; i < n.vertices; ++i) root[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return root[x] == x ? x : root[x] = find(root[x]); };
  std::size_t parts = n.vertices;
  for (const auto& [a, b] : n.edges) {
    std::size_t ra = find(a), rb = find(b);
    if (ra == rb) return false;
    root[ra] = rb;
    --parts;
  }
  return parts == 1;
}

/// Balls at the nodes and at equally spaced points of every edge, at least
/// two pieces per edge and pieces no longer than spacing; each radius is the
/// shortest piece at its center. The nerve is then the subdivided graph.
inline Cover canonical_cover(const MetricGraph& g, const Rational& spacing)
{
  if (spacing <= 0) throw PreconditionError("spacing must be positive");
  Cover c;
  std::vector<std::optional<Rational>> node_radius(g.node_count());
  auto lower = [](std::optional<Rational>& slot, const Rational& v) {
    if (!slot || v < *slot) slot = v;
  };
  std::vector<std::pair<Rational, std::size_t>> piece(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Rational& len = g.edge(e).length;
    Rational ratio = len / spacing;
    std::size_t m = static_cast<std::size_t>(ceil_int(ratio));
    m = std::max<std::size_t>(m, 2);
    piece[e] = {len / Rational(static_cast<long>(m)), m};
    lower(node_radius[g.edge(e).u], piece[e].first);
    lower(node_radius[g.edge(e).v], piece[e].first);
  }
  for (NodeId v = 0; v < g.node_count(); ++v)
    c.opens.push_back({GraphPoint::at_node(v), node_radius[v] ? *node_radius[v] : spacing});
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    for (std::size_t i = 1; i < piece[e].second; ++i)
      c.opens.push_back({GraphPoint::on_edge(e, piece[e].first * Rational(static_cast<long>(i))), piece[e].first});
  return c;
}

/// Every point of the graph lies in some open.
inline bool covers(const MetricGraph& g, const Cover& c)
{
  struct Part {
    Rational lo, hi;
    bool lo_closed, hi_closed;
  };
  for (NodeId v = 0; v < g.node_count(); ++v) {
    bool in = false;
    for (const auto& b : c.opens) {
      auto d = g.distance(b.center, GraphPoint::at_node(v));
      in = in || (d && *d < b.radius);
    }
    if (!in) return false;
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Rational& len = g.edge(e).length;
    std::vector<Part> parts;
    for (const auto& b : c.opens) {
      auto a = g.distance(b.center, GraphPoint::at_node(g.edge(e).u));
      auto z = g.distance(b.center, GraphPoint::at_node(g.edge(e).v));
      if (!a) continue;
      if (*a < b.radius) parts.push_back({Rational(0), std::min(len, b.radius - *a), true, b.radius - *a > len});
      if (*z < b.radius) parts.push_back({std::max(Rational(0), len - (b.radius - *z)), len, b.radius - *z > len, true});
      if (!b.center.is_node() && b.center.edge == e)
        parts.push_back({std::max(Rational(0), b.center.s - b.radius), std::min(len, b.center.s + b.radius),
                         b.center.s - b.radius < 0, b.center.s + b.radius > len});
    }
    std::sort(parts.begin(), parts.end(), [](const Part& x, const Part& y) {
      return x.lo < y.lo || (x.lo == y.lo && x.lo_closed && !y.lo_closed);
    });
    // Sweep: reach is covered up to (and including when closed).
    Rational reach(0);
    bool reach_closed = true; // node u is covered
    for (const Part& p : parts) {
      bool gap = p.lo > reach || (p.lo == reach && !reach_closed && !p.lo_closed);
      if (gap) return false;
      if (p.hi > reach || (p.hi == reach && p.hi_closed)) {
        reach = p.hi;
        reach_closed = p.hi_closed;
      }
    }
    if (reach < len) return false;
  }
  return true;
}

struct TreeLikeResult {
  bool tree_like = false;
  Cover cover;
  NerveGraph nerve;
  std::vector<NodeId> obstruction; ///< graph nodes along a nerve cycle
};

namespace detail {

/// A nerve cycle read back as the graph nodes it passes, rotated to start at
/// the smallest and turned towards its smaller neighbour.
inline std::vector<NodeId> cycle_nodes(const Cover& c, const std::vector<std::size_t>& cycle)
{
  std::vector<NodeId> out;
  for (std::size_t i : cycle)
    if (c.opens[i].center.is_node() && (out.empty() || out.back() != c.opens[i].center.node))
      out.push_back(c.opens[i].center.node);
  if (out.size() < 2) return out;
  auto low = std::min_element(out.begin(), out.end());
  std::rotate(out.begin(), low, out.end());
  if (out.size() > 2 && out.back() < out[1]) std::reverse(out.begin() + 1, out.end());
  return out;
}

} // namespace detail

/// One-sided test for fine covers with a tree nerve: a single ball when the
/// space is that small, otherwise the canonical cover at spacing eps/4.
inline TreeLikeResult tree_like_check(const MetricGraph& g, const Rational& eps)
{
  if (eps <= 0) throw PreconditionError("epsilon must be positive");
  if (!g.connected()) throw PreconditionError("space is not connected");
  TreeLikeResult out;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    Rational ecc = g.eccentricity(GraphPoint::at_node(v));
    if (2 * ecc < eps) {
      Rational radius = ecc + (eps / 2 - ecc) / 2;
      out.cover.opens.push_back({GraphPoint::at_node(v), radius});
      out.nerve = nerve(g, out.cover);
      out.tree_like = true;
      return out;
    }
  }
  out.cover = canonical_cover(g, eps / 4);
  out.nerve = nerve(g, out.cover);
  out.tree_like = is_tree_nerve(out.nerve);
  if (!out.tree_like)
    if (auto cyc = find_cycle(out.nerve)) out.obstruction = detail::cycle_nodes(out.cover, *cyc);
  return out;
}

/// Subspace of a metric graph made of closed pieces of edges and nodes.
struct GraphSubspace {
  struct Piece {
    EdgeId edge;
    Rational lo, hi; ///< arclength from the edge start
  };
  std::vector<char> nodes;
  std::vector<std::vector<Piece>> pieces; ///< per edge, sorted and disjoint

  explicit GraphSubspace(const MetricGraph& g) : nodes(g.node_count(), 0), pieces(g.edge_count()) {}

  bool contains(const MetricGraph& g, const GraphPoint& p) const
  {
    if (p.is_node()) return nodes[p.node] != 0;
    if (p.s == 0) return nodes[g.edge(p.edge).u] != 0;
    if (p.s == g.edge(p.edge).length) return nodes[g.edge(p.edge).v] != 0;
    for (const auto& pc : pieces[p.edge])
      if (pc.lo <= p.s && p.s <= pc.hi) return true;
    return false;
  }

  void add_point(const MetricGraph& g, const GraphPoint& p)
  {
    if (p.is_node()) nodes[p.node] = 1;
    else add_piece(g, p.edge, p.s, p.s);
  }

  void add_piece(const MetricGraph& g, EdgeId e, Rational lo, Rational hi)
  {
    if (lo > hi) std::swap(lo, hi);
    const Rational& len = g.edge(e).length;
    if (lo == 0) nodes[g.edge(e).u] = 1;
    if (hi == len) nodes[g.edge(e).v] = 1;
    if ((lo == 0 && hi == 0) || (lo == len && hi == len)) return;
    auto& list = pieces[e];
    list.push_back({e, lo, hi});
    std::sort(list.begin(), list.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    std::vector<Piece> merged;
    for (const auto& pc : list) {
      if (!merged.empty() && pc.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, pc.hi);
      else merged.push_back(pc);
    }
    list = std::move(merged);
  }

  /// Distance from a graph node to the subspace.
  std::optional<Rational> node_gap(const MetricGraph& g, NodeId v) const
  {
    std::optional<Rational> best;
    auto offer = [&](const std::optional<Rational>& d) {
      if (d && (!best || *d < *best)) best = d;
    };
    for (NodeId u = 0; u < nodes.size(); ++u)
      if (nodes[u]) offer(g.node_distance(v, u));
    for (const auto& list : pieces)
      for (const auto& pc : list) {
        offer(g.distance(GraphPoint::at_node(v), GraphPoint::on_edge(pc.edge, pc.lo)));
        offer(g.distance(GraphPoint::at_node(v), GraphPoint::on_edge(pc.edge, pc.hi)));
      }
    return best;
  }

  /// Connected and without cycles.
  bool is_tree(const MetricGraph& g) const
  {
    // Vertices: subspace nodes and piece ends inside edges.
    std::vector<std::pair<std::size_t, std::size_t>> links;
    std::size_t count = g.node_count();
    std::size_t used = 0;
    for (char c : nodes) used += c != 0;
    for (EdgeId e = 0; e < pieces.size(); ++e) {
      const Rational& len = g.edge(e).length;
      for (const auto& pc : pieces[e]) {
        if (pc.lo == pc.hi) {
          ++count;
          ++used;
          continue;
        }
        std::size_t a = pc.lo == 0 ? g.edge(e).u : (++used, count++);
        std::size_t b = pc.hi == len ? g.edge(e).v : (++used, count++);
        links.emplace_back(a, b);
      }
    }
    if (used == 0) return false;
    std::vector<std::size_t> root(count);
    for (std::size_t i = 0; i < count; ++i) root[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) { return root[x] == x ? x : root[x] = find(root[x]); };
    std::size_t parts = used;
    for (const auto& [a, b] : links) {
      std::size_t ra = find(a), rb = find(b);
      if (ra == rb) return false;
      root[ra] = rb;
      --parts;
    }
    return parts == 1;
  }
};

/// Largest distance from a point of the graph to the subspace.
inline Rational directed_gap(const MetricGraph& g, const GraphSubspace& t)
{
  std::vector<Rational> at(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto d = t.node_gap(g, v);
    if (!d) throw PreconditionError("subspace misses a component");
    at[v] = *d;
  }
  Rational worst(0);
  for (NodeId v = 0; v < g.node_count(); ++v) worst = std::max(worst, at[v]);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Rational& len = g.edge(e).length;
    // Gaps between pieces; in each the distance is min(left + s, right - s).
    std::vector<std::pair<Rational, Rational>> cuts; // [start, end] of covered stretches
    for (const auto& pc : t.pieces[e]) cuts.emplace_back(pc.lo, pc.hi);
    Rational pos(0);
    std::optional<Rational> left = at[g.edge(e).u]; // cost at pos
    auto span = [&](const Rational& l, const Rational& r, const Rational& cl, const Rational& cr) {
      // f(s) = min(cl + (s - l), cr + (r - s)) on [l, r]
      Rational top = (cl + cr + (r - l)) / 2;
      worst = std::max(worst, std::min({top, cl + (r - l), cr + (r - l)}));
    };
    for (const auto& [lo, hi] : cuts) {
      if (lo > pos) span(pos, lo, *left, Rational(0));
      pos = hi;
      left = Rational(0);
    }
    if (pos < len) span(pos, len, *left, at[g.edge(e).v]);
  }
  return worst;
}

/// Tree inside the graph within eps of it in the Hausdorff metric: a net of
/// spacing at most eps/3, joined to its first point by shortest paths, each
/// path cut where it first meets the tree built so far.
inline GraphSubspace tree_approximation(const MetricGraph& g, const Rational& eps)
{
  if (eps <= 0) throw PreconditionError("epsilon must be positive");
  if (!g.connected()) throw PreconditionError("space is not connected");
  std::vector<GraphPoint> net;
  for (NodeId v = 0; v < g.node_count(); ++v) net.push_back(GraphPoint::at_node(v));
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Rational& len = g.edge(e).length;
    long m = static_cast<long>(ceil_int(Rational(3 * len / eps)));
    for (long i = 1; i < m; ++i) net.push_back(GraphPoint::on_edge(e, len * Rational(i, m)));
  }

  GraphSubspace t(g);
  t.add_point(g, net.front());
  const NodeId anchor = net.front().node;
  for (std::size_t j = 1; j < net.size(); ++j) {
    const GraphPoint& p = net[j];
    if (t.contains(g, p)) continue;
    // Shortest path from p to the anchor, walked from p.
    GraphPoint cur = p;
    NodeId at = GraphPoint::kNoNode;
    if (!p.is_node()) {
      const auto& ed = g.edge(p.edge);
      Rational via_u = p.s + *g.node_distance(ed.u, anchor);
      Rational via_v = ed.length - p.s + *g.node_distance(ed.v, anchor);
      bool to_u = via_u <= via_v;
      // Walk along the edge towards the chosen end, stopping at the tree.
      std::optional<Rational> stop;
      for (const auto& pc : t.pieces[p.edge]) {
        if (to_u && pc.hi <= p.s && (!stop || pc.hi > *stop)) stop = pc.hi;
        if (!to_u && pc.lo >= p.s && (!stop || pc.lo < *stop)) stop = pc.lo;
      }
      Rational end = to_u ? Rational(0) : ed.length;
      if (stop) {
        t.add_piece(g, p.edge, p.s, *stop);
        continue;
      }
      bool end_in = t.nodes[to_u ? ed.u : ed.v] != 0;
      t.add_piece(g, p.edge, p.s, end);
      if (end_in) continue;
      at = to_u ? ed.u : ed.v;
    } else {
      at = p.node;
      t.add_point(g, cur);
    }
    // Node walk: step to a neighbour on a shortest path to the anchor.
    while (at != anchor) {
      NodeId next = GraphPoint::kNoNode;
      EdgeId via = 0;
      for (const auto& [u, e] : g.neighbors(at))
        if (*g.node_distance(at, anchor) == g.edge(e).length + *g.node_distance(u, anchor)) {
          next = u;
          via = e;
          break;
        }
      const auto& ed = g.edge(via);
      bool forward = ed.u == at; // walking from s = 0 towards s = len
      std::optional<Rational> stop;
      for (const auto& pc : t.pieces[via]) {
        Rational near = forward ? pc.lo : pc.hi;
        if (!stop || (forward ? near < *stop : near > *stop)) stop = near;
      }
      if (stop) {
        t.add_piece(g, via, forward ? Rational(0) : ed.length, *stop);
        break;
      }
      bool next_in = t.nodes[next] != 0;
      t.add_piece(g, via, Rational(0), ed.length);
      if (next_in) break;
      at = next;
    }
  }
  return t;
}

} // namespace dendrolab
