#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dendrolab/error.hpp"
#include "dendrolab/rational.hpp"

namespace dendrolab {

using NodeId = std::size_t;
using EdgeId = std::size_t;

/// Target branch order of a node: a positive integer or omega.
class Order {
public:
  constexpr Order() = default;
  constexpr explicit Order(int value) : value_(value) {}
  static constexpr Order omega() { return Order(kOmega); }

  constexpr bool is_omega() const { return value_ == kOmega; }
  constexpr int value() const { return value_; }
  constexpr bool is_branching() const { return is_omega() || value_ >= 3; }

  friend constexpr bool operator==(Order, Order) = default;
  friend constexpr auto operator<=>(Order, Order) = default;

  std::string str() const { return is_omega() ? "omega" : std::to_string(value_); }

private:
  static constexpr int kOmega = std::numeric_limits<int>::max();
  int value_ = 1;
};

/// A location on a dendrite. Node form has u == v and t == 0; edge form has
/// u < v and t in (0,1) measured from u.
class Point {
public:
  Point() = default;

  static Point node(NodeId id) { return Point(id, id, Rational(0)); }

  static Point on_edge(NodeId a, NodeId b, Rational t)
  {
    if (a == b) throw PreconditionError("edge point needs two distinct nodes");
    if (t < 0 || t > 1) throw PreconditionError("edge parameter outside [0,1]");
    if (a > b) {
      std::swap(a, b);
      t = 1 - t;
    }
    if (t == 0) return node(a);
    if (t == 1) return node(b);
    return Point(a, b, std::move(t));
  }

  bool is_node() const { return u_ == v_; }
  NodeId node_id() const { return u_; }
  NodeId u() const { return u_; }
  NodeId v() const { return v_; }
  const Rational& t() const { return t_; }

  friend bool operator==(const Point& a, const Point& b)
  {
    return a.u_ == b.u_ && a.v_ == b.v_ && a.t_ == b.t_;
  }
  friend bool operator<(const Point& a, const Point& b)
  {
    if (a.u_ != b.u_) return a.u_ < b.u_;
    if (a.v_ != b.v_) return a.v_ < b.v_;
    return a.t_ < b.t_;
  }

private:
  Point(NodeId u, NodeId v, Rational t) : u_(u), v_(v), t_(std::move(t)) {}

  NodeId u_ = 0;
  NodeId v_ = 0;
  Rational t_{0};
};

/// Directed piece of a path inside one edge, from parameter t0 to t1.
struct Segment {
  EdgeId edge;
  Rational t0;
  Rational t1;
};

/// Finite metric tree with target orders. Immutable after construction.
class Dendrite {
public:
  struct Edge {
    NodeId u;
    NodeId v;
    Rational length;
  };
  struct Incidence {
    NodeId node;
    EdgeId edge;
  };

  Dendrite(std::vector<Order> orders, std::vector<Edge> edges,
           std::optional<int> depth_tag = std::nullopt)
      : orders_(std::move(orders)), edges_(std::move(edges)), depth_tag_(depth_tag)
  {
    const std::size_t n = orders_.size();
    if (n == 0) throw PreconditionError("dendrite needs at least one node");
    if (edges_.size() + 1 != n) throw PreconditionError("a tree on n nodes has n-1 edges");
    adjacency_.assign(n, {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      Edge& ed = edges_[e];
      if (ed.u >= n || ed.v >= n) throw PreconditionError("edge endpoint out of range");
      if (ed.u == ed.v) throw PreconditionError("self loop");
      if (ed.length <= 0) throw PreconditionError("edge lengths must be positive");
      if (ed.u > ed.v) std::swap(ed.u, ed.v);
      if (!edge_index_.emplace(key(ed.u, ed.v), e).second)
        throw PreconditionError("duplicate edge");
      adjacency_[ed.u].push_back({ed.v, e});
      adjacency_[ed.v].push_back({ed.u, e});
    }
    for (NodeId v = 0; v < n; ++v) {
      if (orders_[v].value() < 1) throw PreconditionError("target orders are >= 1");
      if (!orders_[v].is_omega() && adjacency_[v].size() > static_cast<std::size_t>(orders_[v].value()))
        throw PreconditionError("node " + std::to_string(v) + " has degree above its target order");
    }
    root_tree();
  }

  std::size_t node_count() const { return orders_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  Order order(NodeId v) const { return orders_.at(v); }
  const std::vector<Order>& orders() const { return orders_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Incidence>& neighbors(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }
  std::optional<int> depth_tag() const { return depth_tag_; }

  bool is_branch_node(NodeId v) const { return orders_.at(v).is_branching(); }
  bool is_leaf(NodeId v) const { return adjacency_.at(v).size() <= 1; }

  std::optional<EdgeId> find_edge(NodeId a, NodeId b) const
  {
    if (a > b) std::swap(a, b);
    auto it = edge_index_.find(key(a, b));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  EdgeId edge_of(const Point& p) const
  {
    auto e = find_edge(p.u(), p.v());
    if (!e) throw PreconditionError("point lies on a non-existent edge");
    return *e;
  }

  void check_point(const Point& p) const
  {
    if (p.u() >= node_count() || p.v() >= node_count())
      throw PreconditionError("point refers to a node out of range");
    if (!p.is_node()) (void)edge_of(p);
  }

  /// Point at parameter t on edge e (t measured from edge(e).u).
  Point edge_point(EdgeId e, const Rational& t) const
  {
    const Edge& ed = edges_.at(e);
    return Point::on_edge(ed.u, ed.v, t);
  }

  Rational node_distance(NodeId a, NodeId b) const
  {
    NodeId l = lca(a, b);
    return root_dist_[a] + root_dist_[b] - 2 * root_dist_[l];
  }

  Rational distance(const Point& p, const Point& q) const
  {
    check_point(p);
    check_point(q);
    if (p.is_node() && q.is_node()) return node_distance(p.u(), q.u());
    if (!p.is_node() && !q.is_node() && p.u() == q.u() && p.v() == q.v())
      return abs(p.t() - q.t()) * edges_[edge_of(p)].length;
    if (p.is_node()) return node_point_distance(p.u(), q);
    const Rational& len = edges_[edge_of(p)].length;
    Rational via_u = p.t() * len + node_point_distance(p.u(), q);
    Rational via_v = (1 - p.t()) * len + node_point_distance(p.v(), q);
    return std::min(via_u, via_v);
  }

  /// True iff z lies on the arc from x to y.
  bool between(const Point& x, const Point& y, const Point& z) const
  {
    return distance(x, z) + distance(z, y) == distance(x, y);
  }

  /// Node sequence of the unique path a..b, both included.
  std::vector<NodeId> node_path(NodeId a, NodeId b) const
  {
    NodeId l = lca(a, b);
    std::vector<NodeId> up;
    for (NodeId x = a; x != l; x = parent_[x]) up.push_back(x);
    up.push_back(l);
    std::vector<NodeId> down;
    for (NodeId x = b; x != l; x = parent_[x]) down.push_back(x);
    up.insert(up.end(), down.rbegin(), down.rend());
    return up;
  }

  /// The arc from p to q as directed edge pieces. Empty when p == q.
  std::vector<Segment> path(const Point& p, const Point& q) const
  {
    check_point(p);
    check_point(q);
    std::vector<Segment> out;
    if (p == q) return out;
    if (auto e = shared_closed_edge(p, q)) {
      out.push_back({*e, param_on(*e, p), param_on(*e, q)});
      return out;
    }
    NodeId exit = p.is_node() ? p.u() : nearer_end(p, q);
    NodeId entry = q.is_node() ? q.u() : nearer_end(q, p);
    if (!p.is_node()) {
      EdgeId e = edge_of(p);
      out.push_back({e, p.t(), Rational(exit == edges_[e].u ? 0 : 1)});
    }
    std::vector<NodeId> nodes = node_path(exit, entry);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      EdgeId e = *find_edge(nodes[i], nodes[i + 1]);
      bool forward = edges_[e].u == nodes[i];
      out.push_back({e, Rational(forward ? 0 : 1), Rational(forward ? 1 : 0)});
    }
    if (!q.is_node()) {
      EdgeId e = edge_of(q);
      out.push_back({e, Rational(entry == edges_[e].u ? 0 : 1), q.t()});
    }
    return out;
  }

  Rational segment_length(const Segment& s) const
  {
    return abs(s.t1 - s.t0) * edges_.at(s.edge).length;
  }

  /// Point at arclength s from p along the arc p..q (s clipped to [0, d(p,q)]).
  Point point_along(const Point& p, const Point& q, Rational s) const
  {
    if (s <= 0) return p;
    for (const Segment& seg : path(p, q)) {
      Rational len = segment_length(seg);
      if (s <= len) {
        const Rational& L = edges_[seg.edge].length;
        Rational t = seg.t1 > seg.t0 ? Rational(seg.t0 + s / L) : Rational(seg.t0 - s / L);
        return edge_point(seg.edge, t);
      }
      s -= len;
    }
    return q;
  }

  /// Largest diameter of a closed vertex star.
  Rational mesh() const
  {
    Rational best(0);
    for (NodeId v = 0; v < node_count(); ++v) {
      Rational first(0), second(0);
      for (const Incidence& inc : adjacency_[v]) {
        const Rational& len = edges_[inc.edge].length;
        if (len > first) {
          second = first;
          first = len;
        } else if (len > second) {
          second = len;
        }
      }
      best = std::max(best, Rational(first + second));
    }
    return best;
  }

  Rational max_edge_length() const
  {
    Rational best(0);
    for (const Edge& e : edges_) best = std::max(best, e.length);
    return best;
  }

  friend bool operator==(const Dendrite& a, const Dendrite& b)
  {
    if (a.orders_ != b.orders_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      const Edge& x = a.edges_[i];
      const Edge& y = b.edges_[i];
      if (x.u != y.u || x.v != y.v || x.length != y.length) return false;
    }
    return a.depth_tag_ == b.depth_tag_;
  }

private:
  static std::uint64_t key(NodeId a, NodeId b)
  {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }

  void root_tree()
  {
    const std::size_t n = node_count();
    parent_.assign(n, 0);
    depth_.assign(n, 0);
    root_dist_.assign(n, Rational(0));
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      for (const Incidence& inc : adjacency_[x]) {
        if (seen[inc.node]) continue;
        seen[inc.node] = 1;
        ++visited;
        parent_[inc.node] = x;
        depth_[inc.node] = depth_[x] + 1;
        root_dist_[inc.node] = root_dist_[x] + edges_[inc.edge].length;
        stack.push_back(inc.node);
      }
    }
    if (visited != n) throw PreconditionError("edge graph is not connected");
  }

  NodeId lca(NodeId a, NodeId b) const
  {
    while (depth_[a] > depth_[b]) a = parent_[a];
    while (depth_[b] > depth_[a]) b = parent_[b];
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    return a;
  }

  Rational node_point_distance(NodeId w, const Point& q) const
  {
    if (q.is_node()) return node_distance(w, q.u());
    const Rational& len = edges_[edge_of(q)].length;
    Rational via_u = node_distance(w, q.u()) + q.t() * len;
    Rational via_v = node_distance(w, q.v()) + (1 - q.t()) * len;
    return std::min(via_u, via_v);
  }

  /// Endpoint of p's edge through which the arc from p to q leaves.
  NodeId nearer_end(const Point& p, const Point& q) const
  {
    return node_point_distance(p.u(), q) < node_point_distance(p.v(), q) ? p.u() : p.v();
  }

  /// Edge whose closed segment contains both points, when one is interior.
  std::optional<EdgeId> shared_closed_edge(const Point& p, const Point& q) const
  {
    auto on_closed = [](const Point& edge_pt, const Point& other) {
      if (other.is_node()) return other.u() == edge_pt.u() || other.u() == edge_pt.v();
      return other.u() == edge_pt.u() && other.v() == edge_pt.v();
    };
    if (!p.is_node() && on_closed(p, q)) return edge_of(p);
    if (!q.is_node() && on_closed(q, p)) return edge_of(q);
    return std::nullopt;
  }

  Rational param_on(EdgeId e, const Point& p) const
  {
    if (!p.is_node()) return p.t();
    return Rational(p.u() == edges_[e].u ? 0 : 1);
  }

  std::vector<Order> orders_;
  std::vector<Edge> edges_;
  std::optional<int> depth_tag_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::unordered_map<std::uint64_t, EdgeId> edge_index_;
  std::vector<NodeId> parent_;
  std::vector<std::size_t> depth_;
  std::vector<Rational> root_dist_;
};

} // namespace dendrolab
