#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "dendrolab/subdendrite.hpp"

namespace dendrolab {

struct RefinementSchedule {
  std::vector<Order> orders;
  int count = 1;
  Rational ratio{1, 2};
  int depth = 0;

  void validate() const
  {
    if (orders.empty()) throw PreconditionError("schedule needs at least one order");
    for (Order m : orders)
      if (!m.is_omega() && m.value() < 3) throw PreconditionError("schedule orders must be >= 3 or omega");
    if (count < 1) throw PreconditionError("insertion count must be >= 1");
    if (ratio <= 0 || ratio >= 1) throw PreconditionError("sprout ratio must lie in (0,1)");
    if (depth < 0) throw PreconditionError("depth must be >= 0");
  }
};

/// Iterated refinement of the unit arc. Each level puts count*|M| new
/// nodes on every existing edge, cycling through M, and hangs sprouts off
/// each new node; sprouts only get subdivided from the next level on.
inline Dendrite build_wm(const RefinementSchedule& schedule)
{
  schedule.validate();
  std::vector<Order> orders{Order(1), Order(1)};
  std::vector<Dendrite::Edge> edges{{0, 1, Rational(1)}};
  const int k = schedule.count * static_cast<int>(schedule.orders.size());

  for (int level = 1; level <= schedule.depth; ++level) {
    std::vector<Dendrite::Edge> next;
    std::vector<Dendrite::Edge> sprouts;
    for (const auto& old : edges) {
      Rational piece = old.length / (k + 1);
      NodeId prev = old.u;
      std::vector<NodeId> inserted;
      for (int i = 0; i < k; ++i) {
        NodeId id = orders.size();
        orders.push_back(schedule.orders[static_cast<std::size_t>(i) % schedule.orders.size()]);
        next.push_back({prev, id, piece});
        inserted.push_back(id);
        prev = id;
      }
      next.push_back({prev, old.v, piece});
      for (NodeId id : inserted) {
        Order m = orders[id];
        int count = m.is_omega() ? level + 1 : m.value() - 2;
        for (int s = 0; s < count; ++s) {
          NodeId leaf = orders.size();
          orders.push_back(Order(1));
          sprouts.push_back({id, leaf, old.length * schedule.ratio});
        }
      }
    }
    next.insert(next.end(), sprouts.begin(), sprouts.end());
    edges = std::move(next);
  }
  return Dendrite(std::move(orders), std::move(edges), schedule.depth);
}

/// Carries a point of a tree into a refinement of it: a tree that keeps the
/// old node ids and realizes every old edge as a path of the same length.
inline Point lift_point(const Dendrite& from, const Dendrite& to, const Point& p)
{
  from.check_point(p);
  auto check = [&](NodeId v) {
    if (v >= to.node_count()) throw PreconditionError("target is not a refinement: node " + std::to_string(v) + " missing");
  };
  check(p.u());
  check(p.v());
  if (p.is_node()) return p;
  const auto& ed = from.edge(from.edge_of(p));
  if (to.node_distance(ed.u, ed.v) != ed.length) throw PreconditionError("target is not a refinement: edge lengths differ");
  return to.point_along(Point::node(ed.u), Point::node(ed.v), p.t() * ed.length);
}

/// The same point set inside a refinement.
inline Subdendrite lift(const Subdendrite& k, const Subdendrite::Space& to)
{
  std::vector<Point> pts;
  for (const Point& x : k.extremes()) pts.push_back(lift_point(k.ambient(), *to, x));
  return Subdendrite(to, std::span<const Point>(pts));
}

/// Finite list of pairs (a_n, b_n) defining the set-valued bonding map.
struct BondingFunction {
  std::vector<std::pair<Rational, Rational>> pairs;

  void validate() const
  {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [a, b] = pairs[i];
      if (!(a > 0 && a < b && b <= 1)) throw PreconditionError("pairs need 0 < a < b <= 1");
      for (std::size_t j = 0; j < i; ++j)
        if (pairs[j].first == a) throw PreconditionError("the a_n must be distinct");
    }
  }

  /// Right end of the segment attached at a_n in the picture for parameter t.
  Rational reach(std::size_t n, const Rational& t) const
  {
    const auto& [a, b] = pairs[n];
    return a + (t - a) * (b - a) / (1 - a);
  }

  bool is_branch_value(const Rational& c, const Rational& t) const
  {
    return c < t && std::any_of(pairs.begin(), pairs.end(), [&](const auto& p) { return p.first == c; });
  }
};

/// Stage tree together with where every node sits in the inverse system.
struct StageTree {
  struct NodeInfo {
    Rational coord;                 ///< last coordinate of the sequence
    std::optional<std::size_t> pair; ///< segment it lies on; empty on the diagonal
    NodeId base = 0;                ///< node the segment hangs from (itself on the diagonal)
  };

  Dendrite tree;
  std::vector<NodeInfo> info;
};

inline StageTree inverse_limit_stage_detailed(const BondingFunction& f, const Rational& t, int k)
{
  f.validate();
  if (k < 1) throw PreconditionError("stage count must be >= 1");
  if (t <= 0 || t > 1) throw PreconditionError("t must lie in (0,1]");

  std::vector<Order> orders;
  std::vector<Dendrite::Edge> edges;
  std::vector<StageTree::NodeInfo> info;
  auto add_node = [&](Rational coord, std::optional<std::size_t> pair, NodeId base, bool tip) {
    NodeId id = orders.size();
    bool branches = f.is_branch_value(coord, t);
    orders.push_back(branches ? Order::omega() : Order(tip ? 1 : 2));
    info.push_back({std::move(coord), pair, pair ? base : id});
    return id;
  };

  // Stage 1: the diagonal [0, t], broken at every a_n < t.
  std::vector<Rational> marks{Rational(0), t};
  for (const auto& p : f.pairs)
    if (p.first < t) marks.push_back(p.first);
  std::sort(marks.begin(), marks.end());
  NodeId prev = 0;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    bool end = i == 0 || i + 1 == marks.size();
    NodeId id = add_node(marks[i], std::nullopt, 0, end);
    if (i > 0) edges.push_back({prev, id, marks[i] - marks[i - 1]});
    prev = id;
  }

  for (int stage = 2; stage <= k; ++stage) {
    const std::size_t existing = orders.size();
    for (NodeId x = 0; x < existing; ++x) {
      for (std::size_t n = 0; n < f.pairs.size(); ++n) {
        const Rational& a = f.pairs[n].first;
        if (info[x].coord != a || !(a < t)) continue;
        Rational c = f.reach(n, t);
        std::vector<Rational> cuts;
        for (const auto& p : f.pairs)
          if (p.first > a && p.first < c) cuts.push_back(p.first);
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(c);
        NodeId from = x;
        Rational from_coord = a;
        for (std::size_t i = 0; i < cuts.size(); ++i) {
          NodeId id = add_node(cuts[i], n, x, i + 1 == cuts.size());
          edges.push_back({from, id, cuts[i] - from_coord});
          from = id;
          from_coord = cuts[i];
        }
      }
    }
  }
  return StageTree{Dendrite(std::move(orders), std::move(edges)), std::move(info)};
}

inline Dendrite inverse_limit_stage(const BondingFunction& f, const Rational& t, int k)
{
  return inverse_limit_stage_detailed(f, t, k).tree;
}

/// Leaves of the stage tree that carry order omega: endpoints that branch
/// at later stages.
inline std::vector<Point> rational_branch_endpoints(const BondingFunction& f, const Rational& t, int k)
{
  Dendrite w = inverse_limit_stage(f, t, k);
  std::vector<Point> out;
  for (NodeId v = 0; v < w.node_count(); ++v)
    if (w.degree(v) == 1 && w.order(v).is_omega()) out.push_back(Point::node(v));
  return out;
}

/// The picture for parameter s inside the stage tree built at t = 1: the
/// diagonal up to s, and every segment from a_n < s up to its reach at s.
inline Region gamma_region(const StageTree& stage, const BondingFunction& f, const Rational& s)
{
  const Dendrite& w = stage.tree;
  Region r(w);
  auto cutoff = [&](const StageTree::NodeInfo& ni) {
    return ni.pair ? f.reach(*ni.pair, s) : s;
  };
  // Nodes are created base-first, so one forward pass settles membership.
  std::vector<char> in(w.node_count(), 0);
  for (NodeId v = 0; v < w.node_count(); ++v) {
    const auto& ni = stage.info[v];
    if (!ni.pair) {
      in[v] = ni.coord <= s;
      continue;
    }
    const Rational& a = f.pairs[*ni.pair].first;
    in[v] = in[ni.base] && a < s && ni.coord <= cutoff(ni);
  }
  for (NodeId v = 0; v < w.node_count(); ++v)
    if (in[v]) r.mark_node(v);
  for (EdgeId e = 0; e < w.edge_count(); ++e) {
    const auto& ed = w.edge(e);
    // Orient from the lower coordinate; both ends lie on the same segment.
    NodeId lo = ed.u, hi = ed.v;
    if (stage.info[lo].coord > stage.info[hi].coord) std::swap(lo, hi);
    const auto& far = stage.info[hi];
    if (!in[lo]) continue;
    if (far.pair && !(f.pairs[*far.pair].first < s)) continue;
    Rational cut = cutoff(far);
    const Rational& c0 = stage.info[lo].coord;
    if (cut <= c0) continue;
    Rational frac = std::min(Rational(1), (cut - c0) / (far.coord - c0));
    if (lo == ed.u) r.mark_piece(w, e, Rational(0), frac);
    else r.mark_piece(w, e, 1 - frac, Rational(1));
  }
  return r;
}

} // namespace dendrolab
