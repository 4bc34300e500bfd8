#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "dendrolab/hyperspace.hpp"

namespace dendrolab {

enum class MaximalityMode { Component, Fiber, Arc };

namespace detail {

inline void require_branch_candidate(const Subdendrite& k, const Point& b)
{
  if (!b.is_node()) throw PreconditionError("maximality is tested at ambient nodes");
  k.ambient().check_point(b);
  if (!k.contains(b)) throw PreconditionError("point is not in K");
}

/// K meets every component of W minus b.
inline bool maximal_by_components(const Subdendrite& k, NodeId b)
{
  const Dendrite& w = k.ambient();
  const Region& r = k.region();
  for (const auto& start : w.neighbors(b)) {
    bool met = r.interval(start.edge).has_value();
    std::vector<char> seen(w.node_count(), 0);
    seen[b] = 1;
    seen[start.node] = 1;
    std::vector<NodeId> stack{start.node};
    while (!met && !stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      if (r.has_node(x)) met = true;
      for (const auto& inc : w.neighbors(x)) {
        if (seen[inc.node]) continue;
        seen[inc.node] = 1;
        if (r.interval(inc.edge)) met = true;
        stack.push_back(inc.node);
      }
    }
    if (!met) return false;
  }
  return true;
}

/// The first point fiber over b is {b}. Every component of W \ K holds a node
/// or a midpoint of an uncovered edge piece, so these samples suffice.
inline bool maximal_by_fiber(const Subdendrite& k, NodeId b)
{
  const Dendrite& w = k.ambient();
  const Point base = Point::node(b);
  auto maps_to_base = [&](const Point& y) { return !(y == base) && k.first_point(y) == base; };
  for (NodeId v = 0; v < w.node_count(); ++v)
    if (maps_to_base(Point::node(v))) return false;
  for (EdgeId e = 0; e < w.edge_count(); ++e) {
    const auto& iv = k.region().interval(e);
    std::vector<Rational> mids;
    if (!iv) {
      mids.push_back(Rational(1, 2));
    } else {
      if (iv->lo > 0) mids.push_back(iv->lo / 2);
      if (iv->hi < 1) mids.push_back((iv->hi + 1) / 2);
    }
    for (const Rational& t : mids)
      if (maps_to_base(w.edge_point(e, t))) return false;
  }
  return true;
}

/// No arc from a node outside K to b meets K only in b.
inline bool maximal_by_arcs(const Subdendrite& k, NodeId b)
{
  const Dendrite& w = k.ambient();
  const Point base = Point::node(b);
  for (NodeId y = 0; y < w.node_count(); ++y) {
    if (k.region().has_node(y)) continue;
    Point from = Point::node(y);
    auto hit = intersect_arc(w, k.region(), from, base);
    Rational d = w.distance(from, base);
    if (hit && hit->lo == d && hit->hi == d) return false;
  }
  return true;
}

} // namespace detail

inline bool is_maximal_branch(const Subdendrite& k, const Point& b, MaximalityMode mode)
{
  detail::require_branch_candidate(k, b);
  switch (mode) {
  case MaximalityMode::Component: return detail::maximal_by_components(k, b.node_id());
  case MaximalityMode::Fiber: return detail::maximal_by_fiber(k, b.node_id());
  case MaximalityMode::Arc: return detail::maximal_by_arcs(k, b.node_id());
  }
  throw InternalError("unknown maximality mode");
}

/// Ambient branching nodes of K where K misses some direction.
inline std::vector<NodeId> maximality_failures(const Subdendrite& k)
{
  std::vector<NodeId> out;
  for (NodeId v : k.nodes())
    if (k.ambient().is_branch_node(v) && !detail::maximal_by_components(k, v)) out.push_back(v);
  return out;
}

inline bool is_full(const Subdendrite& k)
{
  if (k.is_degenerate()) return false;
  for (NodeId v : k.nodes()) {
    if (!k.ambient().is_branch_node(v)) continue;
    if (!detail::maximal_by_components(k, v)) return false;
    if (!k.order_of(Point::node(v)).is_branching()) return false;
  }
  return true;
}

/// Adds a short initial piece into every direction K misses at a
/// non-maximal ambient branching node.
inline Subdendrite perturb_to_full(const Subdendrite& k, const Rational& epsilon)
{
  if (epsilon <= 0) throw PreconditionError("epsilon must be positive");
  if (k.is_degenerate()) throw PreconditionError("perturbation needs a nondegenerate subcontinuum");
  const Dendrite& w = k.ambient();
  Region r = k.region();
  for (NodeId b : maximality_failures(k)) {
    for (const auto& inc : w.neighbors(b)) {
      const auto& ed = w.edge(inc.edge);
      const auto& iv = k.region().interval(inc.edge);
      bool leaves = iv && (ed.u == b ? iv->lo == 0 : iv->hi == 1);
      if (leaves) continue;
      Rational step = std::min(epsilon / 2, ed.length / 2) / ed.length;
      if (ed.u == b) r.mark_piece(w, inc.edge, Rational(0), step);
      else r.mark_piece(w, inc.edge, 1 - step, Rational(1));
    }
  }
  return Subdendrite::from_region(k.space(), std::move(r));
}

/// B(center, radius) intersected with outer lies inside inner. Without an
/// outer set the whole ambient is used.
inline bool ball_part_inside(const Ball& ball, const Subdendrite* outer, const Subdendrite& inner)
{
  const Dendrite& w = inner.ambient();
  const Region& in = inner.region();
  auto in_inner = [&](EdgeId e, const Rational& t) {
    if (t == 0) return in.has_node(w.edge(e).u);
    if (t == 1) return in.has_node(w.edge(e).v);
    const auto& iv = in.interval(e);
    return iv && iv->lo <= t && t <= iv->hi;
  };
  if ((!outer || outer->contains(ball.center)) && !inner.contains(ball.center)) return false;
  for (EdgeId e = 0; e < w.edge_count(); ++e) {
    for (auto part : detail::ball_on_edge(w, ball, e)) {
      if (outer) {
        auto cover = outer->region().covered_range(w, e, Rational(0), Rational(1));
        if (!cover) continue;
        const auto& iv = outer->region().interval(e);
        if (!iv) {
          // Only the flagged end nodes of the edge.
          for (const Rational& t : {cover->lo, cover->hi})
            if (part.contains(t) && !in_inner(e, t)) return false;
          continue;
        }
        // The outer set may also hold an end node its interval does not reach.
        for (const Rational& t : {Rational(0), Rational(1)})
          if (part.contains(t) && outer->region().covered_range(w, e, t, t) && !in_inner(e, t)) return false;
        if (iv->lo > part.lo) {
          part.lo = iv->lo;
          part.lo_closed = true;
        }
        if (iv->hi < part.hi) {
          part.hi = iv->hi;
          part.hi_closed = true;
        }
      }
      if (part.lo > part.hi || (part.lo == part.hi && !(part.lo_closed && part.hi_closed))) continue;
      if (part.lo == part.hi) {
        if (!in_inner(e, part.lo)) return false;
        continue;
      }
      const auto& inner_iv = in.interval(e);
      if (!inner_iv || part.lo < inner_iv->lo || part.hi > inner_iv->hi) return false;
    }
  }
  return true;
}

inline bool ball_inside(const Subdendrite& k, const Ball& ball) { return ball_part_inside(ball, nullptr, k); }

/// No open epsilon-ball around an ambient branching node fits inside K.
inline bool is_nowhere_dense(const Subdendrite& k, const Rational& epsilon)
{
  if (epsilon <= 0) throw PreconditionError("epsilon must be positive");
  const Dendrite& w = k.ambient();
  for (NodeId b = 0; b < w.node_count(); ++b) {
    if (!w.is_branch_node(b)) continue;
    if (ball_inside(k, Ball{Point::node(b), epsilon})) return false;
  }
  return true;
}

/// A component of W minus base: the one entered from base towards a node.
struct ComponentWitness {
  Point base;
  NodeId toward;

  bool contains(const Dendrite& w, const Point& p) const
  {
    if (p == base) return false;
    Point target = Point::node(toward);
    Point probe = w.point_along(base, target, w.distance(base, target) / 2);
    return w.between(base, p, probe) || w.between(base, probe, p);
  }
};

struct EndpointWitness {
  Point endpoint;
  ComponentWitness component;
};

/// Endpoints of K that are not ambient endpoints, each with a component of
/// the ambient minus that point which misses K.
inline std::vector<EndpointWitness> endpoint_diff(const Subdendrite& k)
{
  const Dendrite& w = k.ambient();
  std::vector<EndpointWitness> out;
  for (const Point& x : k.extremes()) {
    if (x.is_node()) {
      NodeId v = x.node_id();
      if (w.is_leaf(v)) continue;
      for (const auto& inc : w.neighbors(v)) {
        const auto& ed = w.edge(inc.edge);
        const auto& iv = k.region().interval(inc.edge);
        bool leaves = iv && (ed.u == v ? iv->lo == 0 : iv->hi == 1);
        if (!leaves) {
          out.push_back({x, {x, inc.node}});
          break;
        }
      }
    } else {
      const auto& iv = k.region().interval(w.edge_of(x));
      NodeId toward = (x.t() == iv->hi) ? x.v() : x.u();
      out.push_back({x, {x, toward}});
    }
  }
  return out;
}

struct FullCopyReport {
  std::vector<Point> branching_endpoints;
  std::vector<NodeId> order_mismatches;

  bool endpoints_avoid_branching() const { return branching_endpoints.empty(); }
  bool orders_match() const { return order_mismatches.empty(); }
  bool passes() const { return endpoints_avoid_branching() && orders_match(); }
};

/// Checks that a full K looks like a copy of the ambient: no endpoint at an
/// ambient branching node, and every branching node inside an arc of K
/// between two endpoints keeps its ambient target order.
inline FullCopyReport full_copy_diagnostics(const Subdendrite& k)
{
  if (!is_full(k)) throw PreconditionError("K is not full");
  const Dendrite& w = k.ambient();
  FullCopyReport rep;
  for (const Point& x : k.extremes())
    if (x.is_node() && w.is_branch_node(x.node_id())) rep.branching_endpoints.push_back(x);

  std::set<NodeId> bad;
  const auto& ex = k.extremes();
  for (std::size_t i = 0; i < ex.size(); ++i) {
    for (std::size_t j = i + 1; j < ex.size(); ++j) {
      for (const Segment& s : w.path(ex[i], ex[j])) {
        const auto& ed = w.edge(s.edge);
        for (const Rational* t : {&s.t0, &s.t1}) {
          if (*t != 0 && *t != 1) continue;
          NodeId v = *t == 0 ? ed.u : ed.v;
          Point p = Point::node(v);
          if (p == ex[i] || p == ex[j] || !w.is_branch_node(v)) continue;
          if (!(k.order_of(p) == w.order(v))) bad.insert(v);
        }
      }
    }
  }
  rep.order_mismatches.assign(bad.begin(), bad.end());
  return rep;
}

} // namespace dendrolab
