#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dendrolab/builder.hpp"
#include "dendrolab/fullness.hpp"
#include "dendrolab/random.hpp"

namespace dendrolab {

/// Finite maximal order arc: strictly nested subdendrites from a singleton
/// root to the whole ambient.
class Chain {
public:
  Chain(Subdendrite::Space space, std::vector<Subdendrite> elements)
      : space_(std::move(space)), elements_(std::move(elements))
  {
    if (elements_.empty()) throw PreconditionError("chain needs at least one element");
    for (const auto& k : elements_)
      if (!(k.space() == space_ || *k.space() == *space_))
        throw PreconditionError("chain elements live in different ambient spaces");
    if (!elements_.front().is_degenerate() && space_->node_count() > 1)
      throw PreconditionError("first chain element must be a singleton");
    if (!(elements_.back() == Subdendrite::whole(space_)))
      throw PreconditionError("last chain element must be the whole space");
    for (std::size_t i = 0; i + 1 < elements_.size(); ++i) {
      if (!elements_[i].subset_of(elements_[i + 1]) || elements_[i] == elements_[i + 1])
        throw PreconditionError("chain elements must be strictly nested (index " + std::to_string(i) + ")");
    }
    mesh_ = Rational(0);
    for (std::size_t i = 0; i + 1 < elements_.size(); ++i)
      mesh_ = std::max(mesh_, hausdorff(elements_[i], elements_[i + 1]));
  }

  const Dendrite& ambient() const { return *space_; }
  const Subdendrite::Space& space() const { return space_; }
  const std::vector<Subdendrite>& elements() const { return elements_; }
  const Subdendrite& operator[](std::size_t i) const { return elements_.at(i); }
  std::size_t size() const { return elements_.size(); }
  const Rational& mesh() const { return mesh_; }

  Point root() const { return elements_.front().extremes().front(); }

  std::size_t hitting_time(const Point& x) const
  {
    space_->check_point(x);
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if (elements_[i].contains(x)) return i;
    throw InternalError("point missed by the whole space");
  }

  /// Nodes first covered by the same element as x.
  std::vector<NodeId> hitting_level(const Point& x) const
  {
    std::size_t h = hitting_time(x);
    std::vector<NodeId> out;
    for (NodeId v = 0; v < space_->node_count(); ++v)
      if (hitting_time(Point::node(v)) == h) out.push_back(v);
    return out;
  }

  friend bool operator==(const Chain& a, const Chain& b)
  {
    return *a.space_ == *b.space_ && a.elements_ == b.elements_;
  }

private:
  Subdendrite::Space space_;
  std::vector<Subdendrite> elements_;
  Rational mesh_;
};

inline Rational hausdorff2(const Chain& a, const Chain& b)
{
  if (!(a.ambient() == b.ambient())) throw PreconditionError("chains live in different ambient spaces");
  return hausdorff2(std::span<const Subdendrite>(a.elements()), std::span<const Subdendrite>(b.elements()));
}

enum class WillfulMode { AllArcs, RootArcs };

struct WillfulWitness {
  Point from;
  Point to;
  std::size_t i;
  std::size_t j;
};

struct WillfulResult {
  std::optional<WillfulWitness> witness;
  bool willful() const { return !witness; }
};

namespace detail {

/// A partially covered arc must keep gaining material at every later step.
inline std::optional<WillfulWitness> arc_witness(const Chain& c, const Point& p, const Point& q)
{
  const Dendrite& w = c.ambient();
  auto path = w.path(p, q);
  Rational len(0);
  for (const Segment& s : path) len += w.segment_length(s);
  std::optional<Interval> prev;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto cur = intersect_path(w, c[i].region(), p, path);
    if (i > 0 && prev) {
      bool proper = !(prev->lo == 0 && prev->hi == len);
      if (proper && cur && *cur == *prev) return WillfulWitness{p, q, i - 1, i};
    }
    if (cur && cur->lo == 0 && cur->hi == len) break;
    prev = cur;
  }
  return std::nullopt;
}

} // namespace detail

/// Willfulness: whenever an element meets an arc properly, the next element
/// meets it in strictly more. Nesting makes consecutive steps sufficient.
/// ROOT_ARCS only looks at arcs from the root to ambient branching nodes
/// and leaves. If some arc A stalls between K_i and K_{i+1}, pick p in A
/// outside K_{i+1} and a leaf l beyond p as seen from the root; the arc
/// [root, l] then stalls at the first point of p in K_i. So both modes
/// decide the same property.
inline WillfulResult is_willful(const Chain& c, WillfulMode mode)
{
  const Dendrite& w = c.ambient();
  const Point root = c.root();
  if (mode == WillfulMode::AllArcs) {
    // Arcs between nodes, plus arcs from an edge-interior root.
    std::vector<Point> ends;
    for (NodeId v = 0; v < w.node_count(); ++v) ends.push_back(Point::node(v));
    if (!root.is_node()) ends.insert(ends.begin(), root);
    for (std::size_t i = 0; i < ends.size(); ++i)
      for (std::size_t j = i + 1; j < ends.size(); ++j)
        if (auto wit = detail::arc_witness(c, ends[i], ends[j])) return {wit};
    return {};
  }
  for (NodeId b = 0; b < w.node_count(); ++b) {
    if (!(w.is_branch_node(b) || w.is_leaf(b)) || Point::node(b) == root) continue;
    if (auto wit = detail::arc_witness(c, root, Point::node(b))) return {wit};
  }
  return {};
}

struct GenericReport {
  bool root_is_endpoint = false;
  bool nowhere_dense_steps = false;
  bool branch_endpoints_ok = false;
  bool willful = false;
  std::optional<std::size_t> dense_failure;    ///< first i with K_i not nowhere dense in K_{i+1}
  std::optional<std::size_t> endpoint_failure; ///< first element failing condition (iii)
  std::optional<WillfulWitness> willful_witness;

  bool passes() const { return root_is_endpoint && nowhere_dense_steps && branch_endpoints_ok && willful; }
};

namespace detail {

inline bool root_is_endpoint(const Chain& c)
{
  Point r = c.root();
  return r.is_node() && c.ambient().degree(r.node_id()) == 1;
}

/// Every ambient branching node of K_i sees new material of K_{i+1} within
/// epsilon. Later elements only add material, so consecutive pairs decide
/// the condition for all pairs.
inline std::optional<std::size_t> first_dense_step(const Chain& c, const Rational& eps)
{
  const Dendrite& w = c.ambient();
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    for (NodeId b : c[i].nodes()) {
      if (!w.is_branch_node(b)) continue;
      if (ball_part_inside(Ball{Point::node(b), eps}, &c[i + 1], c[i])) return i;
    }
  }
  return std::nullopt;
}

inline std::size_t branching_extremes(const Subdendrite& k)
{
  std::size_t n = 0;
  for (const Point& p : k.extremes())
    if (p.is_node() && k.ambient().is_branch_node(p.node_id())) ++n;
  return n;
}

inline void check_eps(const Rational& eps)
{
  if (eps <= 0) throw PreconditionError("epsilon must be positive");
}

} // namespace detail

/// Conditions (i)-(iv) for generic chains, with nowhere density at
/// resolution epsilon.
inline GenericReport check_generic_conditions(const Chain& c, const Rational& eps)
{
  detail::check_eps(eps);
  GenericReport rep;
  rep.root_is_endpoint = detail::root_is_endpoint(c);
  rep.dense_failure = detail::first_dense_step(c, eps);
  rep.nowhere_dense_steps = !rep.dense_failure;
  for (std::size_t i = 0; i < c.size() && !rep.endpoint_failure; ++i)
    if (detail::branching_extremes(c[i]) > 1) rep.endpoint_failure = i;
  rep.branch_endpoints_ok = !rep.endpoint_failure;
  rep.willful_witness = is_willful(c, WillfulMode::RootArcs).witness;
  rep.willful = !rep.willful_witness;
  return rep;
}

/// Largest distance from a point of K to the nearest of the given points.
/// The sources are assumed to lie in K.
inline Rational spread_from(const Subdendrite& k, const std::vector<Point>& sources)
{
  if (sources.empty()) throw PreconditionError("spread needs at least one source");
  const Dendrite& w = k.ambient();
  auto near = [&](const Point& p) {
    Rational best = w.distance(p, sources.front());
    for (const Point& s : sources) best = std::min(best, w.distance(p, s));
    return best;
  };
  Rational worst(0);
  for (EdgeId e = 0; e < w.edge_count(); ++e) {
    auto cover = k.region().covered_range(w, e, Rational(0), Rational(1));
    if (!cover) continue;
    const auto& iv = k.region().interval(e);
    Point a = w.edge_point(e, cover->lo), b = w.edge_point(e, cover->hi);
    Rational da = near(a), db = near(b);
    worst = std::max({worst, da, db});
    if (!iv) continue;
    // Along the piece the distance is min(da + u, db + len - u).
    Rational len = (cover->hi - cover->lo) * w.edge(e).length;
    Rational u = std::clamp(Rational((db + len - da) / 2), Rational(0), len);
    worst = std::max(worst, std::min(Rational(da + u), Rational(db + len - u)));
  }
  for (NodeId v : k.nodes()) worst = std::max(worst, near(Point::node(v)));
  return worst;
}

/// The W_omega form of (iii). Edge-interior extremes are tips that a finer
/// stage may still resolve into branching points, so they count with the
/// branching extremes; every other extreme must be an ambient leaf, and the
/// counted extremes must be epsilon-dense in the element. The whole space is
/// exempt: its finite-stage leaves are not endpoints of the limit elements.
inline GenericReport check_omega_conditions(const Chain& c, const Rational& eps)
{
  detail::check_eps(eps);
  const Dendrite& w = c.ambient();
  GenericReport rep;
  rep.root_is_endpoint = detail::root_is_endpoint(c);
  rep.dense_failure = detail::first_dense_step(c, eps);
  rep.nowhere_dense_steps = !rep.dense_failure;
  for (std::size_t i = 0; i + 1 < c.size() && !rep.endpoint_failure; ++i) {
    if (c[i].is_degenerate()) continue;
    std::vector<Point> counted;
    bool others_ok = true;
    for (const Point& p : c[i].extremes()) {
      if (!p.is_node() || w.is_branch_node(p.node_id())) counted.push_back(p);
      else if (!w.is_leaf(p.node_id())) others_ok = false;
    }
    if (counted.empty()) continue;
    if (!others_ok || !(spread_from(c[i], counted) < eps)) rep.endpoint_failure = i;
  }
  rep.branch_endpoints_ok = !rep.endpoint_failure;
  rep.willful_witness = is_willful(c, WillfulMode::RootArcs).witness;
  rep.willful = !rep.willful_witness;
  return rep;
}

inline bool check_full_chain(const Chain& c)
{
  return std::all_of(c.elements().begin(), c.elements().end(),
                     [](const Subdendrite& k) { return k.is_degenerate() || is_full(k); });
}

/// The chain moved to start at y: {y}, [y, x], then K_i joined with [y, x].
inline Chain root_shifted_chain(const Chain& c, const Point& y)
{
  const auto& space = c.space();
  const Point x = c.root();
  auto bridge = Subdendrite::arc(space, y, x);
  std::vector<Subdendrite> out{Subdendrite(space, {y})};
  auto push = [&](Subdendrite k) {
    if (!(k == out.back())) out.push_back(std::move(k));
  };
  push(bridge);
  for (std::size_t i = 1; i < c.size(); ++i)
    push(Subdendrite::from_region(space, Region::unite(*space, c[i].region(), bridge.region())));
  return Chain(space, std::move(out));
}

/// Roots of nearby shifted chains stay nearby: for every probe chain C'
/// with h2(C, C') < eps, d(root C, root C') < eps.
inline bool root_continuity_probe(const Chain& c, const Rational& eps)
{
  detail::check_eps(eps);
  const Dendrite& w = c.ambient();
  const Point x = c.root();
  std::vector<Point> toward;
  if (x.is_node()) {
    for (const auto& inc : w.neighbors(x.node_id())) toward.push_back(Point::node(inc.node));
  } else {
    toward = {Point::node(x.u()), Point::node(x.v())};
  }
  for (const Point& t : toward) {
    Rational room = w.distance(x, t);
    for (Rational s : {eps / 4, eps / 2, 3 * eps / 4, eps, 2 * eps}) {
      if (s > room) continue;
      Point y = w.point_along(x, t, s);
      Chain shifted = root_shifted_chain(c, y);
      if (hausdorff2(c, shifted) < eps && !(w.distance(x, shifted.root()) < eps)) return false;
    }
  }
  return true;
}

/// gamma(s) for s in the grid, inside the k-stage tree at t = 1, after the
/// singleton at the zero sequence.
inline Chain gamma_chain(const BondingFunction& f, int k, const std::vector<Rational>& grid)
{
  if (grid.empty() || grid.back() != 1) throw PreconditionError("grid must end at 1");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0 || grid[i] > 1) throw PreconditionError("grid values must lie in (0,1]");
    if (i > 0 && !(grid[i - 1] < grid[i])) throw PreconditionError("grid must be strictly increasing");
  }
  StageTree stage = inverse_limit_stage_detailed(f, Rational(1), k);
  auto space = std::make_shared<const Dendrite>(stage.tree);
  std::vector<Subdendrite> elements{Subdendrite(space, {Point::node(0)})};
  for (const Rational& s : grid) elements.push_back(Subdendrite::from_region(space, gamma_region(stage, f, s)));
  return Chain(space, std::move(elements));
}

namespace detail {

/// Arrival-time growth on a rooted tree. Non-leaf edges fill at unit rate in
/// weighted time; leaf edges creep towards a capped length and only fill
/// at the final step.
struct Growth {
  const Dendrite& w;
  NodeId root;
  std::vector<NodeId> parent;
  std::vector<EdgeId> parent_edge;
  std::vector<Rational> arrival;
  std::vector<Rational> weight; ///< per edge
  std::vector<char> creeping;   ///< per edge
  std::vector<Rational> cap;    ///< per edge, creeping edges only
  Rational stop;                ///< time of the last partial element

  Region at(const Rational& s) const
  {
    Region r(w);
    r.mark_node(root);
    for (EdgeId e = 0; e < w.edge_count(); ++e) {
      const auto& ed = w.edge(e);
      NodeId from = ed.u != root && parent[ed.u] == ed.v ? ed.v : ed.u;
      Rational frac;
      const Rational& t0 = arrival[from];
      if (s <= t0) continue;
      if (creeping[e]) {
        frac = cap[e] * (s - t0) / (stop - t0) / ed.length;
      } else {
        frac = std::min(Rational(1), (s - t0) / weight[e]);
      }
      if (from == ed.u) r.mark_piece(w, e, Rational(0), frac);
      else r.mark_piece(w, e, 1 - frac, Rational(1));
    }
    return r;
  }
};

} // namespace detail

/// Grows a chain from a seeded leaf root without checking the result.
inline Chain grow_chain(const Subdendrite::Space& space, std::uint64_t seed, const Rational& delta)
{
  if (delta <= 0) throw PreconditionError("delta must be positive");
  const Dendrite& w = *space;
  std::vector<NodeId> leaves;
  for (NodeId v = 0; v < w.node_count(); ++v)
    if (w.degree(v) == 1) leaves.push_back(v);
  if (leaves.empty()) throw PreconditionError("ambient has no endpoint to root a chain at");

  // A root is usable when every branching node keeps some other leaf edge
  // within delta; those edges are the ones still growing at the end.
  auto leaf_base = [&](NodeId l) { return w.neighbors(l).front().node; };
  auto usable = [&](NodeId r) {
    for (NodeId b = 0; b < w.node_count(); ++b) {
      if (!w.is_branch_node(b)) continue;
      bool near = std::any_of(leaves.begin(), leaves.end(),
                              [&](NodeId l) { return l != r && w.node_distance(b, leaf_base(l)) < delta; });
      if (!near) return false;
    }
    return true;
  };
  Rng rng(seed);
  std::vector<NodeId> candidates = leaves;
  for (std::size_t i = candidates.size(); i > 1; --i) std::swap(candidates[i - 1], candidates[rng.below(i)]);
  auto pick = std::find_if(candidates.begin(), candidates.end(), usable);
  if (pick == candidates.end()) throw RefineNeeded("no endpoint leaves every branching node a growing leaf within delta");
  detail::Growth g{w, *pick, {}, {}, {}, {}, {}, {}, {}};
  const NodeId root = g.root;

  // Rooted structure and creeping edges.
  g.parent.assign(w.node_count(), root);
  g.parent_edge.assign(w.node_count(), 0);
  std::vector<NodeId> order{root};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& inc : w.neighbors(order[i])) {
      if (inc.node == root || (order[i] != root && inc.node == g.parent[order[i]])) continue;
      g.parent[inc.node] = order[i];
      g.parent_edge[inc.node] = inc.edge;
      order.push_back(inc.node);
    }
  g.creeping.assign(w.edge_count(), 0);
  for (NodeId v = 0; v < w.node_count(); ++v)
    if (v != root && w.degree(v) == 1 && g.parent[v] != root) g.creeping[g.parent_edge[v]] = 1;

  // Arrival times under random edge speeds in [1/2, 1], redrawn until the
  // nodes that are reached before the end all arrive at distinct times.
  bool distinct = false;
  for (int attempt = 0; attempt < 64 && !distinct; ++attempt) {
    g.weight.assign(w.edge_count(), Rational(0));
    for (EdgeId e = 0; e < w.edge_count(); ++e) g.weight[e] = w.edge(e).length / rng.fraction(8, 16, 16);
    g.arrival.assign(w.node_count(), Rational(0));
    for (std::size_t i = 1; i < order.size(); ++i) {
      NodeId v = order[i];
      g.arrival[v] = g.arrival[g.parent[v]] + g.weight[g.parent_edge[v]];
    }
    std::vector<Rational> times;
    for (NodeId v = 0; v < w.node_count(); ++v)
      if (v == root || !g.creeping[g.parent_edge[v]] || w.degree(v) > 1) times.push_back(g.arrival[v]);
    std::sort(times.begin(), times.end());
    distinct = std::adjacent_find(times.begin(), times.end()) == times.end();
  }
  if (!distinct) throw RefineNeeded("could not separate arrival times");

  auto reached_normally = [&](NodeId v) { return v == root || w.degree(v) > 1 || !g.creeping[g.parent_edge[v]]; };
  std::vector<Rational> node_times;
  for (NodeId v = 0; v < w.node_count(); ++v)
    if (reached_normally(v)) node_times.push_back(g.arrival[v]);
  std::sort(node_times.begin(), node_times.end());
  const Rational step = delta / 2;
  g.stop = node_times.back() + step;

  // Caps keep every creeping front within delta of the branching nodes near it.
  g.cap.assign(w.edge_count(), Rational(0));
  for (EdgeId e = 0; e < w.edge_count(); ++e) {
    if (!g.creeping[e]) continue;
    const auto& ed = w.edge(e);
    NodeId base = w.degree(ed.u) == 1 ? ed.v : ed.u;
    Rational cap = ed.length / 2;
    for (NodeId b = 0; b < w.node_count(); ++b) {
      if (!w.is_branch_node(b)) continue;
      Rational d = w.node_distance(b, base);
      if (d < delta) cap = std::min(cap, Rational((delta - d) / 2));
    }
    g.cap[e] = cap;
  }

  std::vector<Rational> samples;
  for (std::size_t i = 0; i < node_times.size(); ++i) {
    samples.push_back(node_times[i]);
    Rational next = i + 1 < node_times.size() ? node_times[i + 1] : g.stop;
    for (Rational s = node_times[i] + step; s < next; s += step) samples.push_back(s);
  }
  samples.push_back(g.stop);

  std::vector<Subdendrite> elements;
  for (const Rational& s : samples) {
    auto k = Subdendrite::from_region(space, g.at(s));
    if (elements.empty() || !(k == elements.back())) elements.push_back(std::move(k));
  }
  auto whole = Subdendrite::whole(space);
  if (elements.back() == whole) elements.pop_back();
  elements.push_back(std::move(whole));
  return Chain(space, std::move(elements));
}

/// Grows a chain from a seeded leaf root. Throws RefineNeeded when the
/// sampled chain fails the generic conditions at resolution delta.
inline Chain generate_generic_chain(const Subdendrite::Space& space, std::uint64_t seed, const Rational& delta)
{
  Chain chain = grow_chain(space, seed, delta);
  auto report = check_generic_conditions(chain, delta);
  if (!report.passes()) {
    std::string why = !report.root_is_endpoint ? "root" : !report.nowhere_dense_steps ? "nowhere density"
                      : !report.branch_endpoints_ok                                  ? "branching endpoints"
                                                                                     : "willfulness";
    throw RefineNeeded("generated chain fails " + why + " at this resolution");
  }
  return chain;
}

} // namespace dendrolab
