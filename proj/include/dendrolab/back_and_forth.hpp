#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dendrolab/chain.hpp"

namespace dendrolab {

enum class IsoContext { Subcontinua, Chains };

/// Finite betweenness-preserving bijection between ambient branching nodes,
/// together with the sets it is meant to carry onto each other.
struct PartialIso {
  Subdendrite::Space source_space;
  Subdendrite::Space target_space;
  IsoContext context = IsoContext::Subcontinua;
  Point source_base;
  Point target_base;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  /// Subcontinua: {K1} and {K2}. Chains: the elements of both chains.
  std::vector<Subdendrite> source_sets;
  std::vector<Subdendrite> target_sets;

  std::optional<NodeId> image(NodeId s) const
  {
    for (const auto& [a, b] : pairs)
      if (a == s) return b;
    return std::nullopt;
  }
  std::optional<NodeId> preimage(NodeId t) const
  {
    for (const auto& [a, b] : pairs)
      if (b == t) return a;
    return std::nullopt;
  }
};

namespace detail {

/// How a set meets the arc [p, q]: membership of both ends and whether the
/// intersection is empty, a point or a nondegenerate interval.
struct ArcProfile {
  bool has_p = false;
  bool has_q = false;
  int kind = 0; ///< 0 empty, 1 point, 2 interval
  friend bool operator==(const ArcProfile&, const ArcProfile&) = default;
};

inline ArcProfile arc_profile(const Subdendrite& k, const Point& p, const Point& q)
{
  ArcProfile out{k.contains(p), k.contains(q), 0};
  if (auto iv = intersect_arc(k.ambient(), k.region(), p, q)) out.kind = iv->lo == iv->hi ? 1 : 2;
  return out;
}

/// Hitting index of every node, or all zeros outside the chain context.
inline std::vector<std::size_t> node_hitting(const std::vector<Subdendrite>& sets, IsoContext ctx, std::size_t n)
{
  std::vector<std::size_t> out(n, 0);
  if (ctx != IsoContext::Chains) return out;
  for (NodeId v = 0; v < n; ++v) {
    std::size_t i = 0;
    while (!sets[i].contains(Point::node(v))) ++i;
    out[v] = i;
  }
  return out;
}

/// Backtracking search for the alternating construction.
class IsoSearch {
public:
  IsoSearch(PartialIso seed, std::size_t budget) : iso_(std::move(seed)), budget_(budget)
  {
    const Dendrite& w1 = *iso_.source_space;
    const Dendrite& w2 = *iso_.target_space;
    fwd_.assign(w1.node_count(), std::nullopt);
    back_.assign(w2.node_count(), std::nullopt);
    h1_ = node_hitting(iso_.source_sets, iso_.context, w1.node_count());
    h2_ = node_hitting(iso_.target_sets, iso_.context, w2.node_count());
    for (NodeId v = 0; v < w1.node_count(); ++v)
      if (w1.is_branch_node(v)) sources_.push_back(v);
    for (NodeId v = 0; v < w2.node_count(); ++v)
      if (w2.is_branch_node(v)) targets_.push_back(v);
  }

  bool run(std::size_t steps) { return step(0, steps); }
  const PartialIso& result() const { return iso_; }
  std::size_t failed_step() const { return failed_step_; }

private:
  bool step(std::size_t k, std::size_t steps)
  {
    if (k >= steps) return true;
    const bool forward = k % 2 == 0;
    auto& map = forward ? fwd_ : back_;
    const auto& pool = forward ? sources_ : targets_;
    auto next = std::find_if(pool.begin(), pool.end(), [&](NodeId v) { return !map[v]; });
    if (next == pool.end()) return true;
    const auto& other = forward ? back_ : fwd_;
    const auto& other_pool = forward ? targets_ : sources_;
    if (std::all_of(other_pool.begin(), other_pool.end(), [&](NodeId v) { return other[v].has_value(); })) return true;
    std::vector<NodeId> todo;
    if (auto z = projection(*next, forward)) todo.push_back(*z);
    todo.push_back(*next);
    if (place(todo, 0, forward, k, steps)) return true;
    failed_step_ = std::max(failed_step_, k);
    return false;
  }

  bool place(const std::vector<NodeId>& todo, std::size_t idx, bool forward, std::size_t k, std::size_t steps)
  {
    if (idx == todo.size()) return step(k + 1, steps);
    const NodeId u = todo[idx];
    if ((forward ? fwd_ : back_)[u]) return place(todo, idx + 1, forward, k, steps);
    const auto& other = forward ? back_ : fwd_;
    std::vector<NodeId> cands;
    if (u < other.size() && !other[u] && (forward ? iso_.target_space : iso_.source_space)->is_branch_node(u))
      cands.push_back(u);
    for (NodeId v : forward ? targets_ : sources_)
      if (v != u && !other[v]) cands.push_back(v);
    for (NodeId c : cands) {
      NodeId s = forward ? u : c, t = forward ? c : u;
      if (!admissible(s, t)) continue;
      add(s, t);
      if (place(todo, idx + 1, forward, k, steps)) return true;
      remove();
    }
    return false;
  }

  /// First point of u on the current tree of its side, when that is a
  /// branching node not yet in the domain.
  std::optional<NodeId> projection(NodeId u, bool forward) const
  {
    const auto& space = forward ? iso_.source_space : iso_.target_space;
    const Dendrite& w = *space;
    const Point& base = forward ? iso_.source_base : iso_.target_base;
    std::vector<Point> verts{base};
    for (const auto& [s, t] : iso_.pairs) verts.push_back(Point::node(forward ? s : t));
    if (verts.size() == 1) return std::nullopt;
    Subdendrite tree(space, std::span<const Point>(verts));
    Point z = tree.first_point(Point::node(u));
    if (!z.is_node() || z == base || z == Point::node(u)) return std::nullopt;
    if ((forward ? fwd_ : back_)[z.node_id()]) return std::nullopt;
    if (!w.is_branch_node(z.node_id())) throw InternalError("projection onto the tree is not a branching node");
    return z.node_id();
  }

  bool admissible(NodeId s, NodeId t)
  {
    if (++work_ > budget_) throw RefineNeeded("back-and-forth search budget exhausted");
    const Dendrite& w1 = *iso_.source_space;
    const Dendrite& w2 = *iso_.target_space;
    if (!(w1.order(s) == w2.order(t))) return false;
    const Point ps = Point::node(s), pt = Point::node(t);

    std::vector<std::pair<Point, Point>> verts{{iso_.source_base, iso_.target_base}};
    for (const auto& [a, b] : iso_.pairs) verts.emplace_back(Point::node(a), Point::node(b));

    if (iso_.context == IsoContext::Chains) {
      for (const auto& [a, b] : iso_.pairs) {
        if ((h1_[a] <= h1_[s]) != (h2_[b] <= h2_[t])) return false;
        if ((h1_[s] <= h1_[a]) != (h2_[t] <= h2_[b])) return false;
      }
    }
    for (std::size_t i = 0; i < verts.size(); ++i) {
      for (std::size_t j = i + 1; j < verts.size(); ++j) {
        const auto& [a1, a2] = verts[i];
        const auto& [b1, b2] = verts[j];
        if (w1.between(a1, b1, ps) != w2.between(a2, b2, pt)) return false;
        if (w1.between(a1, ps, b1) != w2.between(a2, pt, b2)) return false;
        if (w1.between(ps, b1, a1) != w2.between(pt, b2, a2)) return false;
      }
    }
    // Per-class arc profiles.
    std::vector<std::pair<std::size_t, std::size_t>> classes;
    auto add_class = [&](std::size_t i, std::size_t j) {
      if (std::find(classes.begin(), classes.end(), std::pair{i, j}) == classes.end()) classes.emplace_back(i, j);
    };
    for (const auto& [a, b] : iso_.pairs) add_class(h1_[a], h2_[b]);
    const bool new_class = std::find(classes.begin(), classes.end(), std::pair{h1_[s], h2_[t]}) == classes.end();
    add_class(h1_[s], h2_[t]);
    for (const auto& [i, j] : classes) {
      const auto& k1 = iso_.source_sets[i];
      const auto& k2 = iso_.target_sets[j];
      if (k1.contains(ps) != k2.contains(pt)) return false;
      for (const auto& [a1, a2] : verts)
        if (arc_profile(k1, a1, ps) != arc_profile(k2, a2, pt)) return false;
    }
    if (new_class) {
      const auto& k1 = iso_.source_sets[h1_[s]];
      const auto& k2 = iso_.target_sets[h2_[t]];
      for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
          if (arc_profile(k1, verts[i].first, verts[j].first) != arc_profile(k2, verts[i].second, verts[j].second))
            return false;
    }
    return true;
  }

  void add(NodeId s, NodeId t)
  {
    iso_.pairs.emplace_back(s, t);
    fwd_[s] = t;
    back_[t] = s;
  }

  void remove()
  {
    auto [s, t] = iso_.pairs.back();
    iso_.pairs.pop_back();
    fwd_[s].reset();
    back_[t].reset();
  }

  PartialIso iso_;
  std::size_t budget_;
  std::size_t work_ = 0;
  std::size_t failed_step_ = 0;
  std::vector<std::optional<NodeId>> fwd_, back_;
  std::vector<std::size_t> h1_, h2_;
  std::vector<NodeId> sources_, targets_;
};

inline Point subcontinuum_base(const Subdendrite& k)
{
  for (NodeId v : k.nodes())
    if (k.ambient().is_leaf(v)) return Point::node(v);
  return k.extremes().front();
}

inline PartialIso search_or_refine(PartialIso seed, std::size_t steps, std::size_t budget)
{
  IsoSearch search(std::move(seed), budget);
  if (!search.run(steps))
    throw RefineNeeded("no admissible image at step " + std::to_string(search.failed_step() + 1) +
                       " at this depth");
  return search.result();
}

} // namespace detail

inline constexpr std::size_t kDefaultSearchBudget = 2'000'000;

/// Unchecked search on arbitrary subcontinua; the public entry points add
/// the preconditions.
inline PartialIso bf_search_subcontinua(const Subdendrite& k1, const Subdendrite& k2, std::size_t steps,
                                        std::size_t budget = kDefaultSearchBudget)
{
  k1.require_same_space(k2);
  PartialIso seed;
  seed.source_space = seed.target_space = k1.space();
  seed.context = IsoContext::Subcontinua;
  seed.source_base = detail::subcontinuum_base(k1);
  seed.target_base = detail::subcontinuum_base(k2);
  seed.source_sets = {k1};
  seed.target_sets = {k2};
  return detail::search_or_refine(std::move(seed), steps, budget);
}

inline PartialIso bf_search_chains(const Chain& c1, const Chain& c2, std::size_t steps,
                                   std::size_t budget = kDefaultSearchBudget)
{
  PartialIso seed;
  seed.source_space = c1.space();
  seed.target_space = c2.space();
  seed.context = IsoContext::Chains;
  seed.source_base = c1.root();
  seed.target_base = c2.root();
  seed.source_sets = c1.elements();
  seed.target_sets = c2.elements();
  return detail::search_or_refine(std::move(seed), steps, budget);
}

inline PartialIso bf_subcontinua(const Subdendrite& k1, const Subdendrite& k2, std::size_t steps)
{
  k1.require_same_space(k2);
  const Rational eps = k1.ambient().mesh();
  for (const Subdendrite* k : {&k1, &k2}) {
    const char* which = k == &k1 ? "K1" : "K2";
    if (!is_full(*k)) throw PreconditionError(std::string(which) + " is not full");
    if (!is_nowhere_dense(*k, eps)) throw PreconditionError(std::string(which) + " is not nowhere dense at the ambient mesh");
  }
  return bf_search_subcontinua(k1, k2, steps);
}

namespace detail {

inline void require_conditions(const GenericReport& rep, const char* which)
{
  auto fail = [&](const std::string& what) { throw PreconditionError(std::string(which) + " fails " + what); };
  if (!rep.root_is_endpoint) fail("condition (i)");
  if (!rep.nowhere_dense_steps) fail("condition (ii) at index " + std::to_string(*rep.dense_failure));
  if (!rep.branch_endpoints_ok) fail("condition (iii) at index " + std::to_string(*rep.endpoint_failure));
  if (!rep.willful) fail("condition (iv)");
}

} // namespace detail

inline PartialIso bf_chains(const Chain& c1, const Chain& c2, std::size_t steps)
{
  detail::require_conditions(check_generic_conditions(c1, c1.ambient().mesh()), "C1");
  detail::require_conditions(check_generic_conditions(c2, c2.ambient().mesh()), "C2");
  return bf_search_chains(c1, c2, steps);
}

/// Variant for chains whose elements may have several branching endpoints;
/// equal hitting times on one side must match equal ones on the other.
inline PartialIso bf_chains_omega(const Chain& c1, const Chain& c2, std::size_t steps)
{
  detail::require_conditions(check_omega_conditions(c1, c1.ambient().mesh()), "C1");
  detail::require_conditions(check_omega_conditions(c2, c2.ambient().mesh()), "C2");
  return bf_search_chains(c1, c2, steps);
}

struct IsoViolations {
  std::vector<std::string> messages;
  bool ok() const { return messages.empty(); }
};

/// Re-checks every invariant of a PartialIso from scratch.
inline IsoViolations check_invariants(const PartialIso& iso)
{
  IsoViolations out;
  const Dendrite& w1 = *iso.source_space;
  const Dendrite& w2 = *iso.target_space;
  auto note = [&](std::string m) { out.messages.push_back(std::move(m)); };
  const auto& P = iso.pairs;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto& [s, t] = P[i];
    if (s >= w1.node_count() || t >= w2.node_count()) {
      note("pair " + std::to_string(i) + " names a missing node");
      continue;
    }
    if (!w1.is_branch_node(s) || !w2.is_branch_node(t)) note("pair " + std::to_string(i) + " is not between branching nodes");
    if (!(w1.order(s) == w2.order(t))) note("pair " + std::to_string(i) + " changes the order label");
    for (std::size_t j = i + 1; j < P.size(); ++j)
      if (P[j].first == s || P[j].second == t) note("pairs " + std::to_string(i) + "," + std::to_string(j) + " are not injective");
  }
  std::vector<std::pair<Point, Point>> v{{iso.source_base, iso.target_base}};
  for (const auto& [s, t] : P) v.emplace_back(Point::node(s), Point::node(t));
  bool between_ok = true;
  for (std::size_t a = 0; a < v.size() && between_ok; ++a)
    for (std::size_t b = 0; b < v.size() && between_ok; ++b)
      for (std::size_t c = 0; c < v.size() && between_ok; ++c) {
        if (a == b || b == c || a == c) continue;
        if (w1.between(v[a].first, v[b].first, v[c].first) != w2.between(v[a].second, v[b].second, v[c].second))
          between_ok = false;
      }
  if (!between_ok) note("betweenness is not preserved");

  auto h1 = detail::node_hitting(iso.source_sets, iso.context, w1.node_count());
  auto h2 = detail::node_hitting(iso.target_sets, iso.context, w2.node_count());
  for (const auto& [s, t] : P) {
    if (iso.source_sets[h1[s]].contains(Point::node(s)) != iso.target_sets[h2[t]].contains(Point::node(t)))
      note("membership of " + std::to_string(s) + " is not preserved");
    for (const auto& [s2, t2] : P)
      if ((h1[s] <= h1[s2]) != (h2[t] <= h2[t2])) {
        note("hitting order of " + std::to_string(s) + "," + std::to_string(s2) + " is not preserved");
        break;
      }
  }
  // Tree closure: meets with the base stay in the domain.
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = i + 1; j < P.size(); ++j) {
      Subdendrite a(iso.source_space, {iso.source_base, Point::node(P[i].first)});
      Point m = a.first_point(Point::node(P[j].first));
      Subdendrite b(iso.target_space, {iso.target_base, Point::node(P[i].second)});
      Point m2 = b.first_point(Point::node(P[j].second));
      bool in_domain = m == iso.source_base;
      std::optional<NodeId> img;
      for (const auto& [s, t] : P)
        if (m == Point::node(s)) {
          in_domain = true;
          img = t;
        }
      if (!in_domain) note("meet of " + std::to_string(P[i].first) + "," + std::to_string(P[j].first) + " is not in the domain");
      else if (img ? !(m2 == Point::node(*img)) : !(m2 == iso.target_base))
        note("meet of " + std::to_string(P[i].first) + "," + std::to_string(P[j].first) + " is not carried to the target meet");
    }
  return out;
}

struct ClassDefect {
  std::size_t source_index;
  std::size_t target_index;
  Rational defect;
};

struct ExtensionReport {
  std::size_t tree_edges = 0;
  std::vector<ClassDefect> defects;
  Rational max_defect{0};
};

namespace detail {

/// Piecewise-linear map [0, l1] -> [0, l2] through the given breakpoints.
/// Falls back to the linear map when they are not monotone.
inline std::vector<std::pair<Rational, Rational>> breakpoints(std::vector<std::pair<Rational, Rational>> pts,
                                                              const Rational& l1, const Rational& l2)
{
  pts.emplace_back(Rational(0), Rational(0));
  pts.emplace_back(l1, l2);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i].first < pts[i + 1].first && pts[i].second < pts[i + 1].second))
      return {{Rational(0), Rational(0)}, {l1, l2}};
  return pts;
}

inline Rational apply(const std::vector<std::pair<Rational, Rational>>& f, const Rational& s)
{
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const auto& [a0, b0] = f[i];
    const auto& [a1, b1] = f[i + 1];
    if (s <= a1) return b0 + (s - a0) * (b1 - b0) / (a1 - a0);
  }
  return f.back().second;
}

} // namespace detail

/// Extends the node bijection to the induced trees, piecewise linearly on
/// each tree edge, and measures how far each carried set lands from its
/// partner. Throws InternalError when betweenness is already broken.
inline ExtensionReport extend_and_verify(const PartialIso& iso)
{
  auto bad = check_invariants(iso);
  for (const auto& m : bad.messages)
    if (m.find("betweenness") != std::string::npos || m.find("meet") != std::string::npos)
      throw InternalError("partial isomorphism cannot be extended: " + m);

  const Dendrite& w1 = *iso.source_space;
  const Dendrite& w2 = *iso.target_space;
  std::vector<std::pair<Point, Point>> verts{{iso.source_base, iso.target_base}};
  for (const auto& [s, t] : iso.pairs) verts.emplace_back(Point::node(s), Point::node(t));

  // Tree edges: each vertex hangs from the farthest other vertex on its
  // path to the base; the two sides must agree.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t v = 1; v < verts.size(); ++v) {
    std::size_t parent = 0;
    Rational best(-1);
    for (std::size_t u = 0; u < verts.size(); ++u) {
      if (u == v || !w1.between(verts[0].first, verts[v].first, verts[u].first)) continue;
      Rational d = w1.distance(verts[0].first, verts[u].first);
      if (d > best) {
        best = d;
        parent = u;
      }
    }
    edges.emplace_back(parent, v);
  }

  auto h1 = detail::node_hitting(iso.source_sets, iso.context, w1.node_count());
  auto h2 = detail::node_hitting(iso.target_sets, iso.context, w2.node_count());
  std::vector<std::pair<std::size_t, std::size_t>> classes;
  if (iso.context == IsoContext::Subcontinua) classes.emplace_back(0, 0);
  for (const auto& [s, t] : iso.pairs)
    if (std::find(classes.begin(), classes.end(), std::pair{h1[s], h2[t]}) == classes.end())
      classes.emplace_back(h1[s], h2[t]);

  struct EdgeMap {
    Point a1, b1, a2, b2;
    std::vector<std::pair<Rational, Rational>> f;
  };
  std::vector<EdgeMap> maps;
  for (const auto& [u, v] : edges) {
    EdgeMap m{verts[u].first, verts[v].first, verts[u].second, verts[v].second, {}};
    Rational l1 = w1.distance(m.a1, m.b1), l2 = w2.distance(m.a2, m.b2);
    std::vector<std::pair<Rational, Rational>> pts;
    for (const auto& [i, j] : classes) {
      auto i1 = intersect_arc(w1, iso.source_sets[i].region(), m.a1, m.b1);
      auto i2 = intersect_arc(w2, iso.target_sets[j].region(), m.a2, m.b2);
      if (i1 && i2) {
        pts.emplace_back(i1->lo, i2->lo);
        pts.emplace_back(i1->hi, i2->hi);
      }
    }
    m.f = detail::breakpoints(std::move(pts), l1, l2);
    maps.push_back(std::move(m));
  }

  ExtensionReport rep;
  rep.tree_edges = edges.size();
  for (const auto& [i, j] : classes) {
    const auto& k1 = iso.source_sets[i];
    const auto& k2 = iso.target_sets[j];
    Region carried(w2), partner(w2);
    for (const auto& [p1, p2] : verts) {
      if (k1.contains(p1)) carried.mark_point(w2, p2);
      if (k2.contains(p2)) partner.mark_point(w2, p2);
    }
    for (const auto& m : maps) {
      if (auto i1 = intersect_arc(w1, k1.region(), m.a1, m.b1))
        carried.mark_path(w2, w2.point_along(m.a2, m.b2, detail::apply(m.f, i1->lo)),
                          w2.point_along(m.a2, m.b2, detail::apply(m.f, i1->hi)));
      if (auto i2 = intersect_arc(w2, k2.region(), m.a2, m.b2))
        partner.mark_path(w2, w2.point_along(m.a2, m.b2, i2->lo), w2.point_along(m.a2, m.b2, i2->hi));
    }
    Rational d(0);
    if (carried.empty() != partner.empty()) {
      d = w2.mesh();
    } else if (!carried.empty()) {
      d = hausdorff(Subdendrite::from_region(iso.target_space, carried),
                    Subdendrite::from_region(iso.target_space, partner));
    }
    rep.defects.push_back({i, j, d});
    rep.max_defect = std::max(rep.max_defect, d);
  }
  return rep;
}

} // namespace dendrolab
