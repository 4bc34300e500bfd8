#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dendrolab/dendrite.hpp"

namespace dendrolab {

/// Closed parameter interval lo <= hi inside [0,1].
struct Interval {
  Rational lo;
  Rational hi;
  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// Realized point set of a subcontinuum: flagged nodes plus at most one
/// closed interval per edge. Only connected sets are stored, so the part on
/// one edge is always a single interval.
class Region {
public:
  Region() = default;
  explicit Region(const Dendrite& w) : nodes_(w.node_count(), 0), edges_(w.edge_count()) {}

  static Region whole(const Dendrite& w)
  {
    Region r(w);
    std::fill(r.nodes_.begin(), r.nodes_.end(), 1);
    for (auto& iv : r.edges_) iv = Interval{Rational(0), Rational(1)};
    return r;
  }

  bool has_node(NodeId v) const { return nodes_.at(v) != 0; }
  const std::optional<Interval>& interval(EdgeId e) const { return edges_.at(e); }
  std::size_t node_slots() const { return nodes_.size(); }
  std::size_t edge_slots() const { return edges_.size(); }

  bool empty() const
  {
    return std::none_of(nodes_.begin(), nodes_.end(), [](char c) { return c != 0; }) &&
           std::none_of(edges_.begin(), edges_.end(), [](const auto& iv) { return iv.has_value(); });
  }

  void mark_node(NodeId v) { nodes_.at(v) = 1; }

  /// Adds the closed piece [min(a,b), max(a,b)] of edge e.
  void mark_piece(const Dendrite& w, EdgeId e, Rational a, Rational b)
  {
    if (a > b) std::swap(a, b);
    const auto& ed = w.edge(e);
    if (a == 0) mark_node(ed.u);
    if (b == 1) mark_node(ed.v);
    if ((a == 0 && b == 0) || (a == 1 && b == 1)) return;
    auto& slot = edges_.at(e);
    if (!slot) {
      slot = Interval{std::move(a), std::move(b)};
    } else {
      slot->lo = std::min(slot->lo, a);
      slot->hi = std::max(slot->hi, b);
    }
  }

  void mark_point(const Dendrite& w, const Point& p)
  {
    if (p.is_node()) {
      mark_node(p.u());
    } else {
      mark_piece(w, w.edge_of(p), p.t(), p.t());
    }
  }

  void mark_segment(const Dendrite& w, const Segment& s) { mark_piece(w, s.edge, s.t0, s.t1); }

  void mark_path(const Dendrite& w, const Point& p, const Point& q)
  {
    mark_point(w, p);
    mark_point(w, q);
    for (const Segment& s : w.path(p, q)) mark_segment(w, s);
  }

  bool contains(const Dendrite& w, const Point& p) const
  {
    if (p.is_node()) return has_node(p.u());
    const auto& iv = edges_.at(w.edge_of(p));
    return iv && iv->lo <= p.t() && p.t() <= iv->hi;
  }

  /// Number of edges at v along which the region leaves v.
  std::size_t degree_at(const Dendrite& w, NodeId v) const
  {
    std::size_t k = 0;
    for (const auto& inc : w.neighbors(v)) {
      const auto& iv = edges_[inc.edge];
      if (!iv) continue;
      if (w.edge(inc.edge).u == v ? iv->lo == 0 : iv->hi == 1) ++k;
    }
    return k;
  }

  /// Smallest and largest covered parameters of edge e within [a, b].
  std::optional<Interval> covered_range(const Dendrite& w, EdgeId e, const Rational& a, const Rational& b) const
  {
    const auto& ed = w.edge(e);
    std::optional<Interval> out;
    auto add = [&](const Rational& t) {
      if (!out) out = Interval{t, t};
      else {
        out->lo = std::min(out->lo, t);
        out->hi = std::max(out->hi, t);
      }
    };
    if (a == 0 && has_node(ed.u)) add(Rational(0));
    if (b == 1 && has_node(ed.v)) add(Rational(1));
    if (const auto& iv = edges_[e]) {
      Rational lo = std::max(a, iv->lo);
      Rational hi = std::min(b, iv->hi);
      if (lo <= hi) {
        add(lo);
        add(hi);
      }
    }
    return out;
  }

  bool subset_of(const Region& o) const
  {
    for (std::size_t v = 0; v < nodes_.size(); ++v)
      if (nodes_[v] && !o.nodes_[v]) return false;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (!edges_[e]) continue;
      if (!o.edges_[e] || o.edges_[e]->lo > edges_[e]->lo || o.edges_[e]->hi < edges_[e]->hi) return false;
    }
    return true;
  }

  friend bool operator==(const Region&, const Region&) = default;

  static Region intersect(const Region& a, const Region& b)
  {
    Region r;
    r.nodes_.resize(a.nodes_.size());
    r.edges_.resize(a.edges_.size());
    for (std::size_t v = 0; v < a.nodes_.size(); ++v) r.nodes_[v] = a.nodes_[v] && b.nodes_[v];
    for (std::size_t e = 0; e < a.edges_.size(); ++e) {
      if (!a.edges_[e] || !b.edges_[e]) continue;
      Rational lo = std::max(a.edges_[e]->lo, b.edges_[e]->lo);
      Rational hi = std::min(a.edges_[e]->hi, b.edges_[e]->hi);
      if (lo > hi) continue;
      if ((lo == 0 && hi == 0) || (lo == 1 && hi == 1)) continue;
      r.edges_[e] = Interval{std::move(lo), std::move(hi)};
    }
    return r;
  }

  /// Union of two regions whose union is connected.
  static Region unite(const Dendrite& w, const Region& a, Region b)
  {
    for (std::size_t v = 0; v < a.nodes_.size(); ++v)
      if (a.nodes_[v]) b.mark_node(v);
    for (std::size_t e = 0; e < a.edges_.size(); ++e)
      if (a.edges_[e]) b.mark_piece(w, e, a.edges_[e]->lo, a.edges_[e]->hi);
    return b;
  }

private:
  std::vector<char> nodes_;
  std::vector<std::optional<Interval>> edges_;
};

/// Arclength interval [lo, hi] of a path from p that lies in the region.
inline std::optional<Interval> intersect_path(const Dendrite& w, const Region& r, const Point& p,
                                              const std::vector<Segment>& path)
{
  std::optional<Interval> out;
  auto add = [&](const Rational& s) {
    if (!out) out = Interval{s, s};
    else {
      out->lo = std::min(out->lo, s);
      out->hi = std::max(out->hi, s);
    }
  };
  if (r.contains(w, p)) add(Rational(0));
  Rational offset(0);
  for (const Segment& seg : path) {
    const Rational& len = w.edge(seg.edge).length;
    if (auto c = r.covered_range(w, seg.edge, std::min(seg.t0, seg.t1), std::max(seg.t0, seg.t1))) {
      add(offset + abs(c->lo - seg.t0) * len);
      add(offset + abs(c->hi - seg.t0) * len);
    }
    offset += w.segment_length(seg);
  }
  return out;
}

/// Arclength interval [lo, hi] of the path p..q that lies in the region.
inline std::optional<Interval> intersect_arc(const Dendrite& w, const Region& r, const Point& p, const Point& q)
{
  return intersect_path(w, r, p, w.path(p, q));
}

/// Subcontinuum of a dendrite: the geodesic hull of finitely many points,
/// kept together with its canonical extremes.
class Subdendrite {
public:
  using Space = std::shared_ptr<const Dendrite>;

  /// Hull of a nonempty set of generating points.
  Subdendrite(Space space, std::span<const Point> generators) : space_(std::move(space))
  {
    if (!space_) throw PreconditionError("subdendrite needs an ambient space");
    if (generators.empty()) throw PreconditionError("subdendrite needs at least one point");
    const Dendrite& w = *space_;
    region_ = Region(w);
    for (const Point& p : generators) w.check_point(p);
    region_.mark_point(w, generators.front());
    for (const Point& p : generators.subspan(1)) region_.mark_path(w, generators.front(), p);
    compute_extremes();
  }

  Subdendrite(Space space, std::initializer_list<Point> generators)
      : Subdendrite(std::move(space), std::span<const Point>(generators.begin(), generators.size()))
  {
  }

  /// Wraps a connected region. Throws if it is empty or not connected.
  static Subdendrite from_region(Space space, Region region)
  {
    if (region.empty()) throw PreconditionError("empty region");
    Subdendrite k(std::move(space), std::move(region));
    Subdendrite hull(k.space_, std::span<const Point>(k.extremes_));
    if (!(hull.region_ == k.region_)) throw PreconditionError("region is not connected");
    return k;
  }

  static Subdendrite whole(Space space)
  {
    Region r = Region::whole(*space);
    return Subdendrite(std::move(space), std::move(r));
  }

  static Subdendrite arc(Space space, const Point& p, const Point& q)
  {
    return Subdendrite(std::move(space), {p, q});
  }

  const Dendrite& ambient() const { return *space_; }
  const Space& space() const { return space_; }
  const Region& region() const { return region_; }
  const std::vector<Point>& extremes() const { return extremes_; }

  bool is_degenerate() const { return extremes_.size() == 1 && singleton_; }
  bool contains(const Point& p) const { return region_.contains(*space_, p); }
  bool subset_of(const Subdendrite& o) const
  {
    require_same_space(o);
    return region_.subset_of(o.region_);
  }
  std::size_t degree_at(NodeId v) const { return region_.degree_at(*space_, v); }

  std::vector<NodeId> nodes() const
  {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < space_->node_count(); ++v)
      if (region_.has_node(v)) out.push_back(v);
    return out;
  }

  void require_same_space(const Subdendrite& o) const
  {
    if (space_ != o.space_ && !(*space_ == *o.space_))
      throw PreconditionError("subdendrites live in different ambient spaces");
  }

  friend bool operator==(const Subdendrite& a, const Subdendrite& b)
  {
    return (a.space_ == b.space_ || *a.space_ == *b.space_) && a.region_ == b.region_;
  }

  /// The point of K closest to y; y itself when y is in K.
  Point first_point(const Point& y) const
  {
    const Dendrite& w = *space_;
    w.check_point(y);
    if (contains(y)) return y;
    for (const Segment& seg : w.path(y, extremes_.front())) {
      auto c = region_.covered_range(w, seg.edge, std::min(seg.t0, seg.t1), std::max(seg.t0, seg.t1));
      if (c) return w.edge_point(seg.edge, seg.t1 > seg.t0 ? c->lo : c->hi);
    }
    throw InternalError("first point map found no point of K");
  }

  Rational distance_to(const Point& y) const { return space_->distance(y, first_point(y)); }

  /// Order of p in K, with the ambient target order reported at nodes where K
  /// fills every direction.
  Order order_of(const Point& p) const
  {
    if (!contains(p)) throw PreconditionError("point is not in K");
    const Dendrite& w = *space_;
    if (!p.is_node()) {
      if (std::binary_search(extremes_.begin(), extremes_.end(), p)) return Order(1);
      return Order(2);
    }
    NodeId v = p.node_id();
    std::size_t k = degree_at(v);
    if (k == w.degree(v)) return w.order(v);
    return Order(static_cast<int>(std::max<std::size_t>(1, k)));
  }

  std::vector<Point> endpoints() const { return extremes_; }

  std::vector<Point> branch_points() const
  {
    std::vector<Point> out;
    for (NodeId v : nodes())
      if (order_of(Point::node(v)).is_branching()) out.push_back(Point::node(v));
    return out;
  }

private:
  Subdendrite(Space space, Region region) : space_(std::move(space)), region_(std::move(region))
  {
    compute_extremes();
  }

  void compute_extremes()
  {
    const Dendrite& w = *space_;
    extremes_.clear();
    std::size_t pieces = 0;
    for (NodeId v = 0; v < w.node_count(); ++v) {
      if (!region_.has_node(v)) continue;
      ++pieces;
      if (degree_at(v) <= 1) extremes_.push_back(Point::node(v));
    }
    for (EdgeId e = 0; e < w.edge_count(); ++e) {
      const auto& iv = region_.interval(e);
      if (!iv) continue;
      ++pieces;
      if (iv->lo > 0) extremes_.push_back(w.edge_point(e, iv->lo));
      if (iv->hi < 1 && iv->hi != iv->lo) extremes_.push_back(w.edge_point(e, iv->hi));
    }
    if (extremes_.empty()) throw PreconditionError("empty subdendrite");
    std::sort(extremes_.begin(), extremes_.end());
    singleton_ = pieces == 1 && (extremes_.front().is_node() ? degree_at(extremes_.front().node_id()) == 0
                                                             : region_.interval(w.edge_of(extremes_.front()))->lo ==
                                                                   region_.interval(w.edge_of(extremes_.front()))->hi);
  }

  Space space_;
  Region region_;
  std::vector<Point> extremes_;
  bool singleton_ = false;
};

} // namespace dendrolab
