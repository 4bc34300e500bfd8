#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "dendrolab/subdendrite.hpp"

namespace dendrolab {

/// max over p in A of d(p, B). Distance to a subtree is convex along arcs, so
/// the maximum sits at a node of A or at an extreme of A.
inline Rational directed_hausdorff(const Subdendrite& a, const Subdendrite& b)
{
  a.require_same_space(b);
  Rational best(0);
  for (NodeId v : a.nodes()) best = std::max(best, b.distance_to(Point::node(v)));
  for (const Point& p : a.extremes()) best = std::max(best, b.distance_to(p));
  return best;
}

inline Rational hausdorff(const Subdendrite& a, const Subdendrite& b)
{
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

/// Hausdorff distance between two finite families of subdendrites.
inline Rational hausdorff2(std::span<const Subdendrite> xs, std::span<const Subdendrite> ys)
{
  if (xs.empty() || ys.empty()) throw PreconditionError("hyperspace distance needs nonempty families");
  auto directed = [](std::span<const Subdendrite> from, std::span<const Subdendrite> to) {
    Rational worst(0);
    for (const Subdendrite& x : from) {
      Rational best = hausdorff(x, to.front());
      for (const Subdendrite& y : to.subspan(1)) {
        if (best == 0) break;
        best = std::min(best, hausdorff(x, y));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(xs, ys), directed(ys, xs));
}

struct Ball {
  Point center;
  Rational radius;
};

/// Vietoris basic open set <U_1, ..., U_n> built from open balls.
struct VietorisBasic {
  std::vector<Ball> opens;
};

namespace detail {

struct ParamRange {
  Rational lo;
  bool lo_closed;
  Rational hi;
  bool hi_closed;

  bool contains(const Rational& t) const
  {
    bool above = lo_closed ? t >= lo : t > lo;
    bool below = hi_closed ? t <= hi : t < hi;
    return above && below;
  }
};

/// Parameters of edge e inside the open ball, as up to two ranges.
inline std::vector<ParamRange> ball_on_edge(const Dendrite& w, const Ball& ball, EdgeId e)
{
  const auto& ed = w.edge(e);
  const Rational& len = ed.length;
  std::vector<ParamRange> out;
  const Point& c = ball.center;
  if (!c.is_node() && w.edge_of(c) == e) {
    Rational reach = ball.radius / len;
    Rational lo = c.t() - reach;
    Rational hi = c.t() + reach;
    bool lo_closed = lo < 0, hi_closed = hi > 1;
    out.push_back({std::max(lo, Rational(0)), lo_closed, std::min(hi, Rational(1)), hi_closed});
    return out;
  }
  // Center off the open edge: the arc to x_t enters through u or v.
  Rational from_u = (ball.radius - w.distance(c, Point::node(ed.u))) / len;
  Rational from_v = (ball.radius - w.distance(c, Point::node(ed.v))) / len;
  if (from_u > 0) out.push_back({Rational(0), true, std::min(from_u, Rational(1)), from_u > 1});
  if (from_v > 0) {
    Rational lo = 1 - from_v;
    out.push_back({std::max(lo, Rational(0)), lo < 0, Rational(1), true});
  }
  return out;
}

inline bool covered(const std::vector<ParamRange>& ranges, const Rational& lo, const Rational& hi)
{
  std::vector<Rational> marks{lo, hi};
  for (const auto& r : ranges) {
    for (const Rational* t : {&r.lo, &r.hi})
      if (*t > lo && *t < hi) marks.push_back(*t);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  auto hit = [&](const Rational& t) {
    return std::any_of(ranges.begin(), ranges.end(), [&](const ParamRange& r) { return r.contains(t); });
  };
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (!hit(marks[i])) return false;
    if (i + 1 < marks.size() && !hit((marks[i] + marks[i + 1]) / 2)) return false;
  }
  return true;
}

} // namespace detail

/// K lies in the union of the opens and meets each of them.
inline bool vietoris_member(const Subdendrite& k, const VietorisBasic& v)
{
  if (v.opens.empty()) throw PreconditionError("Vietoris basic set needs at least one open");
  const Dendrite& w = k.ambient();
  for (const Ball& b : v.opens) {
    w.check_point(b.center);
    if (b.radius <= 0) throw PreconditionError("ball radii must be positive");
  }
  for (const Ball& b : v.opens)
    if (!(k.distance_to(b.center) < b.radius)) return false;

  for (NodeId n : k.nodes()) {
    bool in = std::any_of(v.opens.begin(), v.opens.end(),
                          [&](const Ball& b) { return w.distance(b.center, Point::node(n)) < b.radius; });
    if (!in) return false;
  }
  for (EdgeId e = 0; e < w.edge_count(); ++e) {
    const auto& iv = k.region().interval(e);
    if (!iv) continue;
    std::vector<detail::ParamRange> ranges;
    for (const Ball& b : v.opens) {
      auto part = detail::ball_on_edge(w, b, e);
      ranges.insert(ranges.end(), part.begin(), part.end());
    }
    if (!detail::covered(ranges, iv->lo, iv->hi)) return false;
  }
  return true;
}

} // namespace dendrolab
