#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "dendrolab/nerve.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace dendrolab;
using fixtures::q;

namespace {

const Rational kGrid(1, 8);

using gen::random_graph;
using gen::unit_cycle;

GraphPoint random_grid_point(Rng& rng, const MetricGraph& g)
{
  if (g.edge_count() == 0 || rng.coin()) return GraphPoint::at_node(rng.below(g.node_count()));
  EdgeId e = rng.below(g.edge_count());
  long steps = numerator(g.edge(e).length / kGrid).convert_to<long>();
  return GraphPoint::on_edge(e, kGrid * rng.between(0, steps));
}

Cover random_cover(Rng& rng, const MetricGraph& g)
{
  Cover c;
  std::size_t k = 1 + rng.below(6);
  for (std::size_t i = 0; i < k; ++i) c.opens.push_back({random_grid_point(rng, g), kGrid * rng.between(1, 12)});
  return c;
}

bool has_edge(const MetricGraph& g, NodeId a, NodeId b)
{
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if ((g.edge(e).u == a && g.edge(e).v == b) || (g.edge(e).u == b && g.edge(e).v == a)) return true;
  return false;
}

/// d(x, T) at grid samples; a lower bound for the largest gap.
Rational sampled_gap(const MetricGraph& g, const GraphSubspace& t, const Rational& step)
{
  std::vector<GraphPoint> anchors;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (t.nodes[v]) anchors.push_back(GraphPoint::at_node(v));
  for (const auto& list : t.pieces)
    for (const auto& pc : list) {
      anchors.push_back(GraphPoint::on_edge(pc.edge, pc.lo));
      anchors.push_back(GraphPoint::on_edge(pc.edge, pc.hi));
    }
  oracle::SampledGraph sg(g, step);
  Rational worst(0);
  for (std::size_t x = 0; x < sg.samples.size(); ++x) {
    GraphPoint p = x < g.node_count() ? GraphPoint::at_node(x) : GraphPoint::on_edge(sg.samples[x].edge, sg.samples[x].s);
    if (t.contains(g, p)) continue;
    std::optional<Rational> best;
    for (const auto& a : anchors) {
      auto d = g.distance(p, a);
      if (d && (!best || *d < *best)) best = d;
    }
    worst = std::max(worst, *best);
  }
  return worst;
}

} // namespace

TEST(MetricGraph, DistancesMatchDijkstra)
{
  Rng rng(3);
  for (int c = 0; c < 60; ++c) {
    MetricGraph g = random_graph(rng, 1 + rng.below(6), rng.below(4));
    oracle::SampledGraph sg(g, kGrid);
    for (int k = 0; k < 6; ++k) {
      GraphPoint a = random_grid_point(rng, g), b = random_grid_point(rng, g);
      auto d = sg.from(sg.index(a));
      ASSERT_EQ(*g.distance(a, b), *d[sg.index(b)]);
    }
  }
}

TEST(MetricGraph, EccentricityMatchesSamples)
{
  Rng rng(5);
  for (int c = 0; c < 60; ++c) {
    MetricGraph g = random_graph(rng, 1 + rng.below(6), rng.below(4));
    GraphPoint p = random_grid_point(rng, g);
    // Farthest points sit on the half grid.
    oracle::SampledGraph sg(g, kGrid / 2);
    auto d = sg.from(sg.index(p));
    Rational far(0);
    for (const auto& x : d) far = std::max(far, *x);
    ASSERT_EQ(g.eccentricity(p), far) << "case " << c;
  }
}

TEST(MetricGraph, FromSubdendrite)
{
  auto w = fixtures::y3();
  auto arc = Subdendrite::arc(w, fixtures::n(fixtures::A), w->edge_point(1, q(1, 2)));
  MetricGraph g = MetricGraph::from_subdendrite(arc);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.total_length(), q(3, 2));

  MetricGraph point = MetricGraph::from_subdendrite(Subdendrite(w, {w->edge_point(0, q(1, 3))}));
  EXPECT_EQ(point.node_count(), 1u);
  EXPECT_EQ(point.edge_count(), 0u);

  EXPECT_THROW(MetricGraph(2, {{0, 0, q(1)}}), PreconditionError);
  EXPECT_THROW(MetricGraph(2, {{0, 1, q(0)}}), PreconditionError);
}

TEST(Nerve, PathOfBalls)
{
  MetricGraph g(3, {{0, 1, q(1)}, {1, 2, q(1)}});
  Cover c{{{GraphPoint::at_node(0), q(2, 3)}, {GraphPoint::at_node(1), q(2, 3)}, {GraphPoint::at_node(2), q(2, 3)}}};
  NerveGraph n = nerve(g, c);
  std::vector<std::pair<std::size_t, std::size_t>> want{{0, 1}, {1, 2}};
  EXPECT_EQ(n.edges, want);
  EXPECT_TRUE(is_tree_nerve(n));
  EXPECT_TRUE(covers(g, c));
}

TEST(Nerve, FourCycleOfBalls)
{
  MetricGraph g = unit_cycle(4);
  Cover c;
  for (NodeId v = 0; v < 4; ++v) c.opens.push_back({GraphPoint::at_node(v), q(2, 3)});
  NerveGraph n = nerve(g, c);
  EXPECT_EQ(n.edges.size(), 4u);
  EXPECT_FALSE(is_tree_nerve(n));
  auto cyc = find_cycle(n);
  ASSERT_TRUE(cyc);
  EXPECT_EQ(cyc->size(), 4u);
  EXPECT_TRUE(covers(g, c));

  // Radius exactly half an edge leaves the midpoints out.
  for (auto& b : c.opens) b.radius = q(1, 2);
  EXPECT_FALSE(covers(g, c));
}

TEST(Nerve, SingleBall)
{
  MetricGraph g = unit_cycle(4);
  Cover c{{{GraphPoint::at_node(0), q(3)}}};
  NerveGraph n = nerve(g, c);
  EXPECT_EQ(n.vertices, 1u);
  EXPECT_TRUE(n.edges.empty());
  EXPECT_TRUE(is_tree_nerve(n));
  EXPECT_TRUE(covers(g, c));
}

TEST(Nerve, PermutingTheCoverPermutesTheNerve)
{
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    MetricGraph g = random_graph(rng, 2 + rng.below(5), rng.below(3));
    Cover c = random_cover(rng, g);
    std::vector<std::size_t> perm(c.opens.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    Cover d;
    for (std::size_t i : perm) d.opens.push_back(c.opens[i]);
    std::set<std::pair<std::size_t, std::size_t>> mapped;
    for (auto [a, b] : nerve(g, d).edges) mapped.insert(std::minmax(perm[a], perm[b]));
    std::set<std::pair<std::size_t, std::size_t>> direct;
    for (auto e : nerve(g, c).edges) direct.insert(e);
    ASSERT_EQ(mapped, direct);
  }
}

TEST(Nerve, AgreesWithSampledBalls)
{
  Rng rng(11);
  int meets = 0, gaps = 0;
  for (int k = 0; k < 300; ++k) {
    MetricGraph g = random_graph(rng, 1 + rng.below(6), rng.below(4));
    Cover c = random_cover(rng, g);
    auto n = nerve(g, c);
    ASSERT_EQ(n.edges, oracle::sampled_nerve(g, c, kGrid)) << "case " << k;
    bool cov = covers(g, c);
    ASSERT_EQ(cov, oracle::sampled_covers(g, c, kGrid)) << "case " << k;
    meets += !n.edges.empty();
    gaps += !cov;
  }
  EXPECT_GT(meets, 50);
  EXPECT_GT(gaps, 50);
}

TEST(TreeLike, TriodAtOneHalf)
{
  auto w = fixtures::y3();
  MetricGraph g = MetricGraph::from_dendrite(*w);
  auto r = tree_like_check(g, q(1, 2));
  EXPECT_TRUE(r.tree_like);
  EXPECT_TRUE(r.obstruction.empty());
  EXPECT_TRUE(covers(g, r.cover));
  EXPECT_LT(r.cover.mesh_bound(), q(1, 2));
  EXPECT_TRUE(is_tree_nerve(r.nerve));
}

TEST(TreeLike, UnitFourCycle)
{
  MetricGraph g = unit_cycle(4);
  auto fine = tree_like_check(g, q(1, 2));
  EXPECT_FALSE(fine.tree_like);
  EXPECT_EQ(fine.obstruction, (std::vector<NodeId>{0, 1, 2, 3}));

  auto coarse = tree_like_check(g, q(10));
  EXPECT_TRUE(coarse.tree_like);
  EXPECT_EQ(coarse.cover.opens.size(), 1u);
  EXPECT_LT(coarse.cover.mesh_bound(), q(10));
  EXPECT_TRUE(covers(g, coarse.cover));
}

TEST(TreeLike, CanonicalNerveIsTheSubdividedGraph)
{
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    MetricGraph g = random_graph(rng, 1 + rng.below(7), rng.below(4));
    Rational eps = Rational(1, 1 + static_cast<long>(rng.below(8)));
    Cover c = canonical_cover(g, eps / 4);
    NerveGraph n = nerve(g, c);
    ASSERT_EQ(n.vertices - g.node_count() + g.edge_count(), n.edges.size()) << "case " << k;
    ASSERT_TRUE(covers(g, c));
    ASSERT_LE(c.mesh_bound(), eps / 2);
  }
}

TEST(TreeLike, EverySubtreeOfBuiltTrees)
{
  std::vector<Rational> scales{q(1, 2), q(1, 4), q(1, 8)};
  std::size_t checked = 0;
  auto check = [&](const Subdendrite& k) {
    MetricGraph g = MetricGraph::from_subdendrite(k);
    for (const Rational& eps : scales) {
      auto r = tree_like_check(g, eps);
      ASSERT_TRUE(r.tree_like);
      ASSERT_TRUE(is_tree_nerve(r.nerve));
      ASSERT_TRUE(covers(g, r.cover));
      ASSERT_LT(r.cover.mesh_bound(), eps);
      ++checked;
    }
  };
  Rng rng(17);
  for (int t = 0; t < 20; ++t)
    for (const auto& k : gen::node_subset_hulls(gen::random_tree(rng, 2 + rng.below(4))))
      check(k);
  auto w3 = gen::wm({Order(3)}, 2);
  for (int t = 0; t < 40; ++t) check(gen::random_subtree(rng, w3));
  check(Subdendrite::whole(w3));
  EXPECT_GT(checked, 500u);
}

TEST(TreeLike, CyclesShowUpAsObstructions)
{
  Rng rng(19);
  int obstructed = 0;
  for (int k = 0; k < 150; ++k) {
    MetricGraph g = random_graph(rng, 3 + rng.below(4), 1 + rng.below(3));
    bool cyclic = g.edge_count() >= g.node_count();
    auto r = tree_like_check(g, q(1, 4));
    ASSERT_EQ(r.tree_like, !cyclic) << "case " << k;
    if (!cyclic) continue;
    ++obstructed;
    const auto& o = r.obstruction;
    ASSERT_GE(o.size(), 2u);
    for (std::size_t i = 0; i < o.size(); ++i) ASSERT_TRUE(has_edge(g, o[i], o[(i + 1) % o.size()]));
  }
  EXPECT_GT(obstructed, 50);
}

TEST(TreeApproximation, RandomConnectedGraphs)
{
  Rng rng(23);
  std::size_t checked = 0;
  for (int k = 0; k < 220; ++k) {
    MetricGraph g = random_graph(rng, 1 + rng.below(6), rng.below(4));
    Rational eps = std::vector<Rational>{q(1), q(1, 2), q(1, 4)}[rng.below(3)];
    GraphSubspace t = tree_approximation(g, eps);
    ASSERT_TRUE(t.is_tree(g)) << "case " << k;
    Rational gap = directed_gap(g, t);
    ASSERT_LT(gap, eps) << "case " << k;
    Rational step = kGrid / 4;
    Rational seen = sampled_gap(g, t, step);
    ASSERT_LE(seen, gap);
    ASSERT_LE(gap - seen, step);
    ++checked;
  }
  EXPECT_GE(checked, 200u);
}

TEST(TreeApproximation, TreesAndPoints)
{
  auto w3 = gen::wm({Order(3)}, 2);
  MetricGraph g = MetricGraph::from_dendrite(*w3);
  GraphSubspace t = tree_approximation(g, q(1, 4));
  EXPECT_TRUE(t.is_tree(g));
  EXPECT_LT(directed_gap(g, t), q(1, 4));

  MetricGraph point(1, {});
  GraphSubspace p = tree_approximation(point, q(1));
  EXPECT_TRUE(p.is_tree(point));
  EXPECT_EQ(directed_gap(point, p), 0);

  // A cycle loses a piece of one edge.
  MetricGraph c = unit_cycle(3);
  GraphSubspace tc = tree_approximation(c, q(1, 2));
  EXPECT_TRUE(tc.is_tree(c));
  EXPECT_GT(directed_gap(c, tc), 0);
  EXPECT_LT(directed_gap(c, tc), q(1, 2));
}

TEST(TreeApproximation, Preconditions)
{
  MetricGraph split(2, {});
  EXPECT_THROW(tree_approximation(split, q(1)), PreconditionError);
  EXPECT_THROW(tree_like_check(split, q(1)), PreconditionError);
  EXPECT_THROW(tree_like_check(unit_cycle(3), q(0)), PreconditionError);
}
