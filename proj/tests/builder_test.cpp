#include <gtest/gtest.h>

#include "dendrolab/builder.hpp"
#include "support/fixtures.hpp"

using namespace dendrolab;
using fixtures::q;

namespace {

RefinementSchedule schedule(std::vector<Order> orders, int depth)
{
  RefinementSchedule s;
  s.orders = std::move(orders);
  s.depth = depth;
  return s;
}

// Each level adds |M| nodes plus their sprouts on every existing edge.
std::size_t count_nodes(const std::vector<Order>& orders, int depth)
{
  std::size_t nodes = 2, edges = 1;
  for (int level = 1; level <= depth; ++level) {
    std::size_t per_edge = orders.size();
    for (Order m : orders) per_edge += m.is_omega() ? level + 1 : m.value() - 2;
    nodes += edges * per_edge;
    edges = nodes - 1;
  }
  return nodes;
}

} // namespace

TEST(BuildWm, NodeCounts)
{
  const std::size_t w3[] = {2, 4, 10, 28};
  for (int d = 0; d <= 3; ++d) {
    EXPECT_EQ(build_wm(schedule({Order(3)}, d)).node_count(), w3[d]);
    EXPECT_EQ(count_nodes({Order(3)}, d), w3[d]);
  }
  EXPECT_EQ(build_wm(schedule({Order(3), Order::omega()}, 3)).node_count(), 337u);
  EXPECT_EQ(count_nodes({Order(3), Order::omega()}, 3), 337u);
  EXPECT_EQ(build_wm(schedule({Order(4), Order(5)}, 2)).node_count(), count_nodes({Order(4), Order(5)}, 2));
}

TEST(BuildWm, DepthZeroIsUnitArc)
{
  auto w = build_wm(schedule({Order(3)}, 0));
  ASSERT_EQ(w.edge_count(), 1u);
  EXPECT_EQ(w.edge(0).length, 1);
  EXPECT_EQ(w.depth_tag(), 0);
}

TEST(BuildWm, OrdersMatchDegrees)
{
  for (const auto& orders : std::vector<std::vector<Order>>{{Order(3)}, {Order(3), Order(4)}, {Order::omega()}}) {
    auto w = build_wm(schedule(orders, 3));
    for (NodeId v = 0; v < w.node_count(); ++v) {
      if (w.order(v).is_omega()) {
        EXPECT_GE(w.degree(v), 3u);
      } else {
        EXPECT_EQ(w.degree(v), static_cast<std::size_t>(w.order(v).value()));
      }
    }
  }
}

TEST(BuildWm, OmegaSproutsGrowWithLevel)
{
  auto w = build_wm(schedule({Order::omega()}, 3));
  std::size_t max_degree = 0;
  for (NodeId v = 0; v < w.node_count(); ++v) max_degree = std::max(max_degree, w.degree(v));
  EXPECT_EQ(max_degree, 6u); // created at level 3: 2 arc edges + 4 sprouts
}

TEST(BuildWm, LevelsEmbedIsometrically)
{
  auto s = schedule({Order(3), Order::omega()}, 0);
  Dendrite prev = build_wm(s);
  for (int d = 1; d <= 3; ++d) {
    s.depth = d;
    Dendrite next = build_wm(s);
    for (NodeId u = 0; u < prev.node_count(); ++u) {
      EXPECT_EQ(next.order(u), prev.order(u));
      for (NodeId v = u + 1; v < prev.node_count(); ++v) EXPECT_EQ(next.node_distance(u, v), prev.node_distance(u, v));
    }
    EXPECT_LE(next.mesh(), prev.mesh());
    EXPECT_LT(next.max_edge_length(), prev.max_edge_length());
    prev = std::move(next);
  }
}

TEST(BuildWm, BranchingNodesGetDense)
{
  // Every point of the depth-d tree is within the mesh of a branching node of depth d+1.
  auto s = schedule({Order(3)}, 2);
  Dendrite coarse = build_wm(s);
  s.depth = 3;
  Dendrite fine = build_wm(s);
  for (EdgeId e = 0; e < coarse.edge_count(); ++e) {
    for (int i = 0; i <= 8; ++i) {
      Point p = coarse.edge_point(e, Rational(i, 8));
      Point pf = p.is_node() ? p : Point();
      if (!p.is_node()) {
        // Locate p in the fine tree along the path between the coarse ends.
        const auto& ed = coarse.edge(e);
        pf = fine.point_along(Point::node(ed.u), Point::node(ed.v), ed.length * Rational(i, 8));
      }
      Rational best = coarse.max_edge_length();
      for (NodeId b = 0; b < fine.node_count(); ++b)
        if (fine.is_branch_node(b)) best = std::min(best, fine.distance(pf, Point::node(b)));
      EXPECT_LE(best, fine.max_edge_length());
    }
  }
}

TEST(BuildWm, RejectsBadSchedules)
{
  EXPECT_THROW(build_wm(schedule({}, 1)), PreconditionError);
  EXPECT_THROW(build_wm(schedule({Order(2)}, 1)), PreconditionError);
  EXPECT_THROW(build_wm(schedule({Order(3)}, -1)), PreconditionError);
  auto s = schedule({Order(3)}, 1);
  s.ratio = q(1);
  EXPECT_THROW(build_wm(s), PreconditionError);
  s.ratio = q(1, 2);
  s.count = 0;
  EXPECT_THROW(build_wm(s), PreconditionError);
}

TEST(InverseLimit, SinglePairStageTwo)
{
  BondingFunction f{{{q(1, 2), q(3, 4)}}};
  auto st = inverse_limit_stage_detailed(f, q(1), 2);
  const Dendrite& w = st.tree;
  ASSERT_EQ(w.node_count(), 4u);
  std::vector<Rational> coords;
  for (const auto& ni : st.info) coords.push_back(ni.coord);
  EXPECT_EQ(coords, (std::vector<Rational>{q(0), q(1, 2), q(1), q(3, 4)}));
  EXPECT_TRUE(w.order(1).is_omega());
  EXPECT_EQ(w.order(0), Order(1));
  EXPECT_EQ(w.order(2), Order(1));
  EXPECT_EQ(w.order(3), Order(1));
  EXPECT_EQ(w.node_distance(0, 1), q(1, 2));
  EXPECT_EQ(w.node_distance(1, 2), q(1, 2));
  EXPECT_EQ(w.node_distance(1, 3), q(1, 4));
}

TEST(InverseLimit, BeforeTheBranchValueIsASegment)
{
  BondingFunction f{{{q(1, 2), q(3, 4)}}};
  for (int k : {1, 2, 4}) {
    auto w = inverse_limit_stage(f, q(1, 2), k);
    ASSERT_EQ(w.node_count(), 2u);
    EXPECT_EQ(w.node_distance(0, 1), q(1, 2));
  }
  auto empty = inverse_limit_stage(BondingFunction{}, q(2, 3), 3);
  ASSERT_EQ(empty.node_count(), 2u);
  EXPECT_EQ(empty.node_distance(0, 1), q(2, 3));
}

TEST(InverseLimit, RejectsBadInput)
{
  EXPECT_THROW(inverse_limit_stage(BondingFunction{{{q(1, 2), q(1, 2)}}}, q(1), 2), PreconditionError);
  EXPECT_THROW(inverse_limit_stage(BondingFunction{{{q(0), q(1, 2)}}}, q(1), 2), PreconditionError);
  EXPECT_THROW(inverse_limit_stage(BondingFunction{{{q(1, 4), q(1, 2)}, {q(1, 4), q(3, 4)}}}, q(1), 2),
               PreconditionError);
  EXPECT_THROW(inverse_limit_stage(BondingFunction{}, q(0), 2), PreconditionError);
  EXPECT_THROW(inverse_limit_stage(BondingFunction{}, q(1), 0), PreconditionError);
}

TEST(InverseLimit, RationalBranchEndpoints)
{
  BondingFunction f{{{q(1, 4), q(1, 2)}, {q(1, 2), q(3, 4)}, {q(3, 4), q(1)}}};
  EXPECT_TRUE(rational_branch_endpoints(f, q(1), 1).empty());
  auto st = inverse_limit_stage_detailed(f, q(1), 2);
  auto tips = rational_branch_endpoints(f, q(1), 2);
  ASSERT_EQ(tips.size(), 2u);
  EXPECT_EQ(st.info[tips[0].node_id()].coord, q(1, 2));
  EXPECT_EQ(st.info[tips[1].node_id()].coord, q(3, 4));
  // The tip at 1 has no pair starting there, so it stays an endpoint.
  bool plain_tip = false;
  for (NodeId v = 0; v < st.tree.node_count(); ++v)
    plain_tip = plain_tip || (st.info[v].pair && st.info[v].coord == 1 && st.tree.order(v) == Order(1));
  EXPECT_TRUE(plain_tip);
  // Stage 3 grows new segments from those tips.
  auto deeper = inverse_limit_stage(f, q(1), 3);
  EXPECT_GT(deeper.node_count(), st.tree.node_count());
}

TEST(InverseLimit, StagesEmbed)
{
  BondingFunction f{{{q(1, 4), q(1, 2)}, {q(1, 2), q(3, 4)}, {q(3, 4), q(1)}}};
  auto a = inverse_limit_stage_detailed(f, q(1), 2);
  auto b = inverse_limit_stage_detailed(f, q(1), 3);
  for (NodeId u = 0; u < a.tree.node_count(); ++u) {
    EXPECT_EQ(a.info[u].coord, b.info[u].coord);
    for (NodeId v = u + 1; v < a.tree.node_count(); ++v)
      EXPECT_EQ(a.tree.node_distance(u, v), b.tree.node_distance(u, v));
  }
}

TEST(GammaRegion, GrowsToTheWholeStage)
{
  BondingFunction f{{{q(1, 4), q(1, 2)}, {q(1, 2), q(3, 4)}, {q(3, 4), q(1)}}};
  auto st = inverse_limit_stage_detailed(f, q(1), 3);
  auto space = std::make_shared<const Dendrite>(st.tree);
  EXPECT_EQ(gamma_region(st, f, q(1)), Region::whole(st.tree));

  auto early = Subdendrite::from_region(space, gamma_region(st, f, q(1, 8)));
  EXPECT_EQ(early, Subdendrite(space, {Point::node(0), Point::on_edge(0, 1, q(1, 2))}));

  // At s the segment hung from 1/4 reaches 1/4 + (s - 1/4)/3.
  auto mid = Subdendrite::from_region(space, gamma_region(st, f, q(1, 2)));
  EXPECT_TRUE(mid.contains(Point::node(2)));
  Rational reach = q(1, 4) + (q(1, 2) - q(1, 4)) / 3;
  bool found = false;
  for (const Point& p : mid.extremes()) {
    if (p.is_node()) continue;
    const auto& ni = st.info[p.u()];
    if (ni.coord == q(1, 4)) found = found || ni.coord + p.t() * (st.info[p.v()].coord - ni.coord) == reach;
  }
  EXPECT_TRUE(found);

  Region prev(st.tree);
  for (int i = 1; i <= 16; ++i) {
    Rational s(i, 16);
    Region r = gamma_region(st, f, s);
    EXPECT_TRUE(prev.subset_of(r));
    EXPECT_FALSE(r == prev);
    EXPECT_NO_THROW(Subdendrite::from_region(space, r));
    prev = r;
  }
}
