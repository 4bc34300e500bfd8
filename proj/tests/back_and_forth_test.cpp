#include <gtest/gtest.h>

#include <chrono>

#include "dendrolab/back_and_forth.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace dendrolab;
using namespace fixtures;

namespace {

using scenario::branching_count;
using scenario::chain_problem;
using scenario::repaired_arcs;
using scenario::subcontinua_problem;
using scenario::succeeds;

std::vector<NodeId> branching_nodes(const Dendrite& w)
{
  std::vector<NodeId> out;
  for (NodeId v = 0; v < w.node_count(); ++v)
    if (w.is_branch_node(v)) out.push_back(v);
  return out;
}

const std::vector<BondingFunction> kClosedPairs{
    BondingFunction{{{q(1, 4), q(1, 2)}, {q(1, 2), q(3, 4)}, {q(3, 4), q(1)}}},
    BondingFunction{{{q(1, 2), q(3, 4)}, {q(5, 8), q(7, 8)}, {q(3, 4), q(1)}}},
    BondingFunction{{{q(1, 3), q(2, 3)}, {q(2, 3), q(1)}}},
};

std::vector<Rational> grid(int steps) { return scenario::uniform_grid(steps); }

} // namespace

TEST(BfSubcontinua, EqualSetsGiveTheIdentity)
{
  auto w = gen::wm({Order(3)}, 3);
  auto k = perturb_to_full(Subdendrite::arc(w, n(0), n(1)), w->mesh() / 2);
  ASSERT_TRUE(is_full(k));
  auto iso = bf_subcontinua(k, k, 12);
  EXPECT_EQ(iso.pairs.size(), std::min<std::size_t>(12, branching_count(*w)));
  for (const auto& [s, t] : iso.pairs) EXPECT_EQ(s, t);
  EXPECT_TRUE(check_invariants(iso).ok());
  EXPECT_EQ(extend_and_verify(iso).max_defect, 0);
}

TEST(BfSubcontinua, Preconditions)
{
  auto w = gen::wm({Order(3)}, 2);
  auto good = repaired_arcs(w).front();
  // An arc straight through a branching node misses its third direction.
  auto through = Subdendrite::arc(w, n(0), n(1));
  ASSERT_FALSE(is_full(through));
  EXPECT_THROW(bf_subcontinua(good, through, 4), PreconditionError);
  EXPECT_THROW(bf_subcontinua(through, good, 4), PreconditionError);
  EXPECT_THROW(bf_subcontinua(good, Subdendrite::whole(w), 4), PreconditionError);
  auto other = gen::wm({Order(3)}, 1);
  EXPECT_THROW(bf_subcontinua(good, Subdendrite::whole(other), 4), PreconditionError);
}

TEST(BfSubcontinua, TwoRepairedArcsAtDepthTwo)
{
  auto w = gen::wm({Order(3)}, 2);
  auto ks = repaired_arcs(w);
  ASSERT_GE(ks.size(), 2u);
  bool found = false;
  for (std::size_t i = 0; i < ks.size() && !found; ++i)
    for (std::size_t j = 0; j < ks.size() && !found; ++j) {
      if (i == j || !succeeds([&] { return bf_subcontinua(ks[i], ks[j], 4); })) continue;
      found = true;
      auto iso = bf_subcontinua(ks[i], ks[j], 4);
      EXPECT_GE(iso.pairs.size(), 4u);
      EXPECT_TRUE(check_invariants(iso).ok());
      EXPECT_TRUE(oracle::iso_exists(subcontinua_problem(ks[i], ks[j], 4)));
      EXPECT_EQ(extend_and_verify(iso).max_defect, 0);
    }
  EXPECT_TRUE(found);
}

TEST(BfSubcontinua, AgreesWithExhaustiveSearch)
{
  auto w = gen::wm({Order(3)}, 2);
  ASSERT_LE(branching_count(*w), 8u);
  auto ks = repaired_arcs(w);
  std::size_t yes = 0, no = 0;
  for (std::size_t steps : {2u, 5u})
    for (const auto& k1 : ks)
      for (const auto& k2 : ks) {
        bool got = succeeds([&] { return bf_subcontinua(k1, k2, steps); });
        ASSERT_EQ(got, oracle::iso_exists(subcontinua_problem(k1, k2, steps)));
        (got ? yes : no) += 1;
      }
  EXPECT_GT(yes, 0u);
  EXPECT_GT(no, 0u);
}

TEST(BfSubcontinua, AgreesWithExhaustiveSearchOnRandomTrees)
{
  Rng rng(41);
  std::size_t yes = 0, no = 0, cases = 0;
  while (cases < 150) {
    auto w = gen::random_tree(rng, 6 + rng.below(8), true);
    if (branching_count(*w) == 0 || branching_count(*w) > 8) continue;
    auto k1 = gen::random_subtree(rng, w);
    auto k2 = gen::random_subtree(rng, w);
    std::size_t steps = 1 + rng.below(6);
    bool got = succeeds([&] { return bf_search_subcontinua(k1, k2, steps); });
    ASSERT_EQ(got, oracle::iso_exists(subcontinua_problem(k1, k2, steps))) << "case " << cases;
    (got ? yes : no) += 1;
    ++cases;
  }
  EXPECT_GT(yes, 0u);
  EXPECT_GT(no, 0u);
}

TEST(BfSubcontinua, ReturnedIsosExtendWithoutDefect)
{
  auto w = gen::wm({Order(3)}, 2);
  auto ks = repaired_arcs(w);
  std::size_t checked = 0;
  for (const auto& k1 : ks)
    for (const auto& k2 : ks) {
      PartialIso iso;
      try {
        iso = bf_subcontinua(k1, k2, 6);
      } catch (const RefineNeeded&) {
        continue;
      }
      ASSERT_TRUE(check_invariants(iso).ok());
      auto rep = extend_and_verify(iso);
      ASSERT_EQ(rep.defects.size(), 1u);
      EXPECT_EQ(rep.max_defect, 0);
      ++checked;
    }
  EXPECT_GT(checked, 100u);
}

TEST(BfSubcontinua, FailureCarriesTheStep)
{
  auto w = gen::wm({Order(3)}, 2);
  auto ks = repaired_arcs(w);
  for (const auto& k1 : ks)
    for (const auto& k2 : ks) {
      try {
        bf_subcontinua(k1, k2, 8);
      } catch (const RefineNeeded& e) {
        EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
        return;
      }
    }
  FAIL() << "expected at least one refinement request";
}

TEST(BfSubcontinua, SearchBudget)
{
  auto w = gen::wm({Order(3)}, 3);
  auto k = perturb_to_full(Subdendrite::arc(w, n(0), n(1)), w->mesh() / 2);
  EXPECT_THROW(bf_search_subcontinua(k, k, 12, 3), RefineNeeded);
}

TEST(BackAndForth, BackStepsCoverTheFirstTargets)
{
  auto w = gen::wm({Order(3)}, 3);
  auto nodes = branching_nodes(*w);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto c1 = generate_generic_chain(w, seed, w->mesh());
    auto c2 = generate_generic_chain(w, seed + 100, w->mesh());
    for (std::size_t half : {1u, 2u, 3u}) {
      PartialIso iso;
      try {
        iso = bf_chains(c1, c2, 2 * half);
      } catch (const RefineNeeded&) {
        continue;
      }
      for (std::size_t i = 0; i < half; ++i) {
        EXPECT_TRUE(iso.image(nodes[i]).has_value());
        EXPECT_TRUE(iso.preimage(nodes[i]).has_value());
      }
    }
  }
}

TEST(BackAndForth, MeetsWithTheBaseStayInTheDomain)
{
  auto w = gen::wm({Order(3)}, 3);
  auto c1 = generate_generic_chain(w, 1, w->mesh());
  auto c2 = generate_generic_chain(w, 11, w->mesh());
  auto iso = bf_chains(c1, c2, 12);
  for (const auto& [a, fa] : iso.pairs)
    for (const auto& [b, fb] : iso.pairs) {
      if (a == b) continue;
      Point m = Subdendrite(w, {iso.source_base, n(a)}).first_point(n(b));
      Point fm = Subdendrite(w, {iso.target_base, n(fa)}).first_point(n(fb));
      if (m == iso.source_base) {
        EXPECT_EQ(fm, iso.target_base);
        continue;
      }
      ASSERT_TRUE(m.is_node());
      auto img = iso.image(m.node_id());
      ASSERT_TRUE(img.has_value());
      EXPECT_EQ(fm, n(*img));
    }
}

TEST(BfChains, IdentityOnEqualChains)
{
  auto w = gen::wm({Order(3)}, 3);
  auto c = generate_generic_chain(w, 3, w->mesh());
  auto iso = bf_chains(c, c, 12);
  for (const auto& [s, t] : iso.pairs) EXPECT_EQ(s, t);
  auto rep = extend_and_verify(iso);
  EXPECT_EQ(rep.max_defect, 0);
}

TEST(BfChains, GeneratedChainsAtDepthThree)
{
  auto w = gen::wm({Order(3)}, 3);
  std::size_t done = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c1 = generate_generic_chain(w, seed, w->mesh());
    auto c2 = generate_generic_chain(w, seed + 50, w->mesh());
    auto iso = bf_chains(c1, c2, 5);
    EXPECT_GE(iso.pairs.size(), 5u);
    auto bad = check_invariants(iso);
    EXPECT_TRUE(bad.ok()) << (bad.ok() ? "" : bad.messages.front());
    auto rep = extend_and_verify(iso);
    EXPECT_EQ(rep.max_defect, 0) << "seed " << seed;
    EXPECT_FALSE(rep.defects.empty());
    ++done;
  }
  EXPECT_EQ(done, 10u);
}

TEST(BfChains, AgreesWithExhaustiveSearch)
{
  auto w = gen::wm({Order(3)}, 2);
  Rng rng(17);
  std::size_t yes = 0, no = 0;
  for (int i = 0; i < 120; ++i) {
    Chain c1 = gen::random_chain(rng, w);
    Chain c2 = gen::random_chain(rng, w);
    std::size_t steps = 1 + rng.below(5);
    bool got = succeeds([&] { return bf_search_chains(c1, c2, steps); });
    ASSERT_EQ(got, oracle::iso_exists(chain_problem(c1, c2, steps))) << "case " << i;
    (got ? yes : no) += 1;
  }
  EXPECT_GT(yes, 0u);
  EXPECT_GT(no, 0u);
}

TEST(BfChains, AgreesWithExhaustiveSearchOnRandomTrees)
{
  Rng rng(23);
  std::size_t yes = 0, no = 0, cases = 0;
  while (cases < 120) {
    auto w = gen::random_tree(rng, 6 + rng.below(7), true);
    if (branching_count(*w) == 0 || branching_count(*w) > 8) continue;
    Chain c1 = gen::random_chain(rng, w);
    Chain c2 = gen::random_chain(rng, w);
    std::size_t steps = 1 + rng.below(6);
    bool got = succeeds([&] { return bf_search_chains(c1, c2, steps); });
    ASSERT_EQ(got, oracle::iso_exists(chain_problem(c1, c2, steps))) << "case " << cases;
    (got ? yes : no) += 1;
    ++cases;
  }
  EXPECT_GT(yes, 0u);
  EXPECT_GT(no, 0u);
}

TEST(BfChains, GeneratedChainsAgreeWithExhaustiveSearch)
{
  auto w = gen::wm({Order(3)}, 2);
  std::vector<Chain> chains;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    try {
      chains.push_back(generate_generic_chain(w, seed, w->mesh()));
    } catch (const RefineNeeded&) {
    }
  }
  ASSERT_GE(chains.size(), 2u);
  for (const auto& c1 : chains)
    for (const auto& c2 : chains)
      for (std::size_t steps : {3u, 5u}) {
        bool got = succeeds([&] { return bf_chains(c1, c2, steps); });
        EXPECT_EQ(got, oracle::iso_exists(chain_problem(c1, c2, steps)));
      }
}

TEST(BfChains, GammaChainIsRejected)
{
  auto w = gen::wm({Order(3)}, 3);
  auto c = generate_generic_chain(w, 1, w->mesh());
  auto g = gamma_chain(kClosedPairs[0], 3, grid(12));
  EXPECT_THROW(bf_chains(c, g, 5), PreconditionError);
  EXPECT_THROW(bf_chains(g, c, 5), PreconditionError);
}

TEST(BfChains, TwelveStepsAreQuick)
{
  auto w3 = gen::wm({Order(3)}, 3);
  auto k = perturb_to_full(Subdendrite::arc(w3, n(0), n(1)), w3->mesh() / 2);
  auto c1 = generate_generic_chain(w3, 1, w3->mesh());
  auto c2 = generate_generic_chain(w3, 11, w3->mesh());
  for (const auto& run : std::vector<std::function<void()>>{[&] { bf_subcontinua(k, k, 12); },
                                                             [&] { bf_chains(c1, c2, 12); }}) {
    auto t0 = std::chrono::steady_clock::now();
    run();
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
  }
}

TEST(BfChainsOmega, EqualGammaChains)
{
  for (std::size_t i : {0u, 2u}) {
    auto g = gamma_chain(kClosedPairs[i], 3, grid(24));
    ASSERT_TRUE(check_omega_conditions(g, g.ambient().mesh()).passes());
    auto iso = bf_chains_omega(g, g, 12);
    for (const auto& [s, t] : iso.pairs) EXPECT_EQ(s, t);
    EXPECT_EQ(extend_and_verify(iso).max_defect, 0);
  }
}

TEST(BfChainsOmega, DifferentPairLists)
{
  auto g1 = gamma_chain(kClosedPairs[0], 3, grid(12));
  auto g2 = gamma_chain(kClosedPairs[2], 3, grid(12));
  ASSERT_EQ(g1.size(), g2.size());
  auto iso = bf_chains_omega(g1, g2, 2);
  EXPECT_TRUE(check_invariants(iso).ok());
  EXPECT_EQ(extend_and_verify(iso).max_defect, 0);
  EXPECT_TRUE(oracle::iso_exists(chain_problem(g1, g2, 2)));
  for (std::size_t steps = 1; steps <= 6; ++steps)
    EXPECT_EQ(succeeds([&] { return bf_chains_omega(g1, g2, steps); }),
              oracle::iso_exists(chain_problem(g1, g2, steps)));
}

TEST(BfChainsOmega, SparseBranchEndpointsAreRejected)
{
  // The second list leaves the root end of its middle elements without
  // branching endpoints at this depth.
  auto g1 = gamma_chain(kClosedPairs[0], 3, grid(12));
  auto g2 = gamma_chain(kClosedPairs[1], 3, grid(12));
  EXPECT_FALSE(check_omega_conditions(g2, g2.ambient().mesh()).branch_endpoints_ok);
  EXPECT_THROW(bf_chains_omega(g1, g2, 2), PreconditionError);
}

TEST(ExtendAndVerify, IdentityHasNoDefect)
{
  auto w = gen::wm({Order(3)}, 2);
  auto k = repaired_arcs(w).front();
  PartialIso iso;
  iso.source_space = iso.target_space = w;
  iso.source_base = iso.target_base = detail::subcontinuum_base(k);
  iso.source_sets = iso.target_sets = {k};
  for (NodeId v : branching_nodes(*w)) iso.pairs.emplace_back(v, v);
  EXPECT_TRUE(check_invariants(iso).ok());
  auto rep = extend_and_verify(iso);
  EXPECT_EQ(rep.tree_edges, iso.pairs.size());
  EXPECT_EQ(rep.max_defect, 0);
}

TEST(ExtendAndVerify, SwappedPairIsCaught)
{
  auto w = gen::wm({Order(3)}, 3);
  auto c1 = generate_generic_chain(w, 1, w->mesh());
  auto c2 = generate_generic_chain(w, 11, w->mesh());
  auto iso = bf_chains(c1, c2, 12);
  ASSERT_TRUE(check_invariants(iso).ok());
  bool caught = false;
  for (std::size_t i = 0; i < iso.pairs.size() && !caught; ++i)
    for (std::size_t j = i + 1; j < iso.pairs.size() && !caught; ++j) {
      auto bad = iso;
      std::swap(bad.pairs[i].second, bad.pairs[j].second);
      auto v = check_invariants(bad);
      bool betweenness = std::any_of(v.messages.begin(), v.messages.end(),
                                     [](const std::string& m) { return m.find("betweenness") != std::string::npos; });
      if (!betweenness) continue;
      caught = true;
      EXPECT_THROW(extend_and_verify(bad), InternalError);
    }
  EXPECT_TRUE(caught);
}

TEST(ExtendAndVerify, MovedTargetShowsADefect)
{
  // A bijection that keeps betweenness but not membership extends with a
  // visible defect.
  auto w = y3();
  PartialIso iso;
  iso.source_space = iso.target_space = w;
  iso.source_base = iso.target_base = n(A);
  iso.source_sets = {Subdendrite(w, {n(A), n(B), n(C)})};
  iso.target_sets = {Subdendrite(w, {n(A), Point::on_edge(A, B, q(1, 2))})};
  iso.pairs = {{B, B}};
  EXPECT_FALSE(check_invariants(iso).ok());
  EXPECT_GT(extend_and_verify(iso).max_defect, 0);
}
