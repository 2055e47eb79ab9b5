#include <gtest/gtest.h>

#include <random>

#include "glasscut/search.hpp"
#include "glasscut/instance_io.hpp"
#include "glasscut/validator.hpp"
#include "test_support.hpp"

using namespace glasscut;
using namespace glasscut::test_util;

namespace {

SearchOptions exhaustive_options() {
  SearchOptions o;
  o.bound_pruning = false;
  return o;
}

/// Greedy descent: always follow the best non-complete child.
struct GreedyTrace {
  Area best = Incumbent::kNone;
  std::vector<std::uint64_t> expanded;  // node serials in order
};

GreedyTrace greedy(const BranchingScheme& s, GuideKind guide) {
  GreedyTrace t;
  NodePtr node = s.root();
  while (node) {
    t.expanded.push_back(node->serial);
    NodePtr next;
    for (const auto& c : s.children(node)) {
      if (c->complete) {
        t.best = std::min(t.best, waste(*c));
        continue;
      }
      if (!next) {
        next = c;
        continue;
      }
      const auto a = guide_value(*c, guide), b = guide_value(*next, guide);
      if (a < b || (a == b && c->items_packed > next->items_packed)) next = c;
    }
    node = next;
  }
  return t;
}

std::vector<std::uint64_t> serials_from_search(const std::function<void(SearchOptions&)>& run) {
  std::vector<std::uint64_t> out;
  SearchOptions o = exhaustive_options();
  o.on_expand = [&](const Node& n) { out.push_back(n.serial); };
  run(o);
  return out;
}

Item item(ItemId id, Length w, Length h, ChainId chain, int seq) { return Item{id, w, h, chain, 0, seq}; }

}  // namespace

TEST(Search, SingleItemIsOptimal) {
  Instance inst(Params{}, {item(0, 1000, 500, 0, 1)}, {});
  BranchingScheme s(inst);
  Incumbent inc;
  const auto r = astar(s, {}, inc);
  EXPECT_EQ(r.status, SearchStatus::Exhausted);
  ASSERT_TRUE(inc.has_solution());
  EXPECT_EQ(inc.waste(), exhaustive_dfs(s).best);
}

TEST(Search, ExpiredDeadlineReturnsAtOnce) {
  Instance inst(Params{}, {item(0, 1000, 500, 0, 1)}, {});
  BranchingScheme s(inst);
  SearchOptions o;
  o.deadline = Clock::now();
  Incumbent inc;
  EXPECT_EQ(mba_star(s, 10, o, inc).status, SearchStatus::Timeout);
  EXPECT_EQ(dpa_star(s, o, inc).status, SearchStatus::Timeout);
  EXPECT_EQ(iterative_beam_search(s, 1, o, inc).status, SearchStatus::Timeout);
  EXPECT_FALSE(inc.has_solution());
}

TEST(Search, StopFlagInterrupts) {
  Instance inst(Params{}, {item(0, 1000, 500, 0, 1)}, {});
  BranchingScheme s(inst);
  std::atomic<bool> stop{true};
  SearchOptions o;
  o.stop = &stop;
  Incumbent inc;
  EXPECT_EQ(astar(s, o, inc).status, SearchStatus::Timeout);
}

TEST(Search, AStarMatchesExhaustiveDfs) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 150; ++round) {
    RandomSpec spec;
    spec.max_items = 5;
    const Instance inst = random_instance(rng, spec);
    BranchingScheme s(inst);
    const auto oracle = exhaustive_dfs(s).best;
    for (bool bound : {false, true}) {
      Incumbent inc;
      SearchOptions o;
      o.bound_pruning = bound;
      EXPECT_EQ(astar(s, o, inc).status, SearchStatus::Exhausted);
      EXPECT_EQ(inc.waste(), oracle) << "round " << round << " bound " << bound;
    }
  }
}

TEST(Search, UnboundedFringeIsAStar) {
  std::mt19937_64 rng(22);
  for (int round = 0; round < 50; ++round) {
    const Instance inst = random_instance(rng);
    BranchingScheme s(inst);
    Incumbent a, b;
    const auto ta = serials_from_search([&](SearchOptions& o) { astar(s, o, a); });
    const auto tb = serials_from_search(
        [&](SearchOptions& o) { mba_star(s, std::numeric_limits<std::size_t>::max() / 2, o, b); });
    EXPECT_EQ(a.waste(), b.waste());
    EXPECT_EQ(ta.size(), tb.size());
  }
}

TEST(Search, FringeOfOneIsGreedy) {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 200; ++round) {
    const Instance inst = random_instance(rng);
    for (auto guide : {GuideKind::Waste, GuideKind::WastePercentage, GuideKind::WastePercentageOverMeanItemArea}) {
      BranchingScheme s(inst);
      Incumbent inc;
      // Serial numbers differ between runs, so compare trace lengths.
      std::size_t expanded = 0;
      SearchOptions o = exhaustive_options();
      o.guide = guide;
      o.on_expand = [&](const Node&) { ++expanded; };
      mba_star(s, 1, o, inc);
      const auto g = greedy(s, guide);
      EXPECT_EQ(inc.waste(), g.best) << "round " << round;
      EXPECT_EQ(expanded, g.expanded.size());
    }
  }
}

TEST(Search, BeamOfOneIsGreedy) {
  std::mt19937_64 rng(24);
  for (int round = 0; round < 200; ++round) {
    const Instance inst = random_instance(rng);
    BranchingScheme s(inst);
    Incumbent inc;
    bool timed_out = false;
    SearchOptions o = exhaustive_options();
    beam_pass(s, 1, o, inc, timed_out);
    EXPECT_FALSE(timed_out);
    EXPECT_EQ(inc.waste(), greedy(s, o.guide).best) << "round " << round;
  }
}

TEST(Search, WideBeamIsOptimal) {
  std::mt19937_64 rng(25);
  for (int round = 0; round < 100; ++round) {
    RandomSpec spec;
    spec.max_items = 5;
    const Instance inst = random_instance(rng, spec);
    BranchingScheme s(inst);
    Incumbent inc;
    const auto r = iterative_beam_search(s, 1, {}, inc);
    EXPECT_TRUE(r.proved);
    EXPECT_EQ(inc.waste(), exhaustive_dfs(s).best) << "round " << round;
    for (std::size_t i = 1; i < r.widths.size(); ++i) EXPECT_EQ(r.widths[i], 2 * r.widths[i - 1]);
  }
}

TEST(Growth, Schedules) {
  EXPECT_EQ(fringe_schedule(2, Growth{2, 1}, 4), (std::vector<std::size_t>{2, 4, 8, 16}));
  EXPECT_EQ(fringe_schedule(2, Growth::parse("1.33"), 6), (std::vector<std::size_t>{2, 3, 4, 6, 8, 11}));
  EXPECT_EQ(fringe_schedule(2, Growth::parse("1.5"), 5), (std::vector<std::size_t>{2, 3, 5, 8, 12}));
  // Tiny factors still grow by at least one.
  EXPECT_EQ(fringe_schedule(2, Growth::parse("1.01"), 4), (std::vector<std::size_t>{2, 3, 4, 5}));
}

TEST(Growth, ParseRejects) {
  for (const char* bad : {"1", "0.5", "abc", "", "1.2.3"}) EXPECT_THROW(Growth::parse(bad), Error) << bad;
  EXPECT_EQ(Growth::parse("1.33").num, 133);
  EXPECT_EQ(Growth::parse("1.33").den, 100);
}

TEST(Search, RestartingProvesOptimum) {
  std::mt19937_64 rng(26);
  for (int round = 0; round < 100; ++round) {
    RandomSpec spec;
    spec.max_items = 5;
    const Instance inst = random_instance(rng, spec);
    BranchingScheme s(inst);
    Incumbent inc;
    const auto r = restarting_mba_star(s, Growth{3, 2}, 2, {}, inc);
    EXPECT_TRUE(r.proved);
    EXPECT_EQ(r.status, SearchStatus::Exhausted);
    EXPECT_EQ(inc.waste(), exhaustive_dfs(s).best) << "round " << round;
    EXPECT_EQ(r.sizes, fringe_schedule(2, Growth{3, 2}, r.sizes.size()));
  }
}

TEST(Search, IncumbentOnlyImproves) {
  std::mt19937_64 rng(27);
  for (int round = 0; round < 50; ++round) {
    const Instance inst = random_instance(rng);
    BranchingScheme s(inst);
    Incumbent inc;
    restarting_mba_star(s, Growth{3, 2}, 2, {}, inc);
    const auto h = inc.history();
    for (std::size_t i = 1; i < h.size(); ++i) {
      EXPECT_LT(h[i].second, h[i - 1].second);
      EXPECT_GE(h[i].first, h[i - 1].first);
    }
    if (inc.has_solution()) {
      EXPECT_EQ(h.back().second, inc.waste());
    }
  }
}

TEST(Search, SolutionsValidate) {
  std::mt19937_64 rng(28);
  for (int round = 0; round < 100; ++round) {
    const Instance inst = random_instance(rng);
    BranchingScheme s(inst);
    Incumbent inc;
    restarting_mba_star(s, Growth{3, 2}, 2, {}, inc);
    if (!inc.has_solution()) continue;
    const auto tree = build_solution_tree(*inc.best(), inst);
    const auto report = validate(inst, tree);
    EXPECT_TRUE(report.ok()) << "round " << round << ": " << report.violations.front().message;
    EXPECT_EQ(objective_of(inst, tree), inc.waste());
  }
}

TEST(DpaStar, RejectsThreeChains) {
  Instance inst(Params{}, {item(0, 100, 100, 0, 1), item(1, 100, 100, 1, 1), item(2, 100, 100, 2, 1)}, {});
  BranchingScheme s(inst);
  Incumbent inc;
  try {
    dpa_star(s, {}, inc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChainCount);
  }
}

TEST(DpaStar, ChainCounts) {
  Instance inst(Params{}, {item(0, 100, 100, 0, 1), item(1, 100, 100, 0, 2), item(2, 100, 100, 1, 1)}, {});
  BranchingScheme s(inst);
  auto root = s.root();
  EXPECT_EQ(chain_counts(inst, *root), std::make_pair(0, 0));
  auto c = s.apply_insertion(root, *find_insertion(s, root, 2, 0));
  EXPECT_EQ(chain_counts(inst, *c), std::make_pair(0, 1));
}

TEST(DpaStar, StoreKeepsNonDominated) {
  DominanceStore store;
  Front a{0, 100, 200, 150, 100, 150};
  Front worse = a;
  worse.x1_curr = 250;
  worse.x3_curr = 250;
  EXPECT_TRUE(store.insert({1, 0}, a));
  EXPECT_FALSE(store.insert({1, 0}, worse));
  EXPECT_FALSE(store.insert({1, 0}, a));
  EXPECT_TRUE(store.insert({0, 1}, worse));
  Front better = a;
  better.x1_prev = 50;
  EXPECT_TRUE(store.insert({1, 0}, better));
  EXPECT_EQ(store.find({1, 0})->size(), 1u);
  EXPECT_EQ(store.size(), 2u);
}

// Stored fronts ignore the depth flags of a node, so the dominance is only a
// pseudo-dominance: it can miss the scheme optimum but never beat it.
TEST(DpaStar, NeverBeatsSchemeOptimum) {
  for (int chains : {1, 2}) {
    std::mt19937_64 rng(29 + chains);
    int equal = 0;
    const int rounds = 150;
    for (int round = 0; round < rounds; ++round) {
      RandomSpec spec;
      spec.max_chains = chains;
      spec.max_items = chains == 1 ? 4 : 7;
      const Instance inst = random_instance(rng, spec);
      BranchingScheme s(inst);
      Incumbent inc;
      EXPECT_EQ(dpa_star(s, {}, inc).status, SearchStatus::Exhausted);
      const auto oracle = exhaustive_dfs(s).best;
      EXPECT_GE(inc.waste(), oracle);
      if (inc.waste() == oracle) ++equal;
    }
    EXPECT_GE(equal, rounds * 8 / 10) << chains << " chains";
  }
}
