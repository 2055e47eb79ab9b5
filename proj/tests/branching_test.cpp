#include <gtest/gtest.h>

#include <random>

#include "glasscut/branching.hpp"
#include "test_support.hpp"

using namespace glasscut;
using namespace glasscut::test_util;

namespace {

Item item(ItemId id, Length w, Length h, ChainId chain, int seq) { return Item{id, w, h, chain, 0, seq}; }

Params wide_params() {
  Params p;
  p.max1 = p.plate_width;
  return p;
}

}  // namespace

TEST(Candidates, FirstUnpackedItemOfEachChain) {
  Instance inst(Params{}, {item(0, 500, 400, 0, 1), item(1, 600, 300, 0, 2), item(2, 700, 200, 1, 1)}, {});
  BranchingScheme s(inst);
  auto root = s.root();
  EXPECT_EQ(s.candidate_items(*root), (std::vector<ItemId>{0, 2}));
  auto ins = find_insertion(s, root, 0, 0);
  ASSERT_TRUE(ins);
  auto child = s.apply_insertion(root, *ins);
  EXPECT_EQ(s.candidate_items(*child), (std::vector<ItemId>{1, 2}));
}

TEST(Insertions, RootOpensFirstPlateInBothOrientations) {
  Instance inst(Params{}, {item(0, 500, 400, 0, 1)}, {});
  BranchingScheme s(inst);
  const auto all = s.enumerate_insertions(s.root());
  ASSERT_FALSE(all.empty());
  bool normal = false, rotated = false;
  for (const auto& ins : all) {
    EXPECT_EQ(ins.depth, 0);
    EXPECT_EQ(ins.bin, 0);
    if (ins.first.id == 0 && !ins.first.rotated) normal = true;
    if (ins.first.id == 0 && ins.first.rotated) rotated = true;
  }
  EXPECT_TRUE(normal);
  EXPECT_TRUE(rotated);
}

TEST(Insertions, SquareItemHasOneOrientation) {
  Instance inst(Params{}, {item(0, 500, 500, 0, 1)}, {});
  BranchingScheme s(inst);
  for (const auto& ins : s.enumerate_insertions(s.root())) EXPECT_FALSE(ins.first.rotated);
}

TEST(Insertions, DefectPushesItemAbove) {
  // The defect sits where the item would start; the item must go above it
  // with a waste strip below.
  Params p;
  Instance inst(p, {item(0, 1000, 1000, 0, 1)}, {Defect{0, 100, 100, 50, 50}});
  BranchingScheme s(inst);
  auto ins = find_insertion(s, s.root(), 0, 0);
  ASSERT_TRUE(ins);
  EXPECT_GE(ins->item_y, 150);
  const Rect placed{ins->x_left, ins->item_y, ins->first.width, ins->first.height};
  EXPECT_FALSE(interiors_overlap(placed, Rect{100, 100, 50, 50}));
}

TEST(Insertions, TwoItemsBelowThirdLevelForcesDepthThree) {
  Instance inst(wide_params(), {item(0, 1000, 1000, 0, 1), item(1, 1000, 1000, 1, 1), item(2, 500, 500, 2, 1)}, {});
  BranchingScheme s(inst);
  auto root = s.root();
  auto ins = find_insertion(s, root, 0, 0, false, 1);
  ASSERT_TRUE(ins);
  EXPECT_EQ(ins->kind, InsertionKind::TwoItems);
  auto child = s.apply_insertion(root, *ins);
  const auto next = s.enumerate_insertions(child);
  ASSERT_FALSE(next.empty());
  for (const auto& n : next) EXPECT_EQ(n.depth, 3);
}

TEST(Insertions, FullPlateItemCompletes) {
  const Params p = wide_params();
  Instance inst(p, {item(0, p.plate_width, p.plate_height, 0, 1)}, {});
  BranchingScheme s(inst);
  auto ins = find_insertion(s, s.root(), 0, 0);
  ASSERT_TRUE(ins);
  auto child = s.apply_insertion(s.root(), *ins);
  EXPECT_TRUE(child->complete);
  EXPECT_EQ(child->front.x1_curr, p.plate_width);
  EXPECT_EQ(waste(*child), 0);
}

TEST(Insertions, DepthThreeWidensFirstLevel) {
  Instance inst(Params{}, {item(0, 1000, 2000, 0, 1), item(1, 800, 1500, 1, 1)}, {});
  BranchingScheme s(inst, {false, false});
  auto root = s.root();
  auto a = s.apply_insertion(root, *find_insertion(s, root, 0, 0));
  auto b = find_insertion(s, a, 1, 3);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->x_left, 1000);
  EXPECT_EQ(b->x1_curr, 1800);
}

TEST(Insertions, WasteOnlyIncreasesWaste) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int round = 0; round < 300; ++round) {
    const Instance inst = random_instance(rng);
    BranchingScheme s(inst, {false, false});
    std::vector<NodePtr> path;
    random_walk(s, rng, &path);
    for (const auto& node : path)
      for (const auto& ins : s.enumerate_insertions(node)) {
        if (ins.kind != InsertionKind::WasteOnly) continue;
        auto child = s.apply_insertion(node, ins);
        EXPECT_GT(waste(*child), waste(*node));
        ++checked;
      }
  }
  EXPECT_GT(checked, 50);
}

TEST(Children, LeafHasNone) {
  Instance inst(Params{}, {item(0, 500, 400, 0, 1)}, {});
  BranchingScheme s(inst);
  std::mt19937_64 rng(1);
  auto leaf = random_walk(s, rng);
  ASSERT_TRUE(leaf);
  EXPECT_TRUE(s.children(leaf).empty());
}

TEST(Children, HandEnumeratedTwoItems) {
  // Two equal items in separate chains: each alone, or both stacked, at depth 0.
  Instance inst(Params{}, {item(0, 1000, 1000, 0, 1), item(1, 1000, 1000, 1, 1)}, {});
  BranchingScheme s(inst);
  const auto kids = s.children(s.root());
  ASSERT_EQ(kids.size(), 4u);
  std::vector<std::pair<ItemId, ItemId>> got;
  for (const auto& k : kids) {
    EXPECT_EQ(k->insertion.depth, 0);
    got.emplace_back(k->insertion.first.id, k->insertion.second.id);
  }
  EXPECT_EQ(got, (std::vector<std::pair<ItemId, ItemId>>{{0, kNoItem}, {0, 1}, {1, kNoItem}, {1, 0}}));
  const auto grand = s.children(kids[0]);
  ASSERT_EQ(grand.size(), 1u);
  EXPECT_EQ(grand[0]->insertion.first.id, 1);
  EXPECT_EQ(grand[0]->insertion.depth, 3);
  EXPECT_TRUE(grand[0]->complete);
}

TEST(Children, SymmetryAndDominanceOnlyRemove) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const Instance inst = random_instance(rng);
    BranchingScheme plain(inst, {false, false});
    BranchingScheme full(inst, {true, true});
    std::vector<NodePtr> path;
    random_walk(plain, rng, &path);
    for (const auto& node : path) {
      const auto all = plain.children(node);
      const auto kept = full.children(node);
      EXPECT_LE(kept.size(), all.size());
    }
  }
}

TEST(Children, Deterministic) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 50; ++round) {
    const Instance inst = random_instance(rng);
    BranchingScheme s(inst);
    const auto a = s.children(s.root());
    const auto b = s.children(s.root());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i]->insertion.first.id, b[i]->insertion.first.id);
      EXPECT_TRUE(a[i]->front == b[i]->front);
    }
  }
}

TEST(Dominance, KeepsEarliestOfEqualChildren) {
  Instance inst(Params{}, {item(0, 1000, 1000, 0, 1)}, {});
  BranchingScheme s(inst);
  auto c = s.apply_insertion(s.root(), *find_insertion(s, s.root(), 0, 0));
  // Pretend it is not complete so the filter applies.
  auto a = std::make_shared<Node>(*c);
  auto b = std::make_shared<Node>(*c);
  a->complete = b->complete = false;
  auto out = BranchingScheme::filter_dominated_children({a, b});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], a);
}

TEST(Dominance, DropsDominatedKeepsIncomparable) {
  Instance inst(Params{}, {item(0, 1000, 1000, 0, 1)}, {});
  BranchingScheme s(inst);
  auto c = s.apply_insertion(s.root(), *find_insertion(s, s.root(), 0, 0));
  auto small = std::make_shared<Node>(*c);
  auto big = std::make_shared<Node>(*c);
  auto other = std::make_shared<Node>(*c);
  small->complete = big->complete = other->complete = false;
  big->front.x1_curr += 100;
  big->front.x3_curr += 100;
  other->packed.assign(other->packed.size(), 0);
  auto out = BranchingScheme::filter_dominated_children({big, small, other});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], small);
  EXPECT_EQ(out[1], other);
}

TEST(Symmetry, LowerIdAboveDefectFreeSiblingIsForbidden) {
  auto r = symmetry_pattern('a');
  ASSERT_TRUE(r.last);
  EXPECT_FALSE(r.scheme->symmetry_allows(*r.before, *r.last));
}

TEST(Symmetry, DefectInSiblingAllows) {
  auto r = symmetry_pattern('b');
  ASSERT_TRUE(r.last);
  EXPECT_TRUE(r.scheme->symmetry_allows(*r.before, *r.last));
}

TEST(Symmetry, SharedChainAllows) {
  auto r = symmetry_pattern('c');
  ASSERT_TRUE(r.last);
  EXPECT_TRUE(r.scheme->symmetry_allows(*r.before, *r.last));
}

// Filtering only removes leaves, so the filtered optimum can only be worse.
// Equality is not guaranteed: the swapped layout a symmetry cut relies on can
// itself be removed by the depth pruning rules.
TEST(Symmetry, NeverBeatsUnfilteredOptimum) {
  std::mt19937_64 rng(3);
  int equal = 0;
  for (int round = 0; round < 60; ++round) {
    RandomSpec spec;
    spec.max_items = 5;
    const Instance inst = random_instance(rng, spec);
    const auto plain = exhaustive_dfs(BranchingScheme(inst, {false, false})).best;
    const auto full = exhaustive_dfs(BranchingScheme(inst, {true, true})).best;
    EXPECT_GE(full, plain) << "round " << round;
    if (full == plain) ++equal;
  }
  EXPECT_GT(equal, 40);
}
