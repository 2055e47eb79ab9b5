#include <gtest/gtest.h>

#include <random>
#include <set>

#include "glasscut/min_max_heap.hpp"

using glasscut::MinMaxHeap;

TEST(MinMaxHeap, Basics) {
  MinMaxHeap<int> h;
  EXPECT_TRUE(h.empty());
  EXPECT_THROW(h.min(), std::out_of_range);
  for (int v : {5, 1, 9, 3, 7}) h.push(v);
  EXPECT_EQ(h.size(), 5u);
  EXPECT_EQ(h.min(), 1);
  EXPECT_EQ(h.max(), 9);
  EXPECT_EQ(h.pop_max(), 9);
  EXPECT_EQ(h.pop_min(), 1);
  EXPECT_EQ(h.pop_max(), 7);
  EXPECT_EQ(h.pop_min(), 3);
  EXPECT_EQ(h.pop_min(), 5);
  EXPECT_TRUE(h.empty());
}

// Random operation sequences against std::multiset.
TEST(MinMaxHeap, MatchesMultisetOracle) {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 200; ++round) {
    MinMaxHeap<int> h;
    std::multiset<int> ref;
    const int range = round % 2 ? 20 : 1'000'000;
    for (int op = 0; op < 500; ++op) {
      const auto kind = rng() % 4;
      if (ref.empty() || kind < 2) {
        const int v = static_cast<int>(rng() % static_cast<unsigned>(range));
        h.push(v);
        ref.insert(v);
      } else if (kind == 2) {
        ASSERT_EQ(h.pop_min(), *ref.begin());
        ref.erase(ref.begin());
      } else {
        ASSERT_EQ(h.pop_max(), *ref.rbegin());
        ref.erase(std::prev(ref.end()));
      }
      ASSERT_EQ(h.size(), ref.size());
      if (!ref.empty()) {
        ASSERT_EQ(h.min(), *ref.begin());
        ASSERT_EQ(h.max(), *ref.rbegin());
      }
    }
  }
}
