#include <gtest/gtest.h>

#include <algorithm>

#include "scenecode/hungarian.hpp"
#include "scenecode/rng.hpp"
#include "test_support.hpp"

using namespace scenecode;

TEST(Hungarian, IdentityAndReversed) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {5, 5, 5}};
  const MatchResult same = hungarian_match(pts, pts);
  ASSERT_EQ(same.pairs.size(), 4u);
  for (const auto& p : same.pairs) EXPECT_EQ(p.pred, p.gt);
  EXPECT_EQ(same.total_cost(), 0.0);

  std::vector<Vec3> rev(pts.rbegin(), pts.rend());
  const MatchResult r = hungarian_match(rev, pts);
  for (const auto& p : r.pairs) EXPECT_EQ(p.gt, pts.size() - 1 - p.pred);
  EXPECT_EQ(r.total_cost(), 0.0);
}

TEST(Hungarian, RectangularLeavesUnmatched) {
  const std::vector<Vec3> pred{{0, 0, 0}, {10, 0, 0}, {1, 0, 0}};
  const std::vector<Vec3> gt{{0.9, 0, 0}, {0.1, 0, 0}};
  const MatchResult m = hungarian_match(pred, gt);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.unmatched_pred, std::vector<std::size_t>{1});
  EXPECT_TRUE(m.unmatched_gt.empty());
  EXPECT_NEAR(m.total_cost(), 0.2, 1e-12);

  const MatchResult t = hungarian_match(gt, pred);
  EXPECT_EQ(t.unmatched_gt, std::vector<std::size_t>{1});
}

TEST(Hungarian, EmptySides) {
  EXPECT_TRUE(hungarian_match({}, {{0, 0, 0}}).pairs.empty());
  EXPECT_EQ(hungarian_match({{0, 0, 0}}, {}).unmatched_pred.size(), 1u);
}

TEST(Hungarian, TieBreakIsLexicographic) {
  // every assignment costs the same; row 0 takes column 0, and so on
  const std::vector<double> flat(9, 1.0);
  EXPECT_EQ(solve_assignment(flat, 3, 3), (std::vector<int>{0, 1, 2}));
  const std::vector<double> wide(6, 2.0);
  EXPECT_EQ(solve_assignment(wide, 2, 3), (std::vector<int>{0, 1}));
  EXPECT_EQ(solve_assignment(wide, 3, 2), (std::vector<int>{0, 1, -1}));
}

TEST(Hungarian, SixBySixAgainstAllPermutations) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> cost(36);
    for (auto& c : cost) c = rng.uniform(0, 10);
    const auto a = solve_assignment(cost, 6, 6);
    EXPECT_EQ(sct::assignment_cost(cost, 6, 6, a), sct::brute_force_assignment(cost, 6, 6));
  }
}

TEST(Hungarian, RectangularIntegerCostsWithTies) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng.index(7);
    const std::size_t cols = 1 + rng.index(7);
    std::vector<double> cost(rows * cols);
    for (auto& c : cost) c = static_cast<double>(rng.index(4));
    const auto a = solve_assignment(cost, rows, cols);
    std::vector<int> used;
    for (int c : a) {
      if (c < 0) continue;
      EXPECT_EQ(std::count(used.begin(), used.end(), c), 0);
      used.push_back(c);
    }
    EXPECT_EQ(used.size(), std::min(rows, cols));
    EXPECT_EQ(sct::assignment_cost(cost, rows, cols, a), sct::brute_force_assignment(cost, rows, cols));
  }
}
