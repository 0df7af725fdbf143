#pragma once

#include <cstddef>
#include <vector>

#include "scenecode/vec3.hpp"

namespace scenecode {

// Minimum-cost assignment for a rows x cols cost matrix (row-major). Returns
// the column assigned to each row, or -1 when the row is left unmatched
// (only possible when rows > cols). Among optimal assignments the
// lexicographically smallest (by row, then column) is chosen.
std::vector<int> solve_assignment(const std::vector<double>& cost, std::size_t rows,
                                  std::size_t cols);

struct MatchPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double distance = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // ascending pred index
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;

  // Sum of pair distances in pred order.
  double total_cost() const;
};

// Hungarian matching on Euclidean center distances.
MatchResult hungarian_match(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt);

}  // namespace scenecode
