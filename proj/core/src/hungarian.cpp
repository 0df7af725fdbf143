#include "scenecode/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scenecode/error.hpp"

namespace scenecode {

namespace {

// Potentials-based O(n^3) solver on a square matrix (the surplus side is
// padded with zero-cost dummies). Leaves u, v so that a(i,j) - u[i] - v[j] >= 0
// with equality on every assigned edge.
struct Solver {
  std::size_t n;
  const std::vector<double>& a;
  std::vector<double> u, v;
  std::vector<std::size_t> row_of;  // column -> row, 1-based; 0 = free
  std::vector<std::size_t> col_of;  // row -> column, 0-based

  Solver(const std::vector<double>& cost, std::size_t size)
      : n(size), a(cost), u(n + 1, 0.0), v(n + 1, 0.0), row_of(n + 1, 0), col_of(n, 0) {}

  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  void run() {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
      row_of[0] = i;
      std::size_t j0 = 0;
      std::vector<double> minv(n + 1, kInf);
      std::vector<char> used(n + 1, 0);
      do {
        used[j0] = 1;
        const std::size_t i0 = row_of[j0];
        double delta = kInf;
        std::size_t j1 = 0;
        for (std::size_t j = 1; j <= n; ++j) {
          if (used[j]) continue;
          const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
        for (std::size_t j = 0; j <= n; ++j) {
          if (used[j]) {
            u[row_of[j]] += delta;
            v[j] -= delta;
          } else {
            minv[j] -= delta;
          }
        }
        j0 = j1;
      } while (row_of[j0] != 0);
      do {
        const std::size_t j1 = way[j0];
        row_of[j0] = row_of[j1];
        j0 = j1;
      } while (j0 != 0);
    }
    for (std::size_t j = 1; j <= n; ++j) col_of[row_of[j] - 1] = j - 1;
  }

  bool tight(std::size_t i, std::size_t j, double eps) const {
    return at(i, j) - u[i + 1] - v[j + 1] <= eps;
  }

  // Every perfect matching inside the equality subgraph is optimal, so walk the
  // rows in order and move each to its smallest tight column that still
  // leaves the later rows perfectly matchable.
  void lexicographic_refine(double eps) {
    std::vector<char> fixed_col(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cur = col_of[i];
      for (std::size_t j = 0; j < cur; ++j) {
        if (fixed_col[j] || !tight(i, j, eps)) continue;
        std::vector<char> seen(n, 0);
        seen[j] = 1;
        const std::size_t k = row_of[j + 1] - 1;
        std::vector<std::pair<std::size_t, std::size_t>> moves;
        if (reroute(k, cur, eps, fixed_col, seen, moves)) {
          col_of[i] = j;
          row_of[j + 1] = i + 1;
          for (auto [r, c] : moves) {
            col_of[r] = c;
            row_of[c + 1] = r + 1;
          }
          break;
        }
      }
      fixed_col[col_of[i]] = 1;
    }
  }

  // Finds an alternating path that gives row r a tight column, ending at the
  // freed column `target`.
  bool reroute(std::size_t r, std::size_t target, double eps, const std::vector<char>& fixed_col,
               std::vector<char>& seen, std::vector<std::pair<std::size_t, std::size_t>>& moves) {
    for (std::size_t c = 0; c < n; ++c) {
      if (seen[c] || fixed_col[c] || !tight(r, c, eps)) continue;
      seen[c] = 1;
      if (c == target) {
        moves.emplace_back(r, c);
        return true;
      }
      const std::size_t next = row_of[c + 1] - 1;
      if (reroute(next, target, eps, fixed_col, seen, moves)) {
        moves.emplace_back(r, c);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

std::vector<int> solve_assignment(const std::vector<double>& cost, std::size_t rows,
                                  std::size_t cols) {
  if (cost.size() != rows * cols) throw Error("cost matrix size mismatch");
  std::vector<int> out(rows, -1);
  if (rows == 0 || cols == 0) return out;

  const std::size_t n = std::max(rows, cols);
  std::vector<double> square(n * n, 0.0);
  double scale = 1.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double c = cost[i * cols + j];
      if (!std::isfinite(c)) throw Error("cost matrix has non-finite entries");
      square[i * n + j] = c;
      scale = std::max(scale, std::abs(c));
    }
  }

  Solver s(square, n);
  s.run();
  s.lexicographic_refine(1e-9 * scale);
  for (std::size_t i = 0; i < rows; ++i) {
    if (s.col_of[i] < cols) out[i] = static_cast<int>(s.col_of[i]);
  }
  return out;
}

double MatchResult::total_cost() const {
  double total = 0.0;
  for (const auto& p : pairs) total += p.distance;
  return total;
}

MatchResult hungarian_match(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt) {
  std::vector<double> cost(pred.size() * gt.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) cost[i * gt.size() + j] = distance(pred[i], gt[j]);
  }
  const std::vector<int> assign = solve_assignment(cost, pred.size(), gt.size());

  MatchResult result;
  std::vector<char> gt_used(gt.size(), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (assign[i] < 0) {
      result.unmatched_pred.push_back(i);
      continue;
    }
    const auto j = static_cast<std::size_t>(assign[i]);
    gt_used[j] = 1;
    result.pairs.push_back({i, j, cost[i * gt.size() + j]});
  }
  for (std::size_t j = 0; j < gt.size(); ++j) {
    if (!gt_used[j]) result.unmatched_gt.push_back(j);
  }
  return result;
}

}  // namespace scenecode
