#include "scenecode/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scenecode/error.hpp"
#include "scenecode/rng.hpp"

namespace scenecode {

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

namespace {

// Linear interpolation between order statistics (sample quantile type 7).
double quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Interval bootstrap_ci(const std::vector<double>& values, int resamples, double level,
                      std::uint64_t seed) {
  if (values.size() < 2) throw Error("bootstrap needs at least 2 values");
  if (resamples < 1) throw Error("resamples must be positive");
  if (!(level > 0.0 && level < 1.0)) throw Error("level must lie in (0, 1)");

  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (double& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[rng.index(values.size())];
    m = sum / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile(means, tail), quantile(means, 1.0 - tail)};
}

std::vector<double> ranks(const std::vector<double>& values, TiePolicy ties) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> r(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) {
      r[order[k]] = ties == TiePolicy::average ? (static_cast<double>(i + j) / 2.0 + 1.0)
                                               : static_cast<double>(k + 1);
    }
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("series lengths differ");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("zero variance");
  return sxy / std::sqrt(sxx * syy);
}

Correlation correlations(const std::vector<double>& x, const std::vector<double>& y,
                         TiePolicy ties) {
  if (x.size() != y.size()) throw Error("series lengths differ");
  if (x.size() < 3) throw Error("correlation needs at least 3 pairs");
  Correlation c;
  c.pearson_r = pearson(x, y);
  c.spearman_rho = pearson(ranks(x, ties), ranks(y, ties));
  return c;
}

}  // namespace scenecode
