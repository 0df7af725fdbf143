#pragma once

#include <cstdint>
#include <vector>

namespace scenecode {

double mean(const std::vector<double>& values);

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool operator==(const Interval&) const = default;
};

inline constexpr int kBootstrapResamples = 1000;
inline constexpr double kBootstrapLevel = 0.95;

// Percentile bootstrap of the mean. Needs at least two values.
Interval bootstrap_ci(const std::vector<double>& values, int resamples = kBootstrapResamples,
                      double level = kBootstrapLevel, std::uint64_t seed = 0);

enum class TiePolicy {
  average,  // tied values share the mean of their ranks
  ordinal,  // tied values ranked by order of appearance
};

std::vector<double> ranks(const std::vector<double>& values, TiePolicy ties = TiePolicy::average);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct Correlation {
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
};

// Equal lengths, n >= 3. Throws scenecode::Error("zero variance") on a
// constant series.
Correlation correlations(const std::vector<double>& x, const std::vector<double>& y,
                         TiePolicy ties = TiePolicy::average);

}  // namespace scenecode
