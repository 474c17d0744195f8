#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

// Shared helpers for the statistical checks in the unit suites.

namespace ldt::testutil {

// Critical value of the chi-squared distribution at significance 0.001.
// Exact for the small dfs the suites use, Wilson-Hilferty above.
inline double chi2_crit_001(int df) {
  switch (df) {
    case 1: return 10.828;
    case 2: return 13.816;
    case 4: return 18.467;
    case 6: return 22.458;
    case 10: return 29.588;
  }
  const double z = 3.0902;  // 99.9% normal quantile
  const double a = 2.0 / (9.0 * df);
  const double t = 1.0 - a + z * std::sqrt(a);
  return df * t * t * t * 1.01;  // small cushion for the approximation
}

// Pearson statistic against a uniform expectation over `cells` categories.
inline double chi2_uniform(const std::vector<std::uint64_t>& counts, std::uint64_t total) {
  const double expected = static_cast<double>(total) / counts.size();
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace ldt::testutil
