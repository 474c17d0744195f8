#pragma once

#include <cmath>
#include <cstdint>

namespace ldt {

// Monte Carlo estimate with a distribution-free Hoeffding interval at 99%
// confidence: half width sqrt(ln(2/0.01) / (2 trials)).
struct Estimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  double p_hat() const {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  }
  double half_width() const {
    if (trials == 0) return 1.0;
    constexpr double kLogTwoOverDelta = 5.298317366548036;  // ln(2/0.01)
    return std::sqrt(kLogTwoOverDelta / (2.0 * static_cast<double>(trials)));
  }
  double lower() const {
    const double v = p_hat() - half_width();
    return v < 0.0 ? 0.0 : v;
  }
  double upper() const {
    const double v = p_hat() + half_width();
    return v > 1.0 ? 1.0 : v;
  }

  bool operator==(const Estimate&) const = default;
};

}  // namespace ldt
