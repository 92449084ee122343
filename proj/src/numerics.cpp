#include "bagnet/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bagnet/errors.hpp"

namespace bagnet {

double exact_sum(std::span<const double> xs) {
  std::vector<double> partials;
  for (double x : xs) {
    std::size_t used = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }

  // Round the non-overlapping partials to one double, adjusting halfway
  // cases toward the remaining lower-order terms (CPython fsum rounding).
  std::size_t n = partials.size();
  if (n == 0) return 0.0;
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y2 = lo * 2.0;
    const double x2 = hi + y2;
    if (y2 == x2 - hi) hi = x2;
  }
  return hi;
}

double exact_mean(std::span<const double> xs) {
  if (xs.empty()) throw NumericalError("exact_mean: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const double m = exact_sum(xs) / static_cast<double>(xs.size());
  return std::clamp(m, *lo_it, *hi_it);
}

}  // namespace bagnet
