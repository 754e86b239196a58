#pragma once

#include <cmath>
#include <concepts>

namespace lvrlab {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section search for the maximum of a unimodal f on [lo, hi]. The
// endpoints are compared against the interior optimum, so monotone objectives
// return the correct boundary exactly.
template <std::invocable<double> F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double x_tolerance = 1e-9,
                                      int max_iterations = 400) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (b - a) > x_tolerance; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    }
  }
  ScalarOptimum best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > best.value) {
      best = {x, fx};
    }
  }
  return best;
}

// Largest x in [lo, hi] with pred(x) true, for pred monotone (true then false)
// and pred(lo) true.
template <std::predicate<double> P>
double bisect_last_true(P&& pred, double lo, double hi, int iterations = 200) {
  if (pred(hi)) {
    return hi;
  }
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace lvrlab
