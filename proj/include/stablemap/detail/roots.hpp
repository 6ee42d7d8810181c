#pragma once

#include <cmath>

namespace stablemap::detail {

/// Root of a monotone function on [lo, hi] with f(lo) and f(hi) of opposite
/// sign. Bisection shrinks the bracket, Newton polishes; a Newton iterate
/// that leaves the bracket is replaced by the midpoint.
template <class F, class DF>
double bracketed_newton(F&& f, DF&& df, double lo, double hi, double tol = 1e-13) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  const bool increasing = flo < 0.0;

  for (int i = 0; i < 20 && hi - lo > 1e-4; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == increasing) lo = mid; else hi = mid;
  }

  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 100; ++i) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == increasing) lo = x; else hi = x;
    const double d = df(x);
    double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= tol * 1e-3 || hi - lo <= tol * 1e-3) return next;
    x = next;
  }
  return x;
}

}  // namespace stablemap::detail
