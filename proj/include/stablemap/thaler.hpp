#pragma once

// Thaler's intermittent map on [0, 1]
//
//   T x = (x^{1-g} + (1+x)^{1-g} - 1)^{1/(1-g)}  mod 1,
//
// with two increasing full branches split at the branch point x*, solving
// x*^{1-g} + (1+x*)^{1-g} = 2. For g in (0,1) the map has a neutral fixed
// point at 0 and the invariant density h(x) = x^{-g} + (1+x)^{-g}, which is
// integrable; for g > 1 the measure is infinite but its restriction to
// Y = (x*, 1] is finite. g = 0 is the doubling map.
//
// The branch point itself belongs to the laminar branch [0, x*].

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "stablemap/detail/roots.hpp"
#include "stablemap/errors.hpp"
#include "stablemap/rng.hpp"

namespace stablemap {

inline double solve_x_star(double gamma);

struct ThalerParams {
  double gamma = 0.0;
  double alpha = std::numeric_limits<double>::infinity();
  double x_star = 0.5;
  double mu_y_mass = 1.0;  // integral of h over Y
  double one_minus_gamma = 1.0;
  double inv_one_minus_gamma = 1.0;

  static ThalerParams from_gamma(double gamma) {
    ThalerParams p;
    p.gamma = gamma;
    p.alpha = 1.0 / gamma;
    p.x_star = solve_x_star(gamma);
    p.one_minus_gamma = 1.0 - gamma;
    p.inv_one_minus_gamma = 1.0 / p.one_minus_gamma;
    p.mu_y_mass = (std::exp2(p.one_minus_gamma) - 1.0) / p.one_minus_gamma;
    return p;
  }

  static ThalerParams from_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha == 1.0)
      throw invalid_parameter("alpha must be positive and different from 1");
    return from_gamma(1.0 / alpha);
  }

  bool in_y(double x) const noexcept { return x > x_star; }
};

namespace detail {

inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw invalid_parameter("gamma must be a finite number >= 0");
  if (gamma == 1.0) throw invalid_parameter("gamma = 1 (Cauchy case) is not supported");
}

// s(x) = x^c + (1+x)^c - 1, computed so that the small increment
// (1+x)^c - 1 keeps full relative precision near 0.
inline double branch_sum(double x, double c) noexcept {
  return std::pow(x, c) + std::expm1(c * std::log1p(x));
}

}  // namespace detail

inline double solve_x_star(double gamma) {
  detail::check_gamma(gamma);
  if (gamma == 0.0) return 0.5;
  const double c = 1.0 - gamma;
  auto f = [c](double x) { return std::pow(x, c) + std::pow(1.0 + x, c) - 2.0; };
  auto df = [c](double x) { return c * (std::pow(x, c - 1.0) + std::pow(1.0 + x, c - 1.0)); };
  return detail::bracketed_newton(f, df, 0.0, 1.0);
}

/// One application of the map. 0 and 1 both map to 0.
inline double thaler_step(double x, const ThalerParams& p) noexcept {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  if (p.gamma == 0.0) {
    const double y = 2.0 * x;
    return y - std::floor(y);
  }
  const double c = p.one_minus_gamma;
  // T x = x * (1 + b/a)^{1/c} with a = x^c and b = (1+x)^c - 1; the ratio
  // form keeps the laminar increment x^{1+g} resolved for tiny x.
  const double a = std::pow(x, c);
  const double b = std::expm1(c * std::log1p(x));
  const double t = x * std::exp(std::log1p(b / a) * p.inv_one_minus_gamma);
  return t - std::floor(t);
}

/// h(x) = x^{-g} + (1+x)^{-g}; with `normalized`, the invariant probability
/// density (1-g) 2^{g-1} h(x), which exists only for g < 1.
inline double invariant_density(double x, const ThalerParams& p, bool normalized) {
  if (normalized && p.gamma > 1.0)
    throw invalid_parameter("normalised invariant density requires gamma < 1");
  if (!(x >= 0.0 && x <= 1.0)) throw invalid_parameter("x must lie in [0, 1]");
  if (x == 0.0 && p.gamma > 0.0) throw singular_point("invariant density diverges at x = 0");
  const double h = std::pow(x, -p.gamma) + std::pow(1.0 + x, -p.gamma);
  if (!normalized) return h;
  return p.one_minus_gamma / std::exp2(p.one_minus_gamma) * h;
}

/// Cumulative distribution of h restricted to Y, normalised to a probability:
/// F(y) = (y^c + (1+y)^c - 2) / (2^c - 1).
inline double y_cdf(double y, const ThalerParams& p) noexcept {
  const double c = p.one_minus_gamma;
  return (detail::branch_sum(y, c) - 1.0) / (std::exp2(c) - 1.0);
}

/// Inverse of y_cdf: maps u in [0, 1] to y in [x*, 1].
inline double y0_from_uniform(double u, const ThalerParams& p) {
  if (u <= 0.0) return p.x_star;
  if (u >= 1.0) return 1.0;
  const double c = p.one_minus_gamma;
  if (p.gamma == 0.0) return 0.5 * (1.0 + u);
  const double target = u * (std::exp2(c) - 1.0);
  auto f = [&](double y) { return detail::branch_sum(y, c) - 1.0 - target; };
  auto df = [&](double y) { return c * (std::pow(y, c - 1.0) + std::pow(1.0 + y, c - 1.0)); };
  return detail::bracketed_newton(f, df, p.x_star, 1.0);
}

/// Draw y0 in Y distributed as h|_Y / mu_Y(Y).
inline double sample_y0(const ThalerParams& p, Engine& rng) {
  return y0_from_uniform(uniform_open(rng), p);
}

inline constexpr std::uint64_t default_burn_in = 10000;

/// x0 = T^burn(x0') with x0' uniform on (0, 1); approximately distributed by
/// the invariant probability measure. Requires gamma < 1.
inline double sample_x0_burnin(const ThalerParams& p, Engine& rng,
                               std::uint64_t burn = default_burn_in) {
  if (p.gamma > 1.0)
    throw invalid_parameter("burn-in sampling needs a finite invariant measure (gamma < 1)");
  double x = uniform_open(rng);
  // Lebesgue measure is already invariant for the doubling map, and doubling
  // in binary floating point sends every double to 0 within ~1075 steps.
  if (p.gamma == 0.0) return x;
  for (std::uint64_t i = 0; i < burn; ++i) x = thaler_step(x, p);
  return x;
}

/// Anti-trapping kicks: when the orbit enters Y at least `min_gap` steps after
/// the previous kick, add N(0, variance) mod 1. Landing exactly on the fixed
/// point 0 triggers a kick immediately.
struct PerturbationPolicy {
  bool enabled = false;
  double variance = 1e-20;
  std::uint64_t min_gap = 10000;

  static PerturbationPolicy off() { return {}; }
  static PerturbationPolicy on() { return PerturbationPolicy{true, 1e-20, 10000}; }
};

struct OrbitState {
  double x = 0.0;
  std::uint64_t step_count = 0;
  std::uint64_t steps_since_perturbation = 0;
  std::uint64_t perturbations = 0;
  Engine* kick_stream = nullptr;  // required when the policy is enabled
};

/// Advance the orbit by one map step, applying the perturbation policy.
inline OrbitState orbit_advance(OrbitState s, const ThalerParams& p,
                                const PerturbationPolicy& policy) {
  double x = thaler_step(s.x, p);
  ++s.step_count;
  ++s.steps_since_perturbation;
  if (policy.enabled &&
      (x == 0.0 || (x > p.x_star && s.steps_since_perturbation >= policy.min_gap))) {
    if (s.kick_stream == nullptr)
      throw invalid_parameter("perturbation policy enabled without a kick stream");
    x += std::sqrt(policy.variance) * standard_normal(*s.kick_stream);
    x -= std::floor(x);
    s.steps_since_perturbation = 0;
    ++s.perturbations;
  }
  s.x = x;
  return s;
}

}  // namespace stablemap
