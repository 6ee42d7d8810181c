#pragma once

// Homogenisation integrator for scalar Marcus SDEs
//
//   dZ = a(Z) dt + b(Z) <> dW_{alpha,eta,beta},   alpha in (1,2),
//
// via the fast-slow map
//
//   z_{n+1} = z_n + eps a(z_n) + eps^g b(z_n) chi^(n) v(x_n),   x_{n+1} = T x_n,
//
// read on the slow time scale z_hat(t) = z_{floor(t/eps)}. v is a two-level
// mean-zero observable and chi^(n) = chi_{n-1}...chi_0 flips by a random sign
// delta at each visit of the fast orbit to Y.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "stablemap/errors.hpp"
#include "stablemap/models.hpp"
#include "stablemap/path.hpp"
#include "stablemap/rng.hpp"
#include "stablemap/stable.hpp"
#include "stablemap/thaler.hpp"

namespace stablemap {

/// v(x) = eta d^{-g} (1 - 2^{g-1})^{-g} * (1 on [0, x*], (1 - 2^{1-g})^{-1} on Y).
struct FastObservable {
  double laminar = 0.0;
  double excursion = 0.0;
  double x_star = 0.0;

  static FastObservable make(const StableParams& sp, const ThalerParams& p) {
    const StableConstants k = stable_constants(sp.alpha);
    const double g = p.gamma;
    FastObservable v;
    v.laminar = sp.eta * std::pow(k.d_alpha, -g) * std::pow(1.0 - std::exp2(g - 1.0), -g);
    v.excursion = v.laminar / (1.0 - std::exp2(1.0 - g));
    v.x_star = p.x_star;
    return v;
  }

  double operator()(double x) const noexcept { return x > x_star ? excursion : laminar; }
};

inline double observable_v(double x, const StableParams& sp, const ThalerParams& p) {
  return FastObservable::make(sp, p)(x);
}

struct ChiState {
  int chi = 1;
};

/// chi <- chi * delta when x_current lies in Y; unchanged in the laminar phase.
inline ChiState chi_update(ChiState c, double x_current, const ThalerParams& p, SignStream& signs) {
  if (x_current > p.x_star) c.chi *= signs.next();
  return c;
}

enum class InitialMeasure {
  invariant,  // uniform x0' pushed through the burn-in iterations
  lebesgue,
};

struct FastSlowConfig {
  double eps = 1e-3;
  double xi = 0.0;
  StableParams sp;
  double horizon = 1.0;
  std::vector<double> record_times{1.0};
  PerturbationPolicy perturbation = PerturbationPolicy::on();
  InitialMeasure initial = InitialMeasure::invariant;
  std::uint64_t burn_in = default_burn_in;

  void validate() const {
    sp.validate();
    if (!(sp.alpha > 1.0 && sp.alpha < 2.0))
      throw invalid_parameter("the fast-slow integrator requires alpha in (1,2)");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw invalid_parameter("eps must be positive");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
      throw invalid_parameter("horizon must be finite and >= 0");
    if (!std::isfinite(xi)) throw invalid_parameter("initial condition must be finite");
    check_grid(record_times, horizon);
  }
};

namespace detail {

template <class Model>
double fastslow_update(double z, double v_n, double eps, double eps_gamma, const Model& m,
                       std::uint64_t step) {
  const double next = z + eps * m.a(z) + eps_gamma * m.b(z) * v_n;
  if (!std::isfinite(next))
    throw diverged_trajectory("slow variable became non-finite", step);
  return next;
}

}  // namespace detail

/// One slow step z + eps a(z) + eps^g b(z) chi v(x).
template <class Model>
double fastslow_step(double z, double x, ChiState c, const FastSlowConfig& cfg, const Model& m,
                     const ThalerParams& p, std::uint64_t step = 0) {
  const FastObservable v = FastObservable::make(cfg.sp, p);
  return detail::fastslow_update(z, c.chi * v(x), cfg.eps, std::pow(cfg.eps, p.gamma), m, step);
}

/// Integrate to cfg.horizon and return z_hat at cfg.record_times.
template <class Model>
SamplePath solve_sde(const FastSlowConfig& cfg, const Model& m, RealisationStreams& streams) {
  cfg.validate();
  const ThalerParams p = ThalerParams::from_alpha(cfg.sp.alpha);
  const FastObservable v = FastObservable::make(cfg.sp, p);
  const double eps_gamma = std::pow(cfg.eps, p.gamma);

  OrbitState orbit;
  orbit.x = cfg.initial == InitialMeasure::invariant
                ? sample_x0_burnin(p, streams.initial, cfg.burn_in)
                : uniform_open(streams.initial);
  orbit.kick_stream = &streams.kicks;
  SignStream signs(cfg.sp.beta, streams.signs);
  ChiState chi;

  SamplePath path;
  path.times = cfg.record_times;
  path.values.reserve(cfg.record_times.size());
  std::vector<std::uint64_t> record_steps;
  record_steps.reserve(cfg.record_times.size());
  for (const double t : cfg.record_times) record_steps.push_back(floor_index(t / cfg.eps));
  const std::uint64_t total = floor_index(cfg.horizon / cfg.eps);

  auto next_record = record_steps.begin();
  double z = cfg.xi;
  for (std::uint64_t n = 0;; ++n) {
    while (next_record != record_steps.end() && *next_record == n) {
      path.values.push_back(z);
      ++next_record;
    }
    if (n >= total) break;
    // v^(n) uses chi^(n) = chi_{n-1}...chi_0, so chi absorbs delta_n only
    // after v^(n) is formed.
    const double v_n = chi.chi * v(orbit.x);
    chi = chi_update(chi, orbit.x, p, signs);
    z = detail::fastslow_update(z, v_n, cfg.eps, eps_gamma, m, n);
    orbit = orbit_advance(orbit, p, cfg.perturbation);
  }
  return path;
}

/// Fixed points of the slow map with the fast observable frozen at its
/// laminar value +-v_laminar: roots of eps a(z) + eps^g b(z) w in [lo, hi],
/// located by a sign-change scan on `samples` points and bisection. These
/// produce spurious narrow peaks in long-run densities.
template <class Model>
std::vector<double> spurious_fixed_points(const Model& m, double eps, const StableParams& sp,
                                          double lo, double hi, std::size_t samples = 200000) {
  const ThalerParams p = ThalerParams::from_alpha(sp.alpha);
  const FastObservable v = FastObservable::make(sp, p);
  const double eps_gamma = std::pow(eps, p.gamma);
  std::vector<double> roots;
  for (const double w : {v.laminar, -v.laminar}) {
    auto f = [&](double z) { return eps * m.a(z) + eps_gamma * m.b(z) * w; };
    double z0 = lo;
    double f0 = f(z0);
    for (std::size_t i = 1; i <= samples; ++i) {
      const double z1 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
      const double f1 = f(z1);
      if (f0 == 0.0) {
        roots.push_back(z0);
      } else if (std::isfinite(f0) && std::isfinite(f1) && (f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
        double a = z0, b = z1, fa = f0;
        for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
          const double mid = 0.5 * (a + b);
          const double fm = f(mid);
          if ((fm < 0.0) == (fa < 0.0)) { a = mid; fa = fm; } else { b = mid; }
        }
        roots.push_back(0.5 * (a + b));
      }
      z0 = z1;
      f0 = f1;
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());
  return roots;
}

/// Closed form for Example 2: z* = 0 and z* = -q +- sqrt(q^2 + 1) with
/// q = +-(1/2) eps^{g-1} v_laminar.
inline std::vector<double> example2_spurious_fixed_points(double eps, const StableParams& sp) {
  const ThalerParams p = ThalerParams::from_alpha(sp.alpha);
  const FastObservable v = FastObservable::make(sp, p);
  std::vector<double> roots{0.0};
  for (const double sign : {1.0, -1.0}) {
    const double q = sign * 0.5 * std::pow(eps, p.gamma - 1.0) * v.laminar;
    roots.push_back(-q + std::sqrt(q * q + 1.0));
    roots.push_back(-q - std::sqrt(q * q + 1.0));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace stablemap
