#pragma once

// Stochastic reference methods: the Chambers-Mallows-Stuck sampler for
// X_{alpha,eta,beta} and tamed Euler-Maruyama for the transformed forms of
// the two built-in examples.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "stablemap/errors.hpp"
#include "stablemap/models.hpp"
#include "stablemap/path.hpp"
#include "stablemap/rng.hpp"
#include "stablemap/stable.hpp"

namespace stablemap {

/// Precomputed CMS constants for one (alpha, beta). The characteristic
/// function exp(-eta^a |t|^a (1 - i b sgn(t) tan(pi a / 2))) is the
/// Samorodnitsky-Taqqu S_a(eta, b, 0) law, so eta is a pure scale and beta
/// passes through unchanged.
class CmsSampler {
public:
  explicit CmsSampler(const StableParams& sp) : sp_(sp) {
    sp.validate();
    const double zeta = sp.beta * std::tan(std::numbers::pi * sp.alpha / 2.0);
    shift_ = std::atan(zeta) / sp.alpha;
    scale_ = std::pow(1.0 + zeta * zeta, 1.0 / (2.0 * sp.alpha));
  }

  /// One draw from a (uniform, exponential) pair taken from `rng`.
  double operator()(Engine& rng) const {
    const double a = sp_.alpha;
    const double v = std::numbers::pi * (uniform_open(rng) - 0.5);
    const double w = standard_exponential(rng);
    const double av = a * (v + shift_);
    const double x = scale_ * std::sin(av) / std::pow(std::cos(v), 1.0 / a) *
                     std::pow(std::cos(v - av) / w, (1.0 - a) / a);
    return sp_.eta * x;
  }

  const StableParams& params() const noexcept { return sp_; }

private:
  StableParams sp_;
  double shift_ = 0.0;
  double scale_ = 1.0;
};

inline double cms_sample(const StableParams& sp, Engine& rng) { return CmsSampler(sp)(rng); }

/// z + a~ dt / (1 + |a~| dt) + dW when tamed, z + a~ dt + dW otherwise.
inline double em_step(double z, double dt, double drift_value, double dw, bool taming,
                      std::uint64_t step = 0) {
  if (!(dt > 0.0)) throw invalid_parameter("dt must be positive");
  const double increment =
      taming ? drift_value / (1.0 + std::abs(drift_value) * dt) * dt : drift_value * dt;
  const double next = z + increment + dw;
  if (!std::isfinite(next)) throw diverged_trajectory("Euler-Maruyama state became non-finite", step);
  return next;
}

template <class Drift>
double em_step(double z, double dt, Drift&& drift, double dw, bool taming, std::uint64_t step = 0)
  requires std::is_invocable_r_v<double, Drift, double>
{
  return em_step(z, dt, static_cast<double>(drift(z)), dw, taming, step);
}

struct EMConfig {
  double dt = 1e-4;
  double xi = 0.0;
  StableParams sp;
  double horizon = 1.0;
  std::vector<double> record_times{1.0};
  bool taming = true;

  void validate() const {
    sp.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw invalid_parameter("dt must be positive");
    if (!(horizon >= 0.0) || !std::isfinite(horizon))
      throw invalid_parameter("horizon must be finite and >= 0");
    check_grid(record_times, horizon);
  }
};

struct EMResult {
  SamplePath path;
  std::uint64_t drift_floor_hits = 0;    // steps where the cos floor was active
  std::uint64_t boundary_crossings = 0;  // sign changes of Z
};

namespace detail {

// Shared loop: integrate the transformed state zt with increments
// `noise_scale * dt^g * X`, mapping back through `to_original` at the record
// times. `drift` may throw to abort the realisation.
template <class Drift, class Back, class Check>
EMResult em_integrate(const EMConfig& cfg, double zt0, double noise_scale, Drift&& drift,
                      Back&& to_original, Check&& check, Engine& noise) {
  const CmsSampler cms(cfg.sp);
  const double dw_scale = noise_scale * std::pow(cfg.dt, 1.0 / cfg.sp.alpha);
  std::vector<std::uint64_t> record_steps;
  for (const double t : cfg.record_times) record_steps.push_back(floor_index(t / cfg.dt));
  const std::uint64_t total = floor_index(cfg.horizon / cfg.dt);

  EMResult out;
  out.path.times = cfg.record_times;
  out.path.values.reserve(cfg.record_times.size());
  auto next_record = record_steps.begin();
  double zt = zt0;
  double z_prev = to_original(zt);
  for (std::uint64_t n = 0;; ++n) {
    while (next_record != record_steps.end() && *next_record == n) {
      out.path.values.push_back(to_original(zt));
      ++next_record;
    }
    if (n >= total) break;
    zt = em_step(zt, cfg.dt, drift(zt, out), dw_scale * cms(noise), cfg.taming, n);
    check(zt, n);
    const double z = to_original(zt);
    if ((z < 0.0) != (z_prev < 0.0)) ++out.boundary_crossings;
    z_prev = z;
  }
  return out;
}

}  // namespace detail

/// Example 1 through Z~ = B asin(Z/B): tamed EM on dZ~ = a~ dt + s dW, mapped
/// back with Z = B sin(Z~/B). Reaching |Z~| >= pi B / 2 aborts with
/// singularity_hit.
inline EMResult em_solve_example1(const EMConfig& cfg, Engine& noise, const Example1& model = {}) {
  cfg.validate();
  if (!(std::abs(cfg.xi) < model.B)) throw invalid_parameter("example1 needs |xi| < B");
  const double wall = std::numbers::pi * model.B / 2.0;
  return detail::em_integrate(
      cfg, model.to_transformed(cfg.xi), model.s,
      [&](double zt, EMResult& out) {
        bool floored = false;
        const double a = model.transformed_drift(zt, &floored);
        if (floored) ++out.drift_floor_hits;
        return a;
      },
      [&](double zt) { return model.from_transformed(zt); },
      [&](double zt, std::uint64_t n) {
        if (std::abs(zt) >= wall) throw singularity_hit("transformed state reached the singularity", n);
      },
      noise);
}

/// Example 2 through Z~ = 1/Z: tamed EM on dZ~ = (1/Z~ - Z~) dt + dW, mapped
/// back with Z = 1/Z~. Sign changes of Z are counted, not suppressed.
inline EMResult em_solve_example2(const EMConfig& cfg, Engine& noise) {
  cfg.validate();
  if (!(cfg.xi > 0.0)) throw invalid_parameter("example2 needs xi > 0");
  return detail::em_integrate(
      cfg, 1.0 / cfg.xi, 1.0, [](double zt, EMResult&) { return Example2::transformed_drift(zt); },
      [](double zt) { return 1.0 / zt; },
      [](double zt, std::uint64_t n) {
        if (zt == 0.0) throw singularity_hit("transformed state hit 0", n);
      },
      noise);
}

}  // namespace stablemap
