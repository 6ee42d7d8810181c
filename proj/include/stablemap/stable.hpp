#pragma once

// Deterministic generation of alpha-stable laws from return times of the
// Thaler map (g = 1/alpha) to Y = (x*, 1].
//
// With tau_j the successive return times of an orbit started at y0 ~ mu_Y and
// delta_j i.i.d. signs with P(delta = +-1) = (1 +- beta)/2,
//
//   (n d)^{-g} (sum_{j<n} delta_j tau_j - n beta l)  ->  X_{alpha,1,beta},
//
// where d = alpha^alpha (1-g)/(2^{1-g}-1) Gamma(1-alpha) cos(alpha pi/2) and
// l = (1 - 2^{g-1})^{-1} for alpha > 1 (the Kac mean return time), 0 otherwise.
// The law X_{alpha,eta,beta} has characteristic function
// exp(-eta^alpha |t|^alpha (1 - i beta sgn(t) tan(alpha pi/2))).

#include <cmath>
#include <cstdint>
#include <numbers>

#include "stablemap/errors.hpp"
#include "stablemap/rng.hpp"
#include "stablemap/thaler.hpp"

namespace stablemap {

struct StableParams {
  double alpha = 1.5;
  double eta = 1.0;
  double beta = 0.0;

  StableParams() = default;
  StableParams(double alpha_, double eta_, double beta_) : alpha(alpha_), eta(eta_), beta(beta_) {
    validate();
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0)
      throw invalid_parameter("alpha must lie in (0,1) or (1,2)");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw invalid_parameter("eta must be positive");
    if (!(beta >= -1.0 && beta <= 1.0)) throw invalid_parameter("beta must lie in [-1,1]");
  }
};

struct StableConstants {
  double g_alpha = 0.0;
  double e_alpha = 0.0;  // tail prefactor: mu_Y(tau > n) ~ e n^{-alpha}
  double d_alpha = 0.0;
  double ell_alpha = 0.0;
};

inline StableConstants stable_constants(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0)
    throw invalid_parameter("alpha must lie in (0,1) or (1,2)");
  const double gamma = 1.0 / alpha;
  // Gamma(1-a) for a in (1,2) sits between the poles at 0 and -1; step it up
  // through Gamma(2-a) / (1-a) instead.
  const double gamma_fn =
      alpha < 1.0 ? std::tgamma(1.0 - alpha) : std::tgamma(2.0 - alpha) / (1.0 - alpha);
  StableConstants k;
  k.g_alpha = gamma_fn * std::cos(alpha * std::numbers::pi / 2.0);
  k.e_alpha = std::pow(alpha, alpha) * (1.0 - gamma) / (std::exp2(1.0 - gamma) - 1.0);
  k.d_alpha = k.e_alpha * k.g_alpha;
  k.ell_alpha = alpha < 1.0 ? 0.0 : 1.0 / (1.0 - std::exp2(gamma - 1.0));
  return k;
}

inline constexpr std::uint64_t default_iteration_guard = 1'000'000'000ULL;

/// Successive return times to Y of a single orbit.
class ReturnTimeStream {
public:
  ReturnTimeStream(double y0, const ThalerParams& params,
                   std::uint64_t max_iter_guard = default_iteration_guard,
                   PerturbationPolicy policy = PerturbationPolicy::off(),
                   Engine* kick_stream = nullptr)
      : params_(params), guard_(max_iter_guard), policy_(policy) {
    orbit_.x = y0;
    orbit_.kick_stream = kick_stream;
  }

  /// Iterate until the orbit re-enters Y and return the number of steps.
  std::uint64_t next() {
    std::uint64_t tau = 0;
    if (!policy_.enabled) {
      double x = orbit_.x;
      do {
        x = thaler_step(x, params_);
        ++tau;
        if (orbit_.step_count + tau >= guard_ && !(x > params_.x_star)) {
          orbit_.x = x;
          orbit_.step_count += tau;
          throw guard_exceeded("return-time iteration guard exceeded", orbit_.step_count);
        }
        if (x == 0.0) {
          orbit_.x = x;
          orbit_.step_count += tau;
          throw trapped_orbit("orbit reached the fixed point 0", orbit_.step_count);
        }
      } while (!(x > params_.x_star));
      orbit_.x = x;
      orbit_.step_count += tau;
      orbit_.steps_since_perturbation += tau;
    } else {
      do {
        orbit_ = orbit_advance(orbit_, params_, policy_);
        ++tau;
        if (orbit_.step_count >= guard_ && !(orbit_.x > params_.x_star))
          throw guard_exceeded("return-time iteration guard exceeded", orbit_.step_count);
      } while (!(orbit_.x > params_.x_star));
    }
    ++returns_;
    return tau;
  }

  double position() const noexcept { return orbit_.x; }
  std::uint64_t iterations() const noexcept { return orbit_.step_count; }
  std::uint64_t returns() const noexcept { return returns_; }

private:
  ThalerParams params_;
  std::uint64_t guard_;
  PerturbationPolicy policy_;
  OrbitState orbit_;
  std::uint64_t returns_ = 0;
};

/// i.i.d. signs with P(+1) = (1 + beta)/2.
class SignStream {
public:
  SignStream(double beta, Engine& rng) : p_plus_(0.5 * (1.0 + beta)), rng_(&rng) {
    if (!(beta >= -1.0 && beta <= 1.0)) throw invalid_parameter("beta must lie in [-1,1]");
  }

  int next() { return uniform01(*rng_) < p_plus_ ? 1 : -1; }

private:
  double p_plus_;
  Engine* rng_;
};

/// Tuning shared by the return-time generators.
struct GeneratorOptions {
  std::uint64_t max_iter_guard = default_iteration_guard;
  PerturbationPolicy perturbation = PerturbationPolicy::off();
};

inline std::uint64_t default_sum_length(double alpha, double beta) {
  return (alpha < 1.0 && std::abs(beta) == 1.0) ? 50'000 : 10'000;
}

namespace detail {

inline void check_generator_params(const ThalerParams& p) {
  if (!(p.gamma > 0.5)) throw invalid_parameter("stable generation needs alpha = 1/gamma < 2");
}

/// (n d)^{-g} (S - n t beta l): the common normalisation of sums of signed
/// return times.
inline double normalise_sum(double signed_sum, std::uint64_t n, double t, double beta,
                            const StableConstants& k, double gamma) {
  const double nn = static_cast<double>(n);
  return std::pow(nn * k.d_alpha, -gamma) * (signed_sum - nn * t * beta * k.ell_alpha);
}

}  // namespace detail

/// Approximate draw of X_{alpha,1,beta} from n signed return times
/// (alpha = 1/p.gamma). y0 comes from `streams.initial`, the signs from
/// `streams.signs`.
inline double two_sided_sample(std::uint64_t n, double beta, const ThalerParams& p,
                               RealisationStreams& streams, const GeneratorOptions& opts = {}) {
  detail::check_generator_params(p);
  if (n == 0) throw invalid_parameter("n must be at least 1");
  const StableConstants k = stable_constants(p.alpha);
  ReturnTimeStream returns(sample_y0(p, streams.initial), p, opts.max_iter_guard,
                           opts.perturbation, &streams.kicks);
  SignStream signs(beta, streams.signs);
  std::int64_t sum = 0;
  for (std::uint64_t j = 0; j < n; ++j) {
    const auto tau = static_cast<std::int64_t>(returns.next());
    sum += signs.next() * tau;
  }
  return detail::normalise_sum(static_cast<double>(sum), n, 1.0, beta, k, p.gamma);
}

/// Approximate draw of X_{alpha,1,1}.
inline double one_sided_sample(std::uint64_t n, const ThalerParams& p, RealisationStreams& streams,
                               const GeneratorOptions& opts = {}) {
  detail::check_generator_params(p);
  if (n == 0) throw invalid_parameter("n must be at least 1");
  const StableConstants k = stable_constants(p.alpha);
  ReturnTimeStream returns(sample_y0(p, streams.initial), p, opts.max_iter_guard,
                           opts.perturbation, &streams.kicks);
  std::int64_t sum = 0;
  for (std::uint64_t j = 0; j < n; ++j) sum += static_cast<std::int64_t>(returns.next());
  return detail::normalise_sum(static_cast<double>(sum), n, 1.0, 1.0, k, p.gamma);
}

/// X_{alpha,c eta,beta} = c X_{alpha,eta,beta}; X_{alpha,eta,-beta} = -X_{alpha,eta,beta}.
inline double scale_skew(double x, double eta, bool flip) noexcept {
  return flip ? -eta * x : eta * x;
}

/// Approximate draw of X_{alpha,eta,beta}.
inline double stable_sample(std::uint64_t n, const StableParams& sp, RealisationStreams& streams,
                            const GeneratorOptions& opts = {}) {
  sp.validate();
  const ThalerParams p = ThalerParams::from_alpha(sp.alpha);
  return scale_skew(two_sided_sample(n, sp.beta, p, streams, opts), sp.eta, false);
}

}  // namespace stablemap
