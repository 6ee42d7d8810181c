#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stablemap/stats.hpp"
#include "stablemap/thaler.hpp"

using namespace stablemap;

namespace {

double circular_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace

TEST(BranchPoint, KnownValues) {
  EXPECT_EQ(solve_x_star(0.0), 0.5);
  EXPECT_NEAR(solve_x_star(0.625), 0.5770797897302037, 1e-14);
  EXPECT_NEAR(solve_x_star(2.0), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(solve_x_star(1.25), 0.6429855413452141, 1e-14);
  EXPECT_NEAR(solve_x_star(2.0 / 3.0), 0.5818382339632507, 1e-14);
}

TEST(BranchPoint, ResidualAcrossGammas) {
  for (double g = 0.05; g < 3.0; g += 0.05) {
    if (std::abs(g - 1.0) < 1e-9) continue;
    const double xs = solve_x_star(g);
    const double c = 1.0 - g;
    EXPECT_NEAR(std::pow(xs, c) + std::pow(1.0 + xs, c), 2.0, 1e-13) << "gamma " << g;
    EXPECT_NEAR(xs, oracle::branch_point(g), 1e-13) << "gamma " << g;
    EXPECT_GT(xs, 0.0);
    EXPECT_LT(xs, 1.0);
  }
}

TEST(BranchPoint, IsFast) {
  const auto start = std::chrono::steady_clock::now();
  double sink = 0.0;
  for (int i = 0; i < 100; ++i) sink += solve_x_star(0.625 + 1e-6 * i);
  const double per_call =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 100.0;
  EXPECT_GT(sink, 0.0);
  EXPECT_LT(per_call, 1e-3);
}

TEST(BranchPoint, RejectsBadGamma) {
  EXPECT_THROW(solve_x_star(1.0), invalid_parameter);
  EXPECT_THROW(solve_x_star(-0.1), invalid_parameter);
  EXPECT_THROW(solve_x_star(std::nan("")), invalid_parameter);
  EXPECT_THROW(ThalerParams::from_gamma(1.0), invalid_parameter);
  EXPECT_THROW(ThalerParams::from_alpha(1.0), invalid_parameter);
}

TEST(ThalerParams, DerivedQuantities) {
  const auto p = ThalerParams::from_alpha(1.6);
  EXPECT_DOUBLE_EQ(p.gamma, 0.625);
  EXPECT_NEAR(p.x_star, 0.5770797897302037, 1e-14);
  const double mass = oracle::integrate([](double x) { return oracle::density(x, 0.625); }, p.x_star, 1.0);
  EXPECT_NEAR(p.mu_y_mass, mass, 1e-12);
  EXPECT_FALSE(p.in_y(p.x_star));
  EXPECT_TRUE(p.in_y(std::nextafter(p.x_star, 1.0)));
}

TEST(ThalerStep, KnownValues) {
  const auto p = ThalerParams::from_gamma(0.625);
  EXPECT_NEAR(thaler_step(0.25, p), 0.36021348515126374, 1e-14);
  EXPECT_NEAR(thaler_step(0.8, p), 0.50725708627008053, 1e-14);
  EXPECT_EQ(thaler_step(0.3, ThalerParams::from_gamma(0.0)), 0.6);
  EXPECT_EQ(thaler_step(0.0, p), 0.0);
  EXPECT_EQ(thaler_step(1.0, p), 0.0);
}

TEST(ThalerStep, DoublingMapIsExact) {
  const auto p = ThalerParams::from_gamma(0.0);
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 10000.0;
    const double expected = 2.0 * x - std::floor(2.0 * x);
    ASSERT_EQ(thaler_step(x, p), x == 1.0 ? 0.0 : expected) << x;
  }
}

TEST(ThalerStep, MatchesProductForm) {
  for (const double g : {0.3, 0.625, 2.0 / 3.0, 0.9, 1.25, 2.0}) {
    const auto p = ThalerParams::from_gamma(g);
    for (int i = 1; i < 2000; ++i) {
      const double x = i / 2000.0;
      if (std::abs(x - p.x_star) < 1e-6) continue;
      ASSERT_LT(circular_distance(thaler_step(x, p), oracle::map_product_form(x, g)), 1e-12)
          << "gamma " << g << " x " << x;
    }
  }
}

TEST(ThalerStep, TwoIncreasingFullBranches) {
  for (const double g : {0.625, 2.0 / 3.0, 1.25}) {
    const auto p = ThalerParams::from_gamma(g);
    for (const auto& [lo, hi] : {std::pair{0.0, p.x_star}, std::pair{p.x_star, 1.0}}) {
      double prev = -1.0;
      const int count = 10000;
      for (int i = 1; i < count; ++i) {
        const double x = lo + (hi - lo) * i / count;
        const double y = thaler_step(x, p);
        ASSERT_GT(y, prev) << "gamma " << g << " x " << x;
        prev = y;
      }
      EXPECT_LT(thaler_step(lo + (hi - lo) * 1e-6, p), 1e-3);
      EXPECT_GT(thaler_step(hi - (hi - lo) * 1e-6, p), 1.0 - 1e-3);
    }
  }
}

TEST(ThalerStep, StaysInUnitInterval) {
  Engine rng(11);
  for (const double g : {0.0, 0.625, 1.25}) {
    const auto p = ThalerParams::from_gamma(g);
    for (int i = 0; i < 100000; ++i) {
      const double y = thaler_step(uniform01(rng), p);
      ASSERT_GE(y, 0.0);
      ASSERT_LT(y, 1.0);
    }
  }
}

TEST(InvariantDensity, Values) {
  const auto p = ThalerParams::from_gamma(0.625);
  EXPECT_NEAR(invariant_density(1.0, p, false), 1.6484197773255048, 1e-14);
  EXPECT_DOUBLE_EQ(invariant_density(0.3, ThalerParams::from_gamma(0.0), true), 1.0);
  EXPECT_THROW(invariant_density(0.0, p, false), singular_point);
  EXPECT_THROW(invariant_density(1.5, p, false), invalid_parameter);
  EXPECT_THROW(invariant_density(0.5, ThalerParams::from_gamma(1.25), true), invalid_parameter);
  EXPECT_GT(invariant_density(0.5, ThalerParams::from_gamma(1.25), false), 0.0);
}

TEST(InvariantDensity, NormalisedIntegratesToOne) {
  for (const double g : {0.3, 0.625, 2.0 / 3.0, 0.9}) {
    const auto p = ThalerParams::from_gamma(g);
    const double total = oracle::integrate([&](double x) { return invariant_density(x, p, true); }, 0.0, 1.0);
    EXPECT_NEAR(total, 1.0, 1e-10) << "gamma " << g;
  }
}

TEST(InvariantDensity, IsInvariant) {
  // Integrals of f(Tx) and f(x) against the density agree.
  for (const double g : {0.625, 2.0 / 3.0}) {
    const auto p = ThalerParams::from_gamma(g);
    const std::vector<std::function<double(double)>> fs{
        [](double x) { return x; }, [](double x) { return x * x; }, [](double x) { return std::cos(x); }};
    for (const auto& f : fs) {
      auto h = [&](double x) { return invariant_density(x, p, true); };
      const double direct = oracle::integrate([&](double x) { return f(x) * h(x); }, 0.0, 1.0);
      const double pushed = oracle::integrate([&](double x) { return f(thaler_step(x, p)) * h(x); }, 0.0, p.x_star) +
                            oracle::integrate([&](double x) { return f(thaler_step(x, p)) * h(x); }, p.x_star, 1.0);
      EXPECT_NEAR(pushed, direct, 1e-6) << "gamma " << g;
    }
  }
}

TEST(ReturnSetSampler, Endpoints) {
  const auto p = ThalerParams::from_gamma(0.625);
  EXPECT_EQ(y0_from_uniform(0.0, p), p.x_star);
  EXPECT_EQ(y0_from_uniform(1.0, p), 1.0);
  EXPECT_DOUBLE_EQ(y0_from_uniform(0.5, ThalerParams::from_gamma(0.0)), 0.75);
}

TEST(ReturnSetSampler, InvertsTheConditionalCdf) {
  for (const double g : {0.625, 2.0 / 3.0, 1.25}) {
    const auto p = ThalerParams::from_gamma(g);
    for (int i = 1; i < 1000; ++i) {
      const double u = i / 1000.0;
      const double y = y0_from_uniform(u, p);
      ASSERT_GT(y, p.x_star);
      ASSERT_LE(y, 1.0);
      ASSERT_NEAR(y_cdf(y, p), u, 1e-12);
    }
  }
}

TEST(ReturnSetSampler, CdfMatchesQuadrature) {
  const auto p = ThalerParams::from_gamma(0.625);
  for (const double y : {0.6, 0.7, 0.85, 0.99}) {
    const double num = oracle::integrate([](double x) { return oracle::density(x, 0.625); }, p.x_star, y);
    EXPECT_NEAR(y_cdf(y, p), num / p.mu_y_mass, 1e-12);
  }
}

TEST(ReturnSetSampler, SampleMeanMatchesQuadrature) {
  const double g = 0.625;
  const auto p = ThalerParams::from_gamma(g);
  auto h = [g](double x) { return oracle::density(x, g); };
  const double mass = oracle::integrate(h, p.x_star, 1.0);
  const double mean = oracle::integrate([&](double x) { return x * h(x); }, p.x_star, 1.0) / mass;
  const double second = oracle::integrate([&](double x) { return x * x * h(x); }, p.x_star, 1.0) / mass;
  EXPECT_NEAR(mean, 0.7790362408598576, 1e-12);

  Engine rng(2024);
  const std::size_t n = 1'000'000;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += sample_y0(p, rng);
  const double se = std::sqrt((second - mean * mean) / n);
  EXPECT_LT(std::abs(sum / n - mean), 3.0 * se);
}

TEST(BurnIn, ZeroBurnIsTheUniformDraw) {
  const auto p = ThalerParams::from_gamma(0.625);
  Engine a(5), b(5);
  EXPECT_EQ(sample_x0_burnin(p, a, 0), uniform_open(b));
}

TEST(BurnIn, RejectsInfiniteMeasure) {
  Engine rng(1);
  EXPECT_THROW(sample_x0_burnin(ThalerParams::from_gamma(1.25), rng), invalid_parameter);
}

TEST(BurnIn, DoublingMapIsUniform) {
  const auto p = ThalerParams::from_gamma(0.0);
  Engine rng(9);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_x0_burnin(p, rng);
  EXPECT_LT(stats::ks_distance_to_cdf(xs, [](double x) { return x; }), 0.01);
}

TEST(BurnIn, ApproachesInvariantDensity) {
  const double g = 0.625;
  const auto p = ThalerParams::from_gamma(g);
  Engine rng(77);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = sample_x0_burnin(p, rng, 10000);
  const double norm = oracle::density_normaliser(g);
  // Check the closed-form distribution function against quadrature before using it.
  auto cdf = [g, norm](double x) {
    const double c = 1.0 - g;
    return norm * (std::pow(x, c) + std::pow(1.0 + x, c) - 1.0) / c;
  };
  for (const double x : {0.01, 0.3, 0.7}) ASSERT_NEAR(cdf(x), oracle::invariant_cdf(x, g), 1e-10);
  EXPECT_LT(stats::ks_distance_to_cdf(xs, cdf), 0.01);
}

TEST(Perturbation, DisabledPolicyIsThePlainMap) {
  const auto p = ThalerParams::from_gamma(0.625);
  OrbitState s;
  s.x = 0.123;
  double x = 0.123;
  for (int i = 0; i < 100000; ++i) {
    s = orbit_advance(s, p, PerturbationPolicy::off());
    x = thaler_step(x, p);
    ASSERT_EQ(s.x, x);
  }
  EXPECT_EQ(s.perturbations, 0u);
  EXPECT_EQ(s.step_count, 100000u);
}

TEST(Perturbation, RequiresKickStream) {
  const auto p = ThalerParams::from_gamma(0.625);
  OrbitState s;
  s.x = 0.0;
  EXPECT_THROW(orbit_advance(s, p, PerturbationPolicy::on()), invalid_parameter);
}

TEST(Perturbation, EscapesTheFixedPoint) {
  const auto p = ThalerParams::from_gamma(0.0);
  Engine kicks(3);
  OrbitState s;
  s.x = 0.5;
  s.kick_stream = &kicks;
  s = orbit_advance(s, p, PerturbationPolicy::on());
  EXPECT_EQ(s.perturbations, 1u);
  EXPECT_GE(s.x, 0.0);
  EXPECT_LT(s.x, 1.0);
}

TEST(Perturbation, NoShortCyclesInLongOrbit) {
  const auto p = ThalerParams::from_gamma(0.625);
  Engine rng(31), kicks(32);
  OrbitState s;
  s.x = sample_x0_burnin(p, rng);
  s.kick_stream = &kicks;
  const std::size_t window = 1000;
  std::vector<double> recent(window, -1.0);
  std::unordered_multiset<double> seen;
  for (std::uint64_t n = 0; n < 10'000'000; ++n) {
    s = orbit_advance(s, p, PerturbationPolicy::on());
    ASSERT_GE(s.x, 0.0);
    ASSERT_LT(s.x, 1.0);
    // A repeat within the last `window` steps would be a cycle of period <= window.
    ASSERT_EQ(seen.count(s.x), 0u) << "repeat at step " << n;
    double& slot = recent[n % window];
    if (slot >= 0.0) seen.erase(seen.find(slot));
    slot = s.x;
    seen.insert(s.x);
  }
  EXPECT_GT(s.perturbations, 0u);
}

TEST(Perturbation, LongOrbitOccupationMatchesDensity) {
  const double g = 0.625;
  const auto p = ThalerParams::from_gamma(g);
  Engine rng(41), kicks(42);
  OrbitState s;
  s.x = sample_x0_burnin(p, rng);
  s.kick_stream = &kicks;
  std::vector<double> xs(10'000'000);
  for (auto& x : xs) {
    s = orbit_advance(s, p, PerturbationPolicy::on());
    x = s.x;
  }
  const double norm = oracle::density_normaliser(g);
  const double c = 1.0 - g;
  auto cdf = [&](double x) { return norm * (std::pow(x, c) + std::pow(1.0 + x, c) - 1.0) / c; };
  EXPECT_LT(stats::ks_distance_to_cdf(xs, cdf), 0.02);
}
