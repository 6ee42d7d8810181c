#pragma once

// Coefficient models for scalar Marcus SDEs dZ = a(Z) dt + b(Z) <> dW, and the
// two double-well examples shipped as built-ins.

#include <cmath>
#include <functional>
#include <string>

#include "stablemap/errors.hpp"
#include "stablemap/stable.hpp"

namespace stablemap {

/// Drift and diffusion as caller-supplied handles. The caller asserts a is
/// C^{1+delta} and b is C^{alpha+delta}; both must be safe to call from
/// several threads at once.
struct CoefficientModel {
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;
  std::string name = "custom";

  double a(double z) const { return drift(z); }
  double b(double z) const { return diffusion(z); }
};

/// Example 1: V(Z) = A ((Z - a0)^2 / b0^2 - 1)^2, b(Z) = s sqrt(1 - (Z/B)^2).
/// b is undefined for |Z| > B and evaluates to NaN there.
struct Example1 {
  double A = 20.0;
  double a0 = 400.0;
  double b0 = 2.0;
  double B = 500.0;
  double s = 10.0;

  double a(double z) const noexcept {
    const double u = z - a0;
    return -4.0 * A / (b0 * b0 * b0 * b0) * u * (u * u - b0 * b0);
  }
  double b(double z) const noexcept {
    const double r = z / B;
    return s * std::sqrt(1.0 - r * r);
  }

  /// Z~ = B asin(Z / B) removes the multiplicative noise.
  double to_transformed(double z) const { return B * std::asin(z / B); }
  double from_transformed(double zt) const { return B * std::sin(zt / B); }

  /// Drift of the transformed SDE dZ~ = a~(Z~) dt + s dW. |cos(Z~/B)| is
  /// floored at `cos_floor`; `floored` reports whether the floor was active.
  double transformed_drift(double zt, bool* floored = nullptr, double cos_floor = 1e-12) const {
    const double zb = B * std::sin(zt / B) - a0;
    double c = std::abs(std::cos(zt / B));
    const bool hit = c < cos_floor;
    if (hit) c = cos_floor;
    if (floored != nullptr) *floored = hit;
    return -4.0 * A / (b0 * b0 * b0 * b0) / c * zb * (zb * zb - b0 * b0);
  }

  static StableParams default_noise() { return StableParams(1.5, 0.5, 0.0); }
  static constexpr double default_xi = 410.0;
  static constexpr const char* name = "example1";
};

/// Example 2: a(Z) = Z - Z^3, b(Z) = -Z^2. Z = 0 is a natural boundary:
/// writing a = Z g1(Z), b = Z g2(Z) shows the Marcus solution keeps its sign.
struct Example2 {
  double a(double z) const noexcept { return z - z * z * z; }
  double b(double z) const noexcept { return -z * z; }

  /// Z~ = 1/Z gives dZ~ = (1/Z~ - Z~) dt + dW.
  static double transformed_drift(double zt) noexcept { return 1.0 / zt - zt; }

  static StableParams default_noise() { return StableParams(1.5, 0.5, 0.5); }
  static constexpr double default_xi = 0.2341;
  static constexpr const char* name = "example2";
};

template <class Model>
CoefficientModel to_coefficient_model(Model m) {
  return CoefficientModel{[m](double z) { return m.a(z); }, [m](double z) { return m.b(z); },
                          Model::name};
}

inline CoefficientModel builtin_model(const std::string& name) {
  if (name == Example1::name) return to_coefficient_model(Example1{});
  if (name == Example2::name) return to_coefficient_model(Example2{});
  throw invalid_parameter("unknown built-in model '" + name + "' (expected example1 or example2)");
}

}  // namespace stablemap
