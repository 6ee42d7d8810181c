#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stablemap {

/// A parameter lies outside the admissible set of an operation.
class invalid_parameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation at a point where the requested quantity diverges.
class singular_point : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The per-realisation iteration budget ran out before the requested return
/// times were collected.
class guard_exceeded : public std::runtime_error {
public:
  guard_exceeded(const std::string& what, std::uint64_t iterations)
      : std::runtime_error(what), iterations_(iterations) {}

  std::uint64_t iterations() const noexcept { return iterations_; }

private:
  std::uint64_t iterations_;
};

/// The orbit landed on the fixed point 0 and can never return to Y.
class trapped_orbit : public guard_exceeded {
public:
  using guard_exceeded::guard_exceeded;
};

/// A slow variable became non-finite.
class diverged_trajectory : public std::runtime_error {
public:
  diverged_trajectory(const std::string& what, std::uint64_t step)
      : std::runtime_error(what), step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

private:
  std::uint64_t step_;
};

/// A transformed SDE reached a coordinate singularity.
class singularity_hit : public std::runtime_error {
public:
  singularity_hit(const std::string& what, std::uint64_t step)
      : std::runtime_error(what), step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

private:
  std::uint64_t step_;
};

/// A series with zero variance has no normalised autocorrelation.
class degenerate_series : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

}  // namespace stablemap
