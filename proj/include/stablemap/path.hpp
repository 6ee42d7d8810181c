#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stablemap/errors.hpp"

namespace stablemap {

/// Values on an increasing time grid. Lévy paths are read as càdlàg step
/// functions; SDE paths are slow-time samples.
struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const noexcept { return times.size(); }
};

/// floor(x) for a product like n*t or t/eps that is meant to be an integer
/// but may land an ulp below one in floating point.
inline std::uint64_t floor_index(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw invalid_parameter("index must be finite and >= 0");
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::floor(x));
}

/// `count + 1` equispaced points from `lo` to `hi` inclusive.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count == 0) return {lo};
  std::vector<double> grid(count + 1);
  for (std::size_t i = 0; i <= count; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count);
  grid.back() = hi;
  return grid;
}

inline void check_grid(const std::vector<double>& grid, double horizon) {
  if (grid.empty()) throw invalid_parameter("time grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw invalid_parameter("time grid must be sorted");
  if (grid.front() < 0.0 || grid.back() > horizon)
    throw invalid_parameter("time grid must lie inside [0, horizon]");
}

}  // namespace stablemap
