#pragma once

// Càdlàg alpha-stable Lévy paths from signed return-time partial sums:
//
//   W_n(t) = eta (n d)^{-g} (sum_{j < floor(n t)} delta_j tau_j - n t beta l).

#include <cstdint>
#include <vector>

#include "stablemap/path.hpp"
#include "stablemap/stable.hpp"

namespace stablemap {

inline constexpr std::size_t default_levy_grid_points = 1000;

/// Evaluate eta * W_n on `grid` (sorted, nonnegative). Uses one y0 draw and
/// floor(n * grid.back()) return times.
inline SamplePath levy_path(std::uint64_t n, const StableParams& sp, const std::vector<double>& grid,
                            RealisationStreams& streams, const GeneratorOptions& opts = {}) {
  sp.validate();
  if (n == 0) throw invalid_parameter("n must be at least 1");
  check_grid(grid, grid.empty() ? 0.0 : grid.back());
  const ThalerParams p = ThalerParams::from_alpha(sp.alpha);
  const StableConstants k = stable_constants(sp.alpha);
  const double nn = static_cast<double>(n);

  ReturnTimeStream returns(sample_y0(p, streams.initial), p, opts.max_iter_guard,
                           opts.perturbation, &streams.kicks);
  SignStream signs(sp.beta, streams.signs);

  SamplePath path;
  path.times = grid;
  path.values.reserve(grid.size());
  std::int64_t sum = 0;
  std::uint64_t collected = 0;
  for (const double t : grid) {
    const std::uint64_t needed = floor_index(nn * t);
    for (; collected < needed; ++collected) {
      const auto tau = static_cast<std::int64_t>(returns.next());
      sum += signs.next() * tau;
    }
    const double w = detail::normalise_sum(static_cast<double>(sum), n, t, sp.beta, k, p.gamma);
    path.values.push_back(scale_skew(w, sp.eta, false));
  }
  return path;
}

}  // namespace stablemap
