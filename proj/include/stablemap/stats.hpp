#pragma once

// Estimators used to compare generators: two-sample Kolmogorov-Smirnov
// distance, histograms with monotone-cubic smoothing, autocorrelation, empirical
// survival functions and log-log tail fits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "stablemap/errors.hpp"

namespace stablemap::stats {

/// sup_x |F_a(x) - F_b(x)| between empirical CDFs.
inline double ks_distance(std::span<const double> sample_a, std::span<const double> sample_b) {
  if (sample_a.empty() || sample_b.empty()) throw invalid_parameter("ks_distance needs nonempty samples");
  std::vector<double> a(sample_a.begin(), sample_a.end());
  std::vector<double> b(sample_b.begin(), sample_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// One-sample distance sup_x |F_n(x) - F(x)| against a continuous CDF.
template <class Cdf>
double ks_distance_to_cdf(std::span<const double> sample, Cdf&& cdf) {
  if (sample.empty()) throw invalid_parameter("ks_distance_to_cdf needs a nonempty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Normalised autocorrelation C(k) for k = 0..max_lag, with lag-k products
/// averaged over the N - k available pairs and divided by the lag-0 variance.
inline std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n <= max_lag) throw invalid_parameter("series must be longer than max_lag");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = series[i] - mean;
  double var = 0.0;
  for (const double c : centred) var += c * c;
  var /= static_cast<double>(n);
  if (!(var > 0.0)) throw degenerate_series("series has zero variance");
  std::vector<double> out(max_lag + 1);
  out[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += centred[i] * centred[i + k];
    out[k] = s / static_cast<double>(n - k) / var;
  }
  return out;
}

/// Histogram with probability mass per bin; mass sums to 1 over the samples
/// that fell inside the range.
struct DensityEstimate {
  std::vector<double> edges;
  std::vector<double> mass;
  std::size_t excluded = 0;  // samples outside [edges.front(), edges.back()]

  std::size_t bins() const noexcept { return mass.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  double density(std::size_t i) const { return mass[i] / width(i); }
  double total_mass() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }
};

inline std::size_t default_bin_count(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * std::cbrt(static_cast<double>(n)))));
}

struct HistogramOptions {
  std::size_t bins = 0;  // 0: ceil(2 N^{1/3})
  std::optional<std::pair<double, double>> range;
};

inline DensityEstimate histogram(std::span<const double> samples, const HistogramOptions& opts = {}) {
  if (samples.empty()) throw invalid_parameter("histogram needs samples");
  double lo = 0.0, hi = 0.0;
  if (opts.range) {
    std::tie(lo, hi) = *opts.range;
    if (!(hi > lo)) throw invalid_parameter("histogram range must satisfy lo < hi");
  } else {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = *mn;
    hi = *mx;
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  const std::size_t bins = opts.bins > 0 ? opts.bins : default_bin_count(samples.size());
  DensityEstimate est;
  est.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    est.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  est.edges.back() = hi;
  std::vector<std::uint64_t> counts(bins, 0);
  std::uint64_t inside = 0;
  for (const double x : samples) {
    if (!(x >= lo && x <= hi)) {
      ++est.excluded;
      continue;
    }
    auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
    if (k >= bins) k = bins - 1;
    ++counts[k];
    ++inside;
  }
  est.mass.resize(bins, 0.0);
  if (inside > 0)
    for (std::size_t i = 0; i < bins; ++i)
      est.mass[i] = static_cast<double>(counts[i]) / static_cast<double>(inside);
  return est;
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson) through
/// strictly increasing knots; constant extrapolation outside.
class MonotoneCubic {
public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size() || n == 0) throw invalid_parameter("knots and values must match");
    m_.assign(n, 0.0);
    if (n == 1) return;
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!(x_[i + 1] > x_[i])) throw invalid_parameter("knots must be strictly increasing");
      delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    }
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
      m_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (delta[i] == 0.0) {
        m_[i] = m_[i + 1] = 0.0;
        continue;
      }
      const double a = m_[i] / delta[i];
      const double b = m_[i + 1] / delta[i];
      const double r = a * a + b * b;
      if (r > 9.0) {
        const double t = 3.0 / std::sqrt(r);
        m_[i] = t * a * delta[i];
        m_[i + 1] = t * b * delta[i];
      }
    }
  }

  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
  }

private:
  std::vector<double> x_, y_, m_;
};

/// Smoothed density on `points` equispaced abscissae spanning the bin centres.
inline std::vector<std::pair<double, double>> smoothed_density(const DensityEstimate& est,
                                                               std::size_t points) {
  std::vector<double> xs(est.bins()), ys(est.bins());
  for (std::size_t i = 0; i < est.bins(); ++i) {
    xs[i] = est.center(i);
    ys[i] = est.density(i);
  }
  const MonotoneCubic spline(xs, ys);
  std::vector<std::pair<double, double>> out;
  if (points < 2 || xs.size() < 2) {
    for (std::size_t i = 0; i < xs.size(); ++i) out.emplace_back(xs[i], ys[i]);
    return out;
  }
  out.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = xs.front() + (xs.back() - xs.front()) * static_cast<double>(i) /
                                      static_cast<double>(points - 1);
    out.emplace_back(x, std::max(0.0, spline(x)));
  }
  return out;
}

/// P(tau > n) for each n in `at`, from integer samples.
inline std::vector<std::pair<double, double>> survival_function(std::span<const std::uint64_t> samples,
                                                                std::span<const double> at) {
  std::vector<std::uint64_t> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(at.size());
  const double total = static_cast<double>(s.size());
  for (const double n : at) {
    const auto it = std::upper_bound(s.begin(), s.end(), n,
                                     [](double v, std::uint64_t e) { return v < static_cast<double>(e); });
    out.emplace_back(n, static_cast<double>(s.end() - it) / total);
  }
  return out;
}

/// `count` points logarithmically spaced on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = lo * std::pow(hi / lo, count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1));
  return g;
}

struct TailFit {
  double slope = 0.0;
  double prefactor = 0.0;
  double rms_residual = 0.0;  // in natural-log units
  std::size_t points = 0;
};

enum class TailWeighting {
  inverse_variance,  // weight P: var(log P_hat) ~ (1 - P) / (N P)
  uniform,
};

/// Least squares of log P against log n over points with n in [lo, hi] and
/// P > 0. Fitted model: P ~ prefactor * n^slope.
inline TailFit tail_exponent_fit(std::span<const std::pair<double, double>> survival, double lo, double hi,
                                 TailWeighting weighting = TailWeighting::inverse_variance) {
  std::vector<double> lx, ly, w;
  for (const auto& [n, p] : survival) {
    if (n < lo || n > hi || !(p > 0.0) || !(n > 0.0)) continue;
    lx.push_back(std::log(n));
    ly.push_back(std::log(p));
    w.push_back(weighting == TailWeighting::uniform ? 1.0 : p);
  }
  if (lx.size() < 10) throw invalid_parameter("tail fit needs at least 10 positive points in range");
  const double sw = std::accumulate(w.begin(), w.end(), 0.0);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += w[i] * lx[i];
    my += w[i] * ly[i];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
  }
  TailFit fit;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  fit.prefactor = std::exp(intercept);
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + fit.slope * lx[i]);
    rss += w[i] * r * r;
  }
  fit.rms_residual = std::sqrt(rss / sw);
  fit.points = lx.size();
  return fit;
}

/// Output of a long-run sampler: a subsampled trajectory, possibly cut short.
struct LongRun {
  std::vector<double> series;
  bool diverged = false;
};

struct StationaryDensityOptions {
  HistogramOptions histogram;
  std::vector<double> flagged_points;  // e.g. spurious fixed points of the slow map
  double flag_radius = 0.0;            // in units of bin width; 0 flags the containing bin
};

struct StationaryDensity {
  DensityEstimate estimate;
  std::vector<bool> flagged;  // per bin: near a flagged point
  bool partial = false;       // the run diverged before its horizon
};

/// Histogram of a long subsampled trajectory, with bins near the flagged
/// points annotated.
template <class Sampler>
StationaryDensity stationary_density(Sampler&& run, const StationaryDensityOptions& opts = {}) {
  LongRun r = run();
  if (r.series.empty()) throw invalid_parameter("long run produced no samples");
  StationaryDensity out;
  out.partial = r.diverged;
  out.estimate = histogram(r.series, opts.histogram);
  out.flagged.assign(out.estimate.bins(), false);
  for (const double z : opts.flagged_points) {
    for (std::size_t i = 0; i < out.estimate.bins(); ++i) {
      const double w = out.estimate.width(i);
      const double pad = opts.flag_radius * w;
      if (z >= out.estimate.edges[i] - pad && z <= out.estimate.edges[i + 1] + pad) out.flagged[i] = true;
    }
  }
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanStd mean_with_error(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace stablemap::stats
