#pragma once

// Least-squares fits of the two scaling laws observed for SML2:
//   decay:  <b>(n, t) = a * n^2 * 2^(-b t / n)   (mean blocking pairs after t steps)
//   median: t_med(n)  = c * n * (d + 2 log2 n)
// The decay law is fitted linearly in log2 space:
//   log2<b> - 2 log2 n = log2 a - b (t/n).
// The median law is linear in the basis {n, n log2 n} with coefficients
// (c d, 2 c).

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "smls/model.hpp"

namespace smls {

enum class FitModel { BlockingDecay, TMed };

inline const char* to_string(FitModel m) { return m == FitModel::BlockingDecay ? "BLOCKING_DECAY" : "TMED"; }

struct DecayPoint {
  double n = 0;
  double t = 0;
  double mean_nbp = 0;
};

struct MedianPoint {
  double n = 0;
  double median_steps = 0;
};

struct FitResult {
  FitModel model = FitModel::BlockingDecay;
  double first = 0;   // a or c
  double second = 0;  // b or d
  /// Sum of squared errors in the space the model was fitted in.
  double residual = 0;
  double r_squared = 0;
  std::size_t points = 0;
};

namespace detail {

struct Line2 {
  double u = 0;  // coefficient of the first basis function
  double v = 0;  // coefficient of the second
  double sse = 0;
  double r2 = 0;
};

// Least squares y ~ u*f + v*g via the 2x2 normal equations.
inline Line2 least_squares(std::span<const double> f, std::span<const double> g, std::span<const double> y) {
  double ff = 0, fg = 0, gg = 0, fy = 0, gy = 0, ysum = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ff += f[i] * f[i];
    fg += f[i] * g[i];
    gg += g[i] * g[i];
    fy += f[i] * y[i];
    gy += g[i] * y[i];
    ysum += y[i];
  }
  const double det = ff * gg - fg * fg;
  if (!(std::abs(det) > 1e-12 * std::max(1.0, ff * gg)))
    throw Error(ErrorKind::DegenerateFit, "singular normal equations");
  Line2 out;
  out.u = (fy * gg - gy * fg) / det;
  out.v = (gy * ff - fy * fg) / det;
  const double mean = ysum / static_cast<double>(y.size());
  double sst = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - out.u * f[i] - out.v * g[i];
    out.sse += e * e;
    sst += (y[i] - mean) * (y[i] - mean);
  }
  out.r2 = sst > 0 ? 1.0 - out.sse / sst : 1.0;
  return out;
}

}  // namespace detail

/// Points with a zero mean are skipped (log undefined).
inline FitResult fit_blocking_decay(std::span<const DecayPoint> data) {
  std::vector<double> ones, x, y;
  for (const auto& p : data) {
    if (!(p.mean_nbp > 0) || !(p.n > 0)) continue;
    ones.push_back(1.0);
    x.push_back(p.t / p.n);
    y.push_back(std::log2(p.mean_nbp) - 2.0 * std::log2(p.n));
  }
  if (y.size() < 3) throw Error(ErrorKind::InsufficientData, "need at least 3 positive points");
  const auto line = detail::least_squares(ones, x, y);
  return {FitModel::BlockingDecay, std::exp2(line.u), -line.v, line.sse, line.r2, y.size()};
}

inline FitResult fit_tmed(std::span<const MedianPoint> data) {
  if (data.size() < 3) throw Error(ErrorKind::InsufficientData, "need at least 3 sizes");
  std::vector<double> lin, nlog, y;
  for (const auto& p : data) {
    lin.push_back(p.n);
    nlog.push_back(p.n * std::log2(p.n));
    y.push_back(p.median_steps);
  }
  const auto line = detail::least_squares(lin, nlog, y);
  const double c = line.v / 2.0;
  if (c == 0.0) throw Error(ErrorKind::DegenerateFit, "zero n log n coefficient");
  return {FitModel::TMed, c, line.u / c, line.sse, line.r2, y.size()};
}

inline double decay_model(double a, double b, double n, double t) { return a * n * n * std::exp2(-b * t / n); }
inline double tmed_model(double c, double d, double n) { return c * n * (d + 2.0 * std::log2(n)); }

}  // namespace smls
