#include "media/series.hpp"

#include <cmath>

#include "common/error.hpp"

namespace speakloop::media {

const char* SignalName(Signal signal) {
  switch (signal) {
    case Signal::kSmile: return "smile";
    case Signal::kMovement: return "movement";
    case Signal::kLoudness: return "loudness";
    case Signal::kPitch: return "pitch";
  }
  return "smile";
}

std::optional<Signal> ParseSignal(std::string_view name) {
  for (Signal s : kAllSignals)
    if (name == SignalName(s)) return s;
  return std::nullopt;
}

WindowStats SampleWindow(const BehaviorSeries& series, double center, double width) {
  if (!(width > 0.0)) Fail(ErrorKind::kParameter, "sample_window: width must be positive");
  WindowStats stats;
  const std::size_t n = series.size();
  if (n == 0) return stats;

  const double lo_t = center - width / 2.0;
  const double hi_t = center + width / 2.0;
  auto inside = [&](std::size_t i) {
    double t = series.TimeAt(i);
    return t >= lo_t && t <= hi_t;
  };

  // Estimate the index range, then settle the edges with the exact
  // timestamp predicate so rounding in the division cannot drop a sample.
  double lo_est = std::ceil((lo_t - series.t0) / series.dt);
  double hi_est = std::floor((hi_t - series.t0) / series.dt);
  if (hi_est < 0.0 || lo_est > static_cast<double>(n - 1) + 1.0) return stats;
  std::size_t lo = lo_est <= 0.0 ? 0 : static_cast<std::size_t>(lo_est);
  std::size_t hi = hi_est >= static_cast<double>(n - 1) ? n - 1 : static_cast<std::size_t>(hi_est);
  while (lo > 0 && inside(lo - 1)) --lo;
  while (lo < n && !inside(lo)) ++lo;
  while (hi + 1 < n && inside(hi + 1)) ++hi;
  while (hi > 0 && hi >= lo && !inside(hi)) --hi;
  if (lo >= n || hi < lo || !inside(hi)) return stats;

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (series.values[i]) {
      sum += *series.values[i];
      ++count;
    }
  }
  if (count == 0) return stats;
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (series.values[i]) {
      double d = *series.values[i] - mean;
      ss += d * d;
    }
  }
  stats.mean = mean;
  stats.sd = std::sqrt(ss / static_cast<double>(count));
  stats.count = count;
  stats.missing = false;
  return stats;
}

}  // namespace speakloop::media
