#include "media/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::media {

BehaviorSeries MovementSeries(const FrameSequence& frames, int noise_threshold) {
  if (frames.size() < 2) Fail(ErrorKind::kEmptySeries, "movement: need at least 2 frames");
  if (noise_threshold < 0 || noise_threshold > 255)
    Fail(ErrorKind::kParameter, "movement: noise threshold outside [0, 255]");

  const auto& fs = frames.frames();
  const std::size_t pixels = fs.front().pixels.size();
  if (pixels == 0) Fail(ErrorKind::kFormat, "movement: empty frames");

  BehaviorSeries out;
  out.signal = Signal::kMovement;
  out.dt = 1.0 / frames.frame_rate();
  out.t0 = out.dt / 2.0;
  out.values.reserve(fs.size() - 1);
  const double denom = 255.0 * static_cast<double>(pixels);
  for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
    const auto& a = fs[i].pixels;
    const auto& b = fs[i + 1].pixels;
    std::uint64_t sum = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
      int d = std::abs(static_cast<int>(b[p]) - static_cast<int>(a[p])) - noise_threshold;
      if (d > 0) sum += static_cast<std::uint64_t>(d);
    }
    out.values.emplace_back(100.0 * static_cast<double>(sum) / denom);
  }
  return out;
}

namespace {

struct HopGrid {
  std::size_t window = 0;
  std::size_t hop = 0;
  std::size_t count = 0;
};

HopGrid MakeGrid(const AudioTrack& audio, double window, double hop, const char* who) {
  if (audio.empty()) Fail(ErrorKind::kEmptySeries, std::string(who) + ": empty audio");
  if (!(hop > 0.0) || !(window >= hop))
    Fail(ErrorKind::kParameter, std::string(who) + ": require window >= hop > 0");
  if (!(window < audio.duration()))
    Fail(ErrorKind::kParameter, std::string(who) + ": window must be shorter than the audio");
  HopGrid g;
  g.window = static_cast<std::size_t>(std::lround(window * audio.sample_rate()));
  g.hop = static_cast<std::size_t>(std::lround(hop * audio.sample_rate()));
  if (g.hop == 0 || g.window == 0) Fail(ErrorKind::kParameter, std::string(who) + ": window/hop below one sample");
  g.count = (audio.size() - g.window) / g.hop + 1;
  return g;
}

}  // namespace

double RangeLoudnessDb(std::span<const float> samples) {
  if (samples.empty()) return kSilenceFloorDb;
  double ss = 0.0;
  for (float s : samples) ss += static_cast<double>(s) * s;
  const double ms = ss / static_cast<double>(samples.size());
  if (ms <= 0.0) return kSilenceFloorDb;
  return std::max(kSilenceFloorDb, 10.0 * std::log10(ms));
}

BehaviorSeries LoudnessSeries(const AudioTrack& audio, const LoudnessParams& params) {
  const HopGrid g = MakeGrid(audio, params.window, params.hop, "loudness");
  const double rate = audio.sample_rate();
  BehaviorSeries out;
  out.signal = Signal::kLoudness;
  out.dt = static_cast<double>(g.hop) / rate;
  out.t0 = static_cast<double>(g.window) / 2.0 / rate;
  out.values.reserve(g.count);
  auto samples = audio.samples();
  for (std::size_t k = 0; k < g.count; ++k)
    out.values.emplace_back(RangeLoudnessDb(samples.subspan(k * g.hop, g.window)));
  return out;
}

namespace {

// Among local maxima within this fraction of the strongest one, the
// shortest lag wins. Suppresses octave-down errors on periodic input.
constexpr double kOctavePeakRatio = 0.9;

}  // namespace

BehaviorSeries PitchSeries(const AudioTrack& audio, const PitchParams& params) {
  const double rate = audio.sample_rate();
  if (!(params.f_min > 0.0) || !(params.f_min < params.f_max))
    Fail(ErrorKind::kParameter, "pitch: require 0 < f_min < f_max");
  if (params.f_max > rate / 2.0) Fail(ErrorKind::kParameter, "pitch: f_max above Nyquist");
  if (params.window < 2.0 / params.f_min)
    Fail(ErrorKind::kParameter, "pitch: window shorter than two periods of f_min");
  const HopGrid g = MakeGrid(audio, params.window, params.hop, "pitch");

  const auto lag_min = static_cast<std::size_t>(std::max(2.0, std::floor(rate / params.f_max)));
  const auto lag_max = static_cast<std::size_t>(std::ceil(rate / params.f_min));
  if (lag_max + 1 >= g.window) Fail(ErrorKind::kParameter, "pitch: window too short for f_min");

  BehaviorSeries out;
  out.signal = Signal::kPitch;
  out.dt = static_cast<double>(g.hop) / rate;
  out.t0 = static_cast<double>(g.window) / 2.0 / rate;
  out.values.reserve(g.count);

  const std::size_t w = g.window;
  std::vector<double> x(w), prefix(w + 1), r(lag_max + 2);
  auto samples = audio.samples();
  for (std::size_t k = 0; k < g.count; ++k) {
    auto frame = samples.subspan(k * g.hop, w);
    double mean = 0.0;
    for (float s : frame) mean += s;
    mean /= static_cast<double>(w);
    prefix[0] = 0.0;
    for (std::size_t n = 0; n < w; ++n) {
      x[n] = frame[n] - mean;
      prefix[n + 1] = prefix[n] + x[n] * x[n];
    }
    if (prefix[w] <= 1e-12 * static_cast<double>(w)) {
      out.values.emplace_back(std::nullopt);
      continue;
    }
    for (std::size_t lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
      const std::size_t m = w - lag;
      double acc = 0.0;
      for (std::size_t n = 0; n < m; ++n) acc += x[n] * x[n + lag];
      const double e0 = prefix[m];
      const double e1 = prefix[w] - prefix[lag];
      r[lag] = (e0 > 0.0 && e1 > 0.0) ? acc / std::sqrt(e0 * e1) : 0.0;
    }
    double best = -1.0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag)
      if (r[lag] >= r[lag - 1] && r[lag] > r[lag + 1]) best = std::max(best, r[lag]);
    if (best < params.voicing_threshold) {
      out.values.emplace_back(std::nullopt);
      continue;
    }
    std::size_t pick = lag_min;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      if (r[lag] >= r[lag - 1] && r[lag] > r[lag + 1] && r[lag] >= kOctavePeakRatio * best) {
        pick = lag;
        break;
      }
    }
    const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
    const double curvature = a - 2.0 * b + c;
    double offset = curvature < 0.0 ? 0.5 * (a - c) / curvature : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double f0 = rate / (static_cast<double>(pick) + offset);
    out.values.emplace_back(std::clamp(f0, params.f_min, params.f_max));
  }
  return out;
}

BehaviorSeries SmileSeries(const SmileProviderInput& input, std::size_t frame_count,
                           double frame_rate) {
  if (input.scores.size() != frame_count)
    Fail(ErrorKind::kFormat, "smile: " + std::to_string(input.scores.size()) +
                                 " scores for " + std::to_string(frame_count) + " frames");
  if (!(input.range_max > input.range_min)) Fail(ErrorKind::kFormat, "smile: empty provider range");
  if (!(frame_rate > 0.0)) Fail(ErrorKind::kParameter, "smile: frame_rate must be positive");
  BehaviorSeries out;
  out.signal = Signal::kSmile;
  out.dt = 1.0 / frame_rate;
  out.t0 = 0.0;
  out.values.reserve(frame_count);
  const double span = input.range_max - input.range_min;
  for (double s : input.scores) {
    double v = 100.0 * (s - input.range_min) / span;
    out.values.emplace_back(std::clamp(v, 0.0, 100.0));
  }
  return out;
}

BehaviorSeries StubSmileSeries(std::size_t frame_count, double frame_rate) {
  SmileProviderInput zeros{std::vector<double>(frame_count, 0.0), 0.0, 1.0};
  BehaviorSeries out = SmileSeries(zeros, frame_count, frame_rate);
  out.synthetic = true;
  return out;
}

SmileProviderInput ParseSmileSidecar(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  SmileProviderInput input;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty()) continue;
    std::istringstream ls(t);
    if (!header) {
      std::string keyword;
      ls >> keyword >> input.range_min >> input.range_max;
      if (keyword != "range" || ls.fail())
        Fail(ErrorKind::kFormat, "smile sidecar: first line must be `range <min> <max>`");
      if (!(input.range_max > input.range_min)) Fail(ErrorKind::kFormat, "smile sidecar: empty range");
      header = true;
      continue;
    }
    double v = 0.0;
    ls >> v;
    if (ls.fail() || !std::isfinite(v))
      Fail(ErrorKind::kFormat, "smile sidecar: bad score on line " + std::to_string(lineno));
    input.scores.push_back(v);
  }
  if (!header) Fail(ErrorKind::kFormat, "smile sidecar: missing range header");
  return input;
}

}  // namespace speakloop::media
