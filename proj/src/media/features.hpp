#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "media/audio.hpp"
#include "media/frames.hpp"
#include "media/series.hpp"

namespace speakloop::media {

struct LoudnessParams {
  double window = 0.040;
  double hop = 0.010;
};

struct PitchParams {
  double window = 0.040;
  double hop = 0.010;
  double f_min = 75.0;
  double f_max = 500.0;
  double voicing_threshold = 0.45;
};

// Frame differencing: value[i] = 100 * mean_px(max(|f[i+1]-f[i]| - tau, 0)) / 255.
BehaviorSeries MovementSeries(const FrameSequence& frames, int noise_threshold = 0);

// dBFS of the windowed RMS, floored at kSilenceFloorDb. Sample k is
// centered at (k * hop + window / 2) seconds.
BehaviorSeries LoudnessSeries(const AudioTrack& audio, const LoudnessParams& params = {});

// Level of a sample range as 20*log10(rms), floored. Empty range -> floor.
double RangeLoudnessDb(std::span<const float> samples);

// Normalized autocorrelation pitch tracker on the same hop grid as
// LoudnessSeries. Frames whose strongest peak is below the voicing
// threshold are absent.
BehaviorSeries PitchSeries(const AudioTrack& audio, const PitchParams& params = {});

struct SmileProviderInput {
  std::vector<double> scores;  // one per frame
  double range_min = 0.0;
  double range_max = 1.0;
};

// Affine rescale of the provider's declared range onto [0, 100], clamped.
BehaviorSeries SmileSeries(const SmileProviderInput& input, std::size_t frame_count,
                           double frame_rate);

// Stand-in when no detector is configured: all zeros, flagged synthetic.
BehaviorSeries StubSmileSeries(std::size_t frame_count, double frame_rate);

// Sidecar text: first line `range <min> <max>`, then one score per line.
SmileProviderInput ParseSmileSidecar(std::string_view text);

}  // namespace speakloop::media
