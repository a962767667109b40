#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace speakloop::media {

enum class Signal { kSmile, kMovement, kLoudness, kPitch };

inline constexpr Signal kAllSignals[] = {Signal::kSmile, Signal::kMovement,
                                         Signal::kLoudness, Signal::kPitch};

const char* SignalName(Signal signal);
std::optional<Signal> ParseSignal(std::string_view name);

inline constexpr double kSilenceFloorDb = -96.0;

// Uniformly sampled behavior signal. A std::nullopt value is an explicit
// "absent" sample (unvoiced pitch frame).
struct BehaviorSeries {
  Signal signal = Signal::kSmile;
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<std::optional<double>> values;
  // Set when the values come from a stub provider rather than a detector.
  bool synthetic = false;

  std::size_t size() const { return values.size(); }
  double TimeAt(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
};

struct WindowStats {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
  bool missing = true;
};

// Mean and population standard deviation over the present samples whose
// timestamps fall in [center - width/2, center + width/2].
WindowStats SampleWindow(const BehaviorSeries& series, double center, double width);

}  // namespace speakloop::media
