#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speakloop::media {

// Mono PCM audio with samples normalized to [-1, 1].
class AudioTrack {
 public:
  AudioTrack() = default;
  // Throws kFormat if any sample lies outside [-1, 1] or the rate is not
  // positive.
  AudioTrack(std::vector<float> samples, int sample_rate);

  std::span<const float> samples() const { return samples_; }
  int sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration() const {
    return sample_rate_ > 0 ? static_cast<double>(samples_.size()) / sample_rate_ : 0.0;
  }

 private:
  std::vector<float> samples_;
  int sample_rate_ = 0;
};

// RIFF/WAVE, PCM 16-bit signed little-endian. Multi-channel input is
// downmixed by averaging channels.
AudioTrack ParseWav(std::string_view bytes);
AudioTrack ReadWav(const std::filesystem::path& path);
std::string EncodeWav16(const AudioTrack& audio);

}  // namespace speakloop::media
