#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace speakloop::media {

struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height
};

class FrameSequence {
 public:
  FrameSequence() = default;
  // Throws kFormat on mismatched dimensions, kParameter on a non-positive
  // frame rate.
  FrameSequence(std::vector<GrayFrame> frames, double frame_rate);

  const std::vector<GrayFrame>& frames() const { return frames_; }
  double frame_rate() const { return frame_rate_; }
  std::size_t size() const { return frames_.size(); }
  int width() const { return frames_.empty() ? 0 : frames_.front().width; }
  int height() const { return frames_.empty() ? 0 : frames_.front().height; }

 private:
  std::vector<GrayFrame> frames_;
  double frame_rate_ = 0.0;
};

// Binary PGM (P5), maxval <= 255.
GrayFrame ParsePgm(std::string_view bytes);
std::string EncodePgm(const GrayFrame& frame);

// Assembles a sequence from named files: every `*.pgm` entry in
// lexicographic name order plus `manifest.json` declaring `frame_rate`.
FrameSequence FramesFromFiles(const std::map<std::string, std::string>& files);
FrameSequence ReadFrameDirectory(const std::filesystem::path& dir);

}  // namespace speakloop::media
