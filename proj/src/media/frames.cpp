#include "media/frames.hpp"

#include <cctype>
#include <json.hpp>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::media {

FrameSequence::FrameSequence(std::vector<GrayFrame> frames, double frame_rate)
    : frames_(std::move(frames)), frame_rate_(frame_rate) {
  if (!(frame_rate_ > 0.0)) Fail(ErrorKind::kParameter, "frames: frame_rate must be positive");
  for (const auto& f : frames_) {
    if (f.width != frames_.front().width || f.height != frames_.front().height)
      Fail(ErrorKind::kFormat, "frames: mismatched frame dimensions");
    if (f.pixels.size() != static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height))
      Fail(ErrorKind::kFormat, "frames: pixel buffer does not match dimensions");
  }
}

namespace {

// Reads the next whitespace-delimited header token, skipping # comments.
std::string NextToken(std::string_view b, std::size_t& pos) {
  for (;;) {
    while (pos < b.size() && std::isspace(static_cast<unsigned char>(b[pos]))) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::size_t start = pos;
  while (pos < b.size() && !std::isspace(static_cast<unsigned char>(b[pos]))) ++pos;
  return std::string(b.substr(start, pos - start));
}

int ParseHeaderInt(std::string_view b, std::size_t& pos, const char* what) {
  std::string tok = NextToken(b, pos);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    Fail(ErrorKind::kFormat, std::string("pgm: bad ") + what);
  return std::stoi(tok);
}

}  // namespace

GrayFrame ParsePgm(std::string_view b) {
  std::size_t pos = 0;
  if (NextToken(b, pos) != "P5") Fail(ErrorKind::kFormat, "pgm: expected binary P5 magic");
  GrayFrame f;
  f.width = ParseHeaderInt(b, pos, "width");
  f.height = ParseHeaderInt(b, pos, "height");
  int maxval = ParseHeaderInt(b, pos, "maxval");
  if (f.width <= 0 || f.height <= 0) Fail(ErrorKind::kFormat, "pgm: empty raster");
  if (maxval <= 0 || maxval > 255) Fail(ErrorKind::kFormat, "pgm: only 8-bit rasters are supported");
  ++pos;  // single whitespace byte after maxval
  const std::size_t n = static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height);
  if (b.size() < pos + n) Fail(ErrorKind::kFormat, "pgm: truncated raster");
  f.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = static_cast<unsigned char>(b[pos + i]);
    f.pixels[i] = static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255u + maxval / 2) / maxval);
  }
  return f;
}

std::string EncodePgm(const GrayFrame& frame) {
  std::string out = "P5\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
  return out;
}

FrameSequence FramesFromFiles(const std::map<std::string, std::string>& files) {
  double frame_rate = 0.0;
  bool have_manifest = false;
  std::vector<GrayFrame> frames;
  for (const auto& [name, bytes] : files) {  // std::map iterates in name order
    std::string base = std::filesystem::path(name).filename().string();
    if (base == "manifest.json") {
      auto doc = nlohmann::json::parse(bytes, nullptr, false);
      if (doc.is_discarded() || !doc.is_object() || !doc.contains("frame_rate") ||
          !doc["frame_rate"].is_number())
        Fail(ErrorKind::kFormat, "frames: manifest.json must declare a numeric frame_rate");
      frame_rate = doc["frame_rate"].get<double>();
      have_manifest = true;
    } else if (base.size() > 4 && ToLower(base.substr(base.size() - 4)) == ".pgm") {
      frames.push_back(ParsePgm(bytes));
    }
  }
  if (!have_manifest) Fail(ErrorKind::kFormat, "frames: missing manifest.json");
  return FrameSequence(std::move(frames), frame_rate);
}

FrameSequence ReadFrameDirectory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) Fail(ErrorKind::kIo, "frames: not a directory: " + dir.string());
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    files.emplace(entry.path().filename().string(), ReadFile(entry.path()));
  }
  return FramesFromFiles(files);
}

}  // namespace speakloop::media
