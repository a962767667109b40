#include "media/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::media {

namespace {

std::uint32_t ReadU32(std::string_view b, std::size_t at) {
  auto u = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + i])); };
  return u(0) | (u(1) << 8) | (u(2) << 16) | (u(3) << 24);
}

std::uint16_t ReadU16(std::string_view b, std::size_t at) {
  auto u = [&](std::size_t i) { return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at + i])); };
  return static_cast<std::uint16_t>(u(0) | (u(1) << 8));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}  // namespace

AudioTrack::AudioTrack(std::vector<float> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) Fail(ErrorKind::kFormat, "audio: sample rate must be positive");
  for (float s : samples_)
    if (!(s >= -1.0f && s <= 1.0f)) Fail(ErrorKind::kFormat, "audio: sample outside [-1, 1]");
}

AudioTrack ParseWav(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE")
    Fail(ErrorKind::kFormat, "wav: missing RIFF/WAVE header");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::string_view data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    std::string_view id = b.substr(pos, 4);
    std::uint32_t len = ReadU32(b, pos + 4);
    std::size_t body = pos + 8;
    std::size_t avail = std::min<std::size_t>(len, b.size() - body);
    if (id == "fmt ") {
      if (avail < 16) Fail(ErrorKind::kFormat, "wav: fmt chunk too short");
      std::uint16_t format = ReadU16(b, body);
      channels = ReadU16(b, body + 2);
      rate = ReadU32(b, body + 4);
      bits = ReadU16(b, body + 14);
      if (format == 0xFFFE && avail >= 26) format = ReadU16(b, body + 24);
      if (format != 1) Fail(ErrorKind::kFormat, "wav: only PCM is supported");
      have_fmt = true;
    } else if (id == "data") {
      data = b.substr(body, avail);
      have_data = true;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) Fail(ErrorKind::kFormat, "wav: missing fmt chunk");
  if (!have_data) Fail(ErrorKind::kFormat, "wav: missing data chunk");
  if (bits != 16) Fail(ErrorKind::kFormat, "wav: expected 16-bit samples");
  if (channels == 0) Fail(ErrorKind::kFormat, "wav: zero channels");
  if (rate == 0) Fail(ErrorKind::kFormat, "wav: zero sample rate");

  const std::size_t frame_bytes = 2u * channels;
  const std::size_t frames = data.size() / frame_bytes;
  std::vector<float> samples(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    std::int32_t acc = 0;
    for (std::uint16_t c = 0; c < channels; ++c)
      acc += static_cast<std::int16_t>(ReadU16(data, i * frame_bytes + 2u * c));
    samples[i] = static_cast<float>(static_cast<double>(acc) / channels / 32768.0);
  }
  return AudioTrack(std::move(samples), static_cast<int>(rate));
}

AudioTrack ReadWav(const std::filesystem::path& path) { return ParseWav(ReadFile(path)); }

std::string EncodeWav16(const AudioTrack& audio) {
  const auto n = static_cast<std::uint32_t>(audio.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  PutU32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate()));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate()) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, 2 * n);
  for (float s : audio.samples()) {
    long v = std::lround(static_cast<double>(s) * 32767.0);
    v = std::clamp(v, -32768L, 32767L);
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

}  // namespace speakloop::media
