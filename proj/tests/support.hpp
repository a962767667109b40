#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "media/audio.hpp"
#include "media/frames.hpp"

namespace speakloop::testing {

inline media::AudioTrack Sine(double freq, double amplitude, double seconds, int rate = 16000) {
  std::vector<float> s(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = static_cast<float>(amplitude * std::sin(2.0 * std::numbers::pi * freq * i / rate));
  return media::AudioTrack(std::move(s), rate);
}

inline media::AudioTrack WhiteNoise(double amplitude, double seconds, std::uint64_t seed,
                                    int rate = 16000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<float> s(static_cast<std::size_t>(seconds * rate));
  for (auto& v : s) v = static_cast<float>(u(rng));
  return media::AudioTrack(std::move(s), rate);
}

inline media::GrayFrame Flat(int w, int h, std::uint8_t value) {
  return media::GrayFrame{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h), value)};
}

}  // namespace speakloop::testing
