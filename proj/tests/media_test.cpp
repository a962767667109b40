#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "media/features.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace speakloop;
using namespace speakloop::media;
using speakloop::testing::Flat;
using speakloop::testing::Sine;

using speakloop::oracle::MovementOracle;

namespace {

double ZeroCrossingFrequency(const AudioTrack& audio) {
  return oracle::ZeroCrossingFrequency(audio.samples(), audio.sample_rate());
}

}  // namespace

TEST_CASE("movement: identical frames give zero") {
  FrameSequence seq({Flat(10, 10, 40), Flat(10, 10, 40)}, 15.0);
  auto s = MovementSeries(seq);
  REQUIRE(s.size() == 1);
  CHECK(*s.values[0] == 0.0);
  CHECK(s.dt == doctest::Approx(1.0 / 15.0));
  CHECK(s.t0 == doctest::Approx(0.5 / 15.0));
}

TEST_CASE("movement: one full-scale pixel in a 10x10 frame is 1.0") {
  auto b = Flat(10, 10, 0);
  b.pixels[37] = 255;
  FrameSequence seq({Flat(10, 10, 0), b}, 10.0);
  CHECK(*MovementSeries(seq).values[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("movement: translating block matches the per-pixel oracle") {
  std::vector<GrayFrame> frames;
  for (int f = 0; f < 12; ++f) {
    auto fr = Flat(32, 16, 20);
    for (int y = 4; y < 12; ++y)
      for (int x = f; x < f + 8; ++x) fr.pixels[static_cast<std::size_t>(y * 32 + x)] = 220;
    frames.push_back(fr);
  }
  for (int tau : {0, 10, 199, 200, 255}) {
    auto got = MovementSeries(FrameSequence(frames, 5.0), tau);
    auto want = MovementOracle(frames, tau);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(*got.values[i] == want[i]);
  }
}

TEST_CASE("movement: reversing the frames reverses the series") {
  std::mt19937 rng(7);
  std::vector<GrayFrame> frames;
  for (int f = 0; f < 9; ++f) {
    auto fr = Flat(8, 6, 0);
    for (auto& p : fr.pixels) p = static_cast<std::uint8_t>(rng() % 256);
    frames.push_back(fr);
  }
  auto fwd = MovementSeries(FrameSequence(frames, 3.0), 3);
  std::reverse(frames.begin(), frames.end());
  auto rev = MovementSeries(FrameSequence(frames, 3.0), 3);
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    CHECK(*fwd.values[i] == *rev.values[fwd.size() - 1 - i]);
    CHECK(*fwd.values[i] >= 0.0);
    CHECK(*fwd.values[i] <= 100.0);
  }
}

TEST_CASE("movement: error paths") {
  CHECK_THROWS_AS(MovementSeries(FrameSequence({Flat(4, 4, 0)}, 5.0)), Error);
  try {
    MovementSeries(FrameSequence({Flat(4, 4, 0)}, 5.0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptySeries);
  }
  try {
    FrameSequence({Flat(4, 4, 0), Flat(4, 5, 0)}, 5.0);
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFormat);
  }
  CHECK_THROWS_AS(MovementSeries(FrameSequence({Flat(4, 4, 0), Flat(4, 4, 0)}, 5.0), 256), Error);
}

TEST_CASE("loudness: silence sits on the floor") {
  AudioTrack silence(std::vector<float>(16000, 0.0f), 16000);
  auto s = LoudnessSeries(silence);
  REQUIRE(s.size() == (16000 - 640) / 160 + 1);
  for (const auto& v : s.values) CHECK(*v == kSilenceFloorDb);
}

TEST_CASE("loudness: full-scale sine is -3.0103 dBFS") {
  auto sine = Sine(1000.0, 1.0, 2.0);
  auto s = LoudnessSeries(sine, {0.5, 0.1});
  for (const auto& v : s.values) CHECK(std::abs(*v + 3.0103) <= 0.05);
  auto half = LoudnessSeries(Sine(1000.0, 0.5, 2.0), {0.5, 0.1});
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(*s.values[i] - *half.values[i] == doctest::Approx(6.0206).epsilon(1e-4));
}

TEST_CASE("loudness: scaling audio by k shifts every sample by 20 log10 k") {
  auto base = testing::WhiteNoise(0.25, 1.0, 11);
  std::vector<float> scaled(base.samples().begin(), base.samples().end());
  for (auto& v : scaled) v *= 3.0f;
  auto a = LoudnessSeries(base);
  auto b = LoudnessSeries(AudioTrack(scaled, base.sample_rate()));
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(*b.values[i] - *a.values[i] == doctest::Approx(20.0 * std::log10(3.0)).epsilon(1e-5));
}

TEST_CASE("loudness: empty audio and bad windows") {
  CHECK_THROWS_AS(LoudnessSeries(AudioTrack({}, 16000)), Error);
  auto sine = Sine(100.0, 0.5, 0.5);
  CHECK_THROWS_AS(LoudnessSeries(sine, {0.01, 0.02}), Error);
  CHECK_THROWS_AS(LoudnessSeries(sine, {0.6, 0.01}), Error);
}

TEST_CASE("pitch: 220 Hz sine agrees with the zero-crossing oracle") {
  auto sine = Sine(220.0, 0.8, 2.0);
  const double oracle = ZeroCrossingFrequency(sine);
  CHECK(oracle == doctest::Approx(220.0).epsilon(0.002));
  auto p = PitchSeries(sine);
  std::size_t voiced = 0;
  for (const auto& v : p.values) {
    if (!v) continue;
    ++voiced;
    CHECK(std::abs(*v - oracle) <= 2.0);
  }
  CHECK(voiced == p.size());
}

TEST_CASE("pitch: amplitude scaling leaves a pure tone unchanged") {
  auto loud = PitchSeries(Sine(330.0, 0.9, 1.0));
  auto quiet = PitchSeries(Sine(330.0, 0.09, 1.0));
  REQUIRE(loud.size() == quiet.size());
  for (std::size_t i = 0; i < loud.size(); ++i) {
    REQUIRE(loud.values[i].has_value() == quiet.values[i].has_value());
    if (loud.values[i]) CHECK(*loud.values[i] == doctest::Approx(*quiet.values[i]).epsilon(1e-6));
  }
}

TEST_CASE("pitch: white noise is mostly unvoiced") {
  auto p = PitchSeries(testing::WhiteNoise(0.5, 3.0, 42));
  auto absent = std::count_if(p.values.begin(), p.values.end(), [](const auto& v) { return !v; });
  CHECK(static_cast<double>(absent) / static_cast<double>(p.size()) >= 0.90);
}

TEST_CASE("pitch: silence is entirely absent") {
  auto p = PitchSeries(AudioTrack(std::vector<float>(8000, 0.0f), 16000));
  for (const auto& v : p.values) CHECK(!v.has_value());
}

TEST_CASE("pitch: voiced values stay inside the band") {
  PitchParams params;
  params.f_min = 100.0;
  params.f_max = 300.0;
  for (double f : {90.0, 101.0, 250.0, 299.0, 320.0}) {
    auto p = PitchSeries(Sine(f, 0.5, 0.5), params);
    for (const auto& v : p.values)
      if (v) {
        CHECK(*v >= params.f_min);
        CHECK(*v <= params.f_max);
      }
  }
}

TEST_CASE("pitch: parameter errors") {
  auto sine = Sine(200.0, 0.5, 0.5, 8000);
  PitchParams nyquist;
  nyquist.f_max = 5000.0;
  try {
    PitchSeries(sine, nyquist);
    FAIL("expected parameter error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParameter);
  }
  PitchParams inverted;
  inverted.f_min = 400.0;
  inverted.f_max = 300.0;
  CHECK_THROWS_AS(PitchSeries(sine, inverted), Error);
  PitchParams short_window;
  short_window.window = 0.02;
  CHECK_THROWS_AS(PitchSeries(sine, short_window), Error);
}

TEST_CASE("smile: affine rescale, clamp, stub") {
  SmileProviderInput in{{0.5, 0.5, 0.5}, 0.0, 1.0};
  auto s = SmileSeries(in, 3, 10.0);
  for (const auto& v : s.values) CHECK(*v == 50.0);
  CHECK(s.dt == doctest::Approx(0.1));
  CHECK_FALSE(s.synthetic);

  SmileProviderInput over{{2.0, -1.0}, 0.0, 1.0};
  auto c = SmileSeries(over, 2, 10.0);
  CHECK(*c.values[0] == 100.0);
  CHECK(*c.values[1] == 0.0);

  auto stub = StubSmileSeries(4, 5.0);
  CHECK(stub.synthetic);
  CHECK(stub.size() == 4);
  for (const auto& v : stub.values) CHECK(*v == 0.0);

  try {
    SmileSeries(in, 4, 10.0);
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFormat);
  }
}

TEST_CASE("smile: sidecar parsing") {
  auto in = ParseSmileSidecar("range -5 5\n0\n5\n\n-5\n");
  CHECK(in.range_min == -5.0);
  CHECK(in.range_max == 5.0);
  REQUIRE(in.scores.size() == 3);
  auto s = SmileSeries(in, 3, 1.0);
  CHECK(*s.values[0] == 50.0);
  CHECK(*s.values[1] == 100.0);
  CHECK_THROWS_AS(ParseSmileSidecar("0.1\n0.2\n"), Error);
  CHECK_THROWS_AS(ParseSmileSidecar("range 0 1\nabc\n"), Error);
}

TEST_CASE("sample_window: constant, empty and brute force") {
  BehaviorSeries constant{Signal::kLoudness, 0.5, 0.25, std::vector<std::optional<double>>(40, 7.0)};
  for (double c : {0.0, 1.3, 5.0, 9.9}) {
    auto w = SampleWindow(constant, c, 2.0);
    if (w.count == 0) continue;
    CHECK(w.mean == 7.0);
    CHECK(w.sd == 0.0);
  }
  auto before = SampleWindow(constant, -3.0, 1.0);
  CHECK(before.count == 0);
  CHECK(before.missing);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  BehaviorSeries series{Signal::kPitch, 0.02, 0.01, {}};
  for (int i = 0; i < 500; ++i) {
    if (rng() % 5 == 0)
      series.values.emplace_back(std::nullopt);
    else
      series.values.emplace_back(u(rng));
  }
  std::uniform_real_distribution<double> cu(-1.0, 6.5);
  for (int trial = 0; trial < 300; ++trial) {
    const double center = cu(rng);
    const double width = (trial % 3 == 0) ? 1.0 : (trial % 3 == 1 ? 2.0 : 4.0);
    std::vector<double> picked;
    for (std::size_t i = 0; i < series.size(); ++i) {
      double t = series.t0 + static_cast<double>(i) * series.dt;
      if (t >= center - width / 2 && t <= center + width / 2 && series.values[i])
        picked.push_back(*series.values[i]);
    }
    auto w = SampleWindow(series, center, width);
    REQUIRE(w.count == picked.size());
    if (picked.empty()) {
      CHECK(w.missing);
      continue;
    }
    double mean = 0.0;
    for (double v : picked) mean += v;
    mean /= static_cast<double>(picked.size());
    double var = 0.0;
    for (double v : picked) var += (v - mean) * (v - mean);
    CHECK(w.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(w.sd == doctest::Approx(std::sqrt(var / static_cast<double>(picked.size()))).epsilon(1e-12));
  }

  // Full-series window equals whole-series statistics.
  auto all = SampleWindow(series, 2.5, 100.0);
  std::size_t present = 0;
  for (const auto& v : series.values) present += v.has_value();
  CHECK(all.count == present);
}

TEST_CASE("wav: encode/parse and stereo downmix") {
  auto sine = Sine(440.0, 0.5, 0.1, 8000);
  auto back = ParseWav(EncodeWav16(sine));
  REQUIRE(back.size() == sine.size());
  CHECK(back.sample_rate() == 8000);
  for (std::size_t i = 0; i < back.size(); ++i)
    CHECK(std::abs(back.samples()[i] - sine.samples()[i]) < 1.0 / 16000.0);

  // Hand-built stereo file: L = 16384, R = -16384 -> mono 0; L = R = 8192 -> 0.25.
  std::string wav = EncodeWav16(AudioTrack(std::vector<float>(4, 0.0f), 8000));
  wav[22] = 2;  // channels
  std::string data;
  auto put = [&](std::int16_t v) {
    data.push_back(static_cast<char>(v & 0xFF));
    data.push_back(static_cast<char>((v >> 8) & 0xFF));
  };
  put(16384); put(-16384); put(8192); put(8192);
  wav.replace(44, 8, data);
  auto mono = ParseWav(wav);
  REQUIRE(mono.size() == 2);
  CHECK(mono.samples()[0] == 0.0f);
  CHECK(mono.samples()[1] == doctest::Approx(0.25));

  CHECK_THROWS_AS(ParseWav("not a wav"), Error);
}

TEST_CASE("pgm: header comments and maxval rescale") {
  std::string pgm = "P5\n# comment\n2 1\n15\n";
  pgm.push_back(static_cast<char>(15));
  pgm.push_back(static_cast<char>(0));
  auto f = ParsePgm(pgm);
  CHECK(f.width == 2);
  CHECK(f.pixels[0] == 255);
  CHECK(f.pixels[1] == 0);
  CHECK_THROWS_AS(ParsePgm("P2\n1 1\n255\n0"), Error);
  CHECK_THROWS_AS(ParsePgm("P5\n4 4\n255\n"), Error);
}
