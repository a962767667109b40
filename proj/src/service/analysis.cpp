#include "service/analysis.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::service {

using nlohmann::json;

namespace {

json Num(double v) { return std::isfinite(v) ? json(Round6(v)) : json(nullptr); }

json Opt(const std::optional<double>& v) { return v ? Num(*v) : json(nullptr); }

template <typename F>
auto Decoding(const char* part, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string(part) + ": " + e.what());
  }
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t count = 0;
};

Moments PresentMoments(const media::BehaviorSeries& s) {
  Moments m;
  double sum = 0.0;
  for (const auto& v : s.values)
    if (v) {
      sum += *v;
      ++m.count;
    }
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  double ss = 0.0;
  for (const auto& v : s.values)
    if (v) ss += (*v - m.mean) * (*v - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(m.count));
  return m;
}

json MomentsJson(const Moments& m) {
  if (m.count == 0) return nullptr;
  return {{"mean", Num(m.mean)}, {"sd", Num(m.sd)}, {"count", m.count}};
}

}  // namespace

SubmissionMedia DecodeSubmission(const SubmissionFiles& files, const MediaLimits& limits) {
  SubmissionMedia m;
  m.audio = Decoding("wav", [&] { return media::ParseWav(files.wav); });
  if (m.audio.duration() > limits.max_audio_seconds)
    Fail(ErrorKind::kFormat, "wav: duration exceeds " + std::to_string(static_cast<int>(limits.max_audio_seconds)) + " s");
  m.frames = Decoding("frames", [&] { return media::FramesFromFiles(files.frames); });
  if (m.frames.frame_rate() > limits.max_frame_rate)
    Fail(ErrorKind::kFormat, "frames: frame rate above " + std::to_string(static_cast<int>(limits.max_frame_rate)) + " fps");
  if (m.frames.size() < 2) Fail(ErrorKind::kFormat, "frames: at least 2 frames required");
  m.transcript = Decoding("transcript", [&] { return text::ParseTranscriptJson(files.transcript_json); });
  if (files.smile_sidecar) {
    m.smile = Decoding("smile", [&] { return media::ParseSmileSidecar(*files.smile_sidecar); });
    if (m.smile->scores.size() != m.frames.size())
      Fail(ErrorKind::kFormat, "smile: " + std::to_string(m.smile->scores.size()) + " scores for " +
                                   std::to_string(m.frames.size()) + " frames");
  }
  return m;
}

json SeriesToJson(const media::BehaviorSeries& s) {
  json values = json::array();
  for (const auto& v : s.values) values.push_back(Opt(v));
  return {{"t0", Num(s.t0)}, {"dt", Num(s.dt)}, {"synthetic", s.synthetic}, {"values", values}};
}

media::BehaviorSeries SeriesFromJson(media::Signal signal, const json& doc) {
  media::BehaviorSeries s;
  s.signal = signal;
  s.t0 = doc.at("t0").get<double>();
  s.dt = doc.at("dt").get<double>();
  s.synthetic = doc.value("synthetic", false);
  for (const auto& v : doc.at("values"))
    s.values.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  return s;
}

json AnalyzeSubmission(const SubmissionMedia& m, const AnalysisOptions& options) {
  const double fps = m.frames.frame_rate();
  media::BehaviorSeries smile = m.smile ? media::SmileSeries(*m.smile, m.frames.size(), fps)
                                        : media::StubSmileSeries(m.frames.size(), fps);
  media::BehaviorSeries movement = media::MovementSeries(m.frames);
  media::BehaviorSeries loudness = media::LoudnessSeries(m.audio);
  media::BehaviorSeries pitch = media::PitchSeries(m.audio);

  const auto unique = text::ComputeUniqueWordRatio(m.transcript);
  const auto freqs = text::WordFrequencies(m.transcript, options.stopwords, options.top_words);
  const auto fillers = text::DetectFillers(m.transcript, options.fillers);
  const auto prosody = text::ComputeWordProsody(m.transcript, m.audio);

  json series = {{"smile", SeriesToJson(smile)},
                 {"movement", SeriesToJson(movement)},
                 {"loudness", SeriesToJson(loudness)},
                 {"pitch", SeriesToJson(pitch)}};
  json words = json::array();
  for (const auto& [word, count] : freqs) words.push_back({{"word", word}, {"count", count}});
  json filler_list = json::array();
  for (const auto& f : fillers) filler_list.push_back({{"word", f.word}, {"start", Num(f.start)}});
  json prosody_list = json::array();
  for (const auto& p : prosody)
    prosody_list.push_back({{"text", p.token.text},
                            {"start", Num(p.token.start)},
                            {"end", Num(p.token.end)},
                            {"duration", Num(p.duration)},
                            {"mean_loudness_db", Opt(p.mean_loudness)},
                            {"beyond_audio", p.beyond_audio}});

  const double duration = m.audio.duration();
  const double minutes = duration / 60.0;
  const auto pitch_m = PresentMoments(pitch);
  json headline = {
      {"duration_seconds", Num(duration)},
      {"loudness_db", MomentsJson(PresentMoments(loudness))},
      {"pitch_hz", MomentsJson(pitch_m)},
      {"voiced_fraction", pitch.size() ? Num(static_cast<double>(pitch_m.count) / static_cast<double>(pitch.size()))
                                       : json(nullptr)},
      {"movement", MomentsJson(PresentMoments(movement))},
      {"smile", smile.synthetic ? json(nullptr) : MomentsJson(PresentMoments(smile))},
      {"word_count", unique.total},
      {"words_per_minute", minutes > 0 ? Num(static_cast<double>(unique.total) / minutes) : json(nullptr)},
      {"unique_word_ratio", unique.empty ? json(nullptr) : Num(unique.ratio)},
      {"filler_count", fillers.size()},
      {"fillers_per_minute", minutes > 0 ? Num(static_cast<double>(fillers.size()) / minutes) : json(nullptr)},
  };
  return {{"series", series},
          {"transcript", text::TranscriptToJson(m.transcript)},
          {"unique_words",
           {{"ratio", unique.empty ? json(nullptr) : Num(unique.ratio)},
            {"distinct", unique.distinct},
            {"total", unique.total}}},
          {"word_frequencies", words},
          {"fillers", filler_list},
          {"word_prosody", prosody_list},
          {"headline", headline}};
}

moderation::SeriesMap SeriesFromAnalysis(const json& analysis) {
  moderation::SeriesMap out;
  const auto& series = analysis.at("series");
  for (media::Signal s : media::kAllSignals) out[s] = SeriesFromJson(s, series.at(media::SignalName(s)));
  return out;
}

}  // namespace speakloop::service
