#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "media/audio.hpp"
#include "media/features.hpp"
#include "media/frames.hpp"
#include "moderation/features.hpp"
#include "text/analytics.hpp"
#include "text/transcript.hpp"

namespace speakloop::service {

struct MediaLimits {
  double max_audio_seconds = 180.0;
  double max_frame_rate = 15.0;
};

// Raw uploaded parts. `frames` holds the frame files (PGMs plus
// manifest.json), already extracted from the archive.
struct SubmissionFiles {
  std::string wav;
  std::map<std::string, std::string> frames;
  std::string transcript_json;
  std::optional<std::string> smile_sidecar;
};

struct SubmissionMedia {
  media::AudioTrack audio;
  media::FrameSequence frames;
  text::TimedTranscript transcript;
  std::optional<media::SmileProviderInput> smile;
};

// Decodes and validates every part. Errors are kFormat with a message
// prefixed by the failing part ("wav: ...", "frames: ...", "transcript: ...",
// "smile: ...").
SubmissionMedia DecodeSubmission(const SubmissionFiles& files, const MediaLimits& limits);

struct AnalysisOptions {
  text::FillerLexicon fillers = text::DefaultFillerLexicon();
  std::set<std::string> stopwords = text::DefaultStopwords();
  std::size_t top_words = 50;
};

// The automated part of a feedback bundle: four series, transcript and its
// analytics, word prosody and headline metrics. Deterministic; floats
// rounded to 6 decimals.
nlohmann::json AnalyzeSubmission(const SubmissionMedia& media, const AnalysisOptions& options = {});

// Rebuilds the series map stored in an analysis document (for comment
// feature extraction).
moderation::SeriesMap SeriesFromAnalysis(const nlohmann::json& analysis);

nlohmann::json SeriesToJson(const media::BehaviorSeries& series);
media::BehaviorSeries SeriesFromJson(media::Signal signal, const nlohmann::json& doc);

}  // namespace speakloop::service
