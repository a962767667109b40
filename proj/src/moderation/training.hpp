#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "moderation/features.hpp"
#include "moderation/regression.hpp"
#include "moderation/sentiment.hpp"

namespace speakloop::moderation {

// One row of `comment_id,video_id,text,category,timestamp,score,sentiment`.
struct TrainingRow {
  std::string comment_id;
  std::string video_id;
  std::string text;
  Category category = Category::kSpeech;
  std::optional<double> timestamp;
  std::optional<double> score;
  std::optional<Sentiment> sentiment;
};

std::vector<TrainingRow> ParseTrainingCsv(std::string_view csv);

// Series map whose four signals are all empty; every window is missing.
SeriesMap EmptySeriesMap();

// Returns the behavior series of a video, or nullptr when none is known.
using SeriesLookup = std::function<const SeriesMap*(const std::string& video_id)>;

struct ModerationArtifacts {
  std::map<Category, HelpfulnessModel> helpfulness;
  std::map<Category, std::string> helpfulness_failures;
  std::optional<SentimentTraining> sentiment;
  std::optional<std::string> sentiment_failure;
  std::uint64_t seed = 0;

  bool complete() const { return helpfulness_failures.empty() && !sentiment_failure; }
  nlohmann::json Metrics() const;
};

// One helpfulness model per category present in the data (rows with a
// score), plus the sentiment model from rows with a label. Per-model
// training errors are collected rather than thrown.
ModerationArtifacts TrainModeration(const std::vector<TrainingRow>& rows, const SeriesLookup& lookup,
                                    std::uint64_t seed);

// helpfulness_<category>.json, sentiment.json, metrics.json
void WriteModerationArtifacts(const ModerationArtifacts& artifacts, const std::filesystem::path& dir);

struct ModerationModels {
  std::map<Category, HelpfulnessModel> helpfulness;
  std::optional<SentimentModel> sentiment;
};

// Loads whichever model documents exist in `dir`.
ModerationModels LoadModerationModels(const std::filesystem::path& dir);

}  // namespace speakloop::moderation
