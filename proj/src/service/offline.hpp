#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "service/analysis.hpp"

namespace speakloop::service {

struct OfflineAnalysisInput {
  std::filesystem::path wav;
  std::filesystem::path frames;  // directory of PGMs + manifest.json, or a tar archive
  std::filesystem::path transcript;
  std::optional<std::filesystem::path> smile;
  // {video_id, condition, prompt_index, title, description, qualities,
  //  comments: [{id, text, category, video_timestamp, created_at}],
  //  ratings: [{ratings: {quality: stars}, overall_rating}]}
  std::optional<std::filesystem::path> feedback;
  std::optional<std::filesystem::path> models_dir;
  MediaLimits limits;
};

// The `analyze` pipeline without a server: decode, extract, rank, bundle.
nlohmann::json AnalyzeOffline(const OfflineAnalysisInput& input);

std::map<std::string, std::string> ReadFrameFiles(const std::filesystem::path& path);

// Trains helpfulness and sentiment models from a training CSV. Behavior
// series for a row's video come from `<series_dir>/<video_id>.json` (an
// analysis document or treatment bundle) when present. Writes the model
// documents to out_dir and returns the metrics document.
nlohmann::json TrainModerationOffline(const std::filesystem::path& training_csv,
                                      const std::optional<std::filesystem::path>& series_dir, std::uint64_t seed,
                                      const std::filesystem::path& out_dir);

}  // namespace speakloop::service
