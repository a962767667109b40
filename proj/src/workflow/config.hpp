#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "moderation/comment.hpp"

namespace speakloop::workflow {

enum class Condition { kTreatment, kControl };
const char* ConditionName(Condition condition);
std::optional<Condition> ParseCondition(std::string_view name);

// kPerCycle: unlocking prompt p needs fresh reviews after the unlock of p-1.
// kCumulative: unlocking prompt p needs reviews_required * (p - 1) in total.
enum class GateMode { kPerCycle, kCumulative };

struct Prompt {
  int index = 1;
  std::string text;
  std::optional<std::string> guideline_video_ref;
  std::int64_t release_time = 0;
  std::int64_t deadline = 0;
};

struct Quality {
  std::string name;
  moderation::Category category = moderation::Category::kSpeech;
};

struct PlatformConfig {
  std::vector<Prompt> prompts;
  std::vector<Quality> qualities;
  int reviews_required = 3;
  int comments_required = 3;
  int qualities_per_video = 5;
  GateMode gate_mode = GateMode::kPerCycle;
  std::int64_t leaderboard_period_seconds = 2 * 86400;
  double max_audio_seconds = 180.0;
  double max_frame_rate = 15.0;

  const Prompt* FindPrompt(int index) const;
  const Quality* FindQuality(std::string_view name) const;
};

// Five interview prompts two days apart starting at `first_release`
// (prompts 1 and 5 identical) and the 23-quality list.
PlatformConfig DefaultConfig(std::int64_t first_release = 0);
std::vector<Quality> DefaultQualities();

// Throws kParameter on non-contiguous indices, non-increasing release
// times, duplicate qualities or non-positive thresholds.
void ValidateConfig(const PlatformConfig& config);

nlohmann::json ConfigToJson(const PlatformConfig& config);
// Absent keys keep their DefaultConfig value.
PlatformConfig ConfigFromJson(const nlohmann::json& doc);

}  // namespace speakloop::workflow
