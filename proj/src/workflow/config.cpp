#include "workflow/config.hpp"

#include <set>

#include "common/error.hpp"

namespace speakloop::workflow {

using moderation::Category;

const char* ConditionName(Condition condition) {
  return condition == Condition::kTreatment ? "treatment" : "control";
}

std::optional<Condition> ParseCondition(std::string_view name) {
  if (name == "treatment") return Condition::kTreatment;
  if (name == "control") return Condition::kControl;
  return std::nullopt;
}

const Prompt* PlatformConfig::FindPrompt(int index) const {
  for (const auto& p : prompts)
    if (p.index == index) return &p;
  return nullptr;
}

const Quality* PlatformConfig::FindQuality(std::string_view name) const {
  for (const auto& q : qualities)
    if (q.name == name) return &q;
  return nullptr;
}

std::vector<Quality> DefaultQualities() {
  return {
      {"eye contact", Category::kMovement},
      {"pacing", Category::kSpeech},
      {"friendliness", Category::kFriendliness},
      {"vocal variety", Category::kSpeech},
      {"articulation", Category::kSpeech},
      {"avoiding filler words", Category::kSpeech},
      {"explanation of concept", Category::kSpeech},
      {"body gestures", Category::kMovement},
      {"posture", Category::kMovement},
      {"hand movement", Category::kMovement},
      {"facial expressions", Category::kFriendliness},
      {"smiling", Category::kFriendliness},
      {"enthusiasm", Category::kFriendliness},
      {"confidence", Category::kFriendliness},
      {"volume", Category::kSpeech},
      {"clarity", Category::kSpeech},
      {"word choice", Category::kSpeech},
      {"organization", Category::kSpeech},
      {"conciseness", Category::kSpeech},
      {"storytelling", Category::kSpeech},
      {"relevance to the prompt", Category::kSpeech},
      {"strong opening", Category::kSpeech},
      {"strong closing", Category::kSpeech},
  };
}

PlatformConfig DefaultConfig(std::int64_t first_release) {
  static const char* kTexts[] = {"Tell me about yourself", "Describe your biggest weakness",
                                 "Tell me about your greatest achievement",
                                 "Describe a conflict or challenge you face", "Tell me about yourself"};
  PlatformConfig c;
  const std::int64_t spacing = 2 * 86400;
  for (int i = 0; i < 5; ++i) {
    Prompt p;
    p.index = i + 1;
    p.text = kTexts[i];
    p.release_time = first_release + i * spacing;
    p.deadline = p.release_time + spacing;
    c.prompts.push_back(p);
  }
  c.qualities = DefaultQualities();
  return c;
}

void ValidateConfig(const PlatformConfig& c) {
  if (c.prompts.empty()) Fail(ErrorKind::kParameter, "config: at least one prompt required");
  for (std::size_t i = 0; i < c.prompts.size(); ++i) {
    const auto& p = c.prompts[i];
    if (p.index != static_cast<int>(i) + 1)
      Fail(ErrorKind::kParameter, "config: prompt indices must be contiguous from 1");
    if (i > 0 && p.release_time <= c.prompts[i - 1].release_time)
      Fail(ErrorKind::kParameter, "config: prompt release times must be strictly increasing");
    if (p.deadline < p.release_time) Fail(ErrorKind::kParameter, "config: prompt deadline before release");
  }
  std::set<std::string> names;
  for (const auto& q : c.qualities)
    if (q.name.empty() || !names.insert(q.name).second)
      Fail(ErrorKind::kParameter, "config: empty or duplicate quality '" + q.name + "'");
  if (c.reviews_required < 1 || c.comments_required < 1 || c.qualities_per_video < 1)
    Fail(ErrorKind::kParameter, "config: gate thresholds must be positive");
  if (static_cast<std::size_t>(c.qualities_per_video) > c.qualities.size())
    Fail(ErrorKind::kParameter, "config: fewer qualities than qualities_per_video");
  if (c.leaderboard_period_seconds <= 0 || !(c.max_audio_seconds > 0) || !(c.max_frame_rate > 0))
    Fail(ErrorKind::kParameter, "config: periods and limits must be positive");
}

nlohmann::json ConfigToJson(const PlatformConfig& c) {
  nlohmann::json prompts = nlohmann::json::array();
  for (const auto& p : c.prompts) {
    prompts.push_back({{"index", p.index},
                       {"text", p.text},
                       {"guideline_video_ref", p.guideline_video_ref ? nlohmann::json(*p.guideline_video_ref) : nullptr},
                       {"release_time", p.release_time},
                       {"deadline", p.deadline}});
  }
  nlohmann::json qualities = nlohmann::json::array();
  for (const auto& q : c.qualities)
    qualities.push_back({{"name", q.name}, {"category", moderation::CategoryName(q.category)}});
  return {{"schema_version", 1},
          {"prompts", prompts},
          {"qualities", qualities},
          {"gate",
           {{"reviews_required", c.reviews_required},
            {"comments_required", c.comments_required},
            {"mode", c.gate_mode == GateMode::kPerCycle ? "per_cycle" : "cumulative"}}},
          {"qualities_per_video", c.qualities_per_video},
          {"leaderboard_period_seconds", c.leaderboard_period_seconds},
          {"limits", {{"max_audio_seconds", c.max_audio_seconds}, {"max_frame_rate", c.max_frame_rate}}}};
}

PlatformConfig ConfigFromJson(const nlohmann::json& doc) {
  PlatformConfig c = DefaultConfig();
  try {
    if (doc.contains("schema_version") && doc.at("schema_version").get<int>() != 1)
      Fail(ErrorKind::kVersion, "config: unsupported schema_version");
    if (doc.contains("prompts")) {
      c.prompts.clear();
      for (const auto& p : doc.at("prompts")) {
        Prompt prompt;
        prompt.index = p.at("index").get<int>();
        prompt.text = p.at("text").get<std::string>();
        if (p.contains("guideline_video_ref") && !p.at("guideline_video_ref").is_null())
          prompt.guideline_video_ref = p.at("guideline_video_ref").get<std::string>();
        prompt.release_time = p.at("release_time").get<std::int64_t>();
        prompt.deadline = p.value("deadline", prompt.release_time + 2 * 86400);
        c.prompts.push_back(prompt);
      }
    }
    if (doc.contains("qualities")) {
      c.qualities.clear();
      for (const auto& q : doc.at("qualities")) {
        Quality quality;
        quality.name = q.at("name").get<std::string>();
        auto cat = moderation::ParseCategory(q.value("category", "speech"));
        if (!cat) Fail(ErrorKind::kParameter, "config: unknown category for quality '" + quality.name + "'");
        quality.category = *cat;
        c.qualities.push_back(quality);
      }
    }
    if (doc.contains("gate")) {
      const auto& g = doc.at("gate");
      c.reviews_required = g.value("reviews_required", c.reviews_required);
      c.comments_required = g.value("comments_required", c.comments_required);
      const std::string mode = g.value("mode", std::string("per_cycle"));
      if (mode == "per_cycle")
        c.gate_mode = GateMode::kPerCycle;
      else if (mode == "cumulative")
        c.gate_mode = GateMode::kCumulative;
      else
        Fail(ErrorKind::kParameter, "config: gate mode must be per_cycle or cumulative");
    }
    c.qualities_per_video = doc.value("qualities_per_video", c.qualities_per_video);
    c.leaderboard_period_seconds = doc.value("leaderboard_period_seconds", c.leaderboard_period_seconds);
    if (doc.contains("limits")) {
      const auto& l = doc.at("limits");
      c.max_audio_seconds = l.value("max_audio_seconds", c.max_audio_seconds);
      c.max_frame_rate = l.value("max_frame_rate", c.max_frame_rate);
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("config: ") + e.what());
  }
  ValidateConfig(c);
  return c;
}

}  // namespace speakloop::workflow
