#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moderation/comment.hpp"
#include "moderation/training.hpp"
#include "workflow/config.hpp"

namespace speakloop::service {

inline constexpr int kBundleSchemaVersion = 1;

// One reviewer's star ratings for a video.
struct RatingSet {
  std::map<std::string, int> ratings;  // quality -> 1..5
  int overall_rating = 3;
};

struct BundleInput {
  std::string video_id;
  workflow::Condition condition = workflow::Condition::kTreatment;
  int prompt_index = 1;
  std::string title;
  std::string description;
  std::vector<workflow::Quality> qualities;  // the owner's selection
  std::string analysis_status = "ready";     // ready | pending | failed
  const nlohmann::json* analysis = nullptr;   // AnalyzeSubmission output
  std::vector<moderation::Comment> comments;
  std::vector<RatingSet> ratings;
  const moderation::ModerationModels* models = nullptr;
  std::size_t top_comments = 3;
};

// Canonical FeedbackBundle document. Control bundles carry playback,
// comments (chronological) and the ratings summary only. Treatment bundles
// add the automated sections, ranked comments with predictions and the
// feedback summary. Reviewer identities are never included.
nlohmann::json BuildFeedbackBundle(const BundleInput& input);

}  // namespace speakloop::service
