#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace speakloop::moderation {

enum class Category { kMovement, kFriendliness, kSpeech };

inline constexpr Category kAllCategories[] = {Category::kMovement, Category::kFriendliness,
                                              Category::kSpeech};

const char* CategoryName(Category category);
std::optional<Category> ParseCategory(std::string_view name);

enum class Sentiment { kPositive, kNegative };

const char* SentimentName(Sentiment sentiment);
std::optional<Sentiment> ParseSentiment(std::string_view name);

struct Comment {
  std::string id;
  std::string video_id;
  std::string author_id;  // never shown to the video owner
  std::string text;
  Category category = Category::kSpeech;
  std::optional<double> video_timestamp;  // seconds into the video
  std::int64_t created_at = 0;            // unix seconds
};

}  // namespace speakloop::moderation
