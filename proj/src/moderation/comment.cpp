#include "moderation/comment.hpp"

namespace speakloop::moderation {

const char* CategoryName(Category category) {
  switch (category) {
    case Category::kMovement: return "movement";
    case Category::kFriendliness: return "friendliness";
    case Category::kSpeech: return "speech";
  }
  return "speech";
}

std::optional<Category> ParseCategory(std::string_view name) {
  for (Category c : kAllCategories)
    if (name == CategoryName(c)) return c;
  return std::nullopt;
}

const char* SentimentName(Sentiment sentiment) {
  return sentiment == Sentiment::kPositive ? "positive" : "negative";
}

std::optional<Sentiment> ParseSentiment(std::string_view name) {
  if (name == "positive") return Sentiment::kPositive;
  if (name == "negative") return Sentiment::kNegative;
  return std::nullopt;
}

}  // namespace speakloop::moderation
