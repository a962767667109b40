#pragma once

#include <vector>

#include "moderation/comment.hpp"

namespace speakloop::moderation {

struct ScoredComment {
  Comment comment;
  double helpfulness = 0.0;
  Sentiment sentiment = Sentiment::kPositive;
};

// Strict total order: helpfulness descending, positive before negative,
// created_at ascending, then id ascending. Non-finite helpfulness sorts as
// lowest.
bool RanksBefore(const ScoredComment& a, const ScoredComment& b);

struct RankedComments {
  std::vector<ScoredComment> top;   // highlighted section
  std::vector<ScoredComment> rest;  // same order, below
};

RankedComments RankComments(std::vector<ScoredComment> comments, std::size_t top_k);

}  // namespace speakloop::moderation
