#include "moderation/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace speakloop::moderation {

namespace {
double Key(double h) { return std::isfinite(h) ? h : -std::numeric_limits<double>::infinity(); }
}  // namespace

bool RanksBefore(const ScoredComment& a, const ScoredComment& b) {
  const double ha = Key(a.helpfulness), hb = Key(b.helpfulness);
  if (ha != hb) return ha > hb;
  if (a.sentiment != b.sentiment) return a.sentiment == Sentiment::kPositive;
  if (a.comment.created_at != b.comment.created_at) return a.comment.created_at < b.comment.created_at;
  return a.comment.id < b.comment.id;
}

RankedComments RankComments(std::vector<ScoredComment> comments, std::size_t top_k) {
  std::stable_sort(comments.begin(), comments.end(), RanksBefore);
  RankedComments out;
  const std::size_t k = std::min(top_k, comments.size());
  out.top.assign(std::make_move_iterator(comments.begin()), std::make_move_iterator(comments.begin() + static_cast<std::ptrdiff_t>(k)));
  out.rest.assign(std::make_move_iterator(comments.begin() + static_cast<std::ptrdiff_t>(k)), std::make_move_iterator(comments.end()));
  return out;
}

}  // namespace speakloop::moderation
