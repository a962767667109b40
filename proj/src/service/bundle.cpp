#include "service/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/util.hpp"
#include "moderation/features.hpp"
#include "moderation/ranking.hpp"
#include "moderation/regression.hpp"
#include "moderation/sentiment.hpp"
#include "service/analysis.hpp"
#include "workflow/anonymize.hpp"

namespace speakloop::service {

using nlohmann::json;
using moderation::Category;

namespace {

json Num(double v) { return std::isfinite(v) ? json(Round6(v)) : json(nullptr); }

json CommentJson(const moderation::Comment& c) {
  return {{"id", c.id},
          {"text", c.text},
          {"category", moderation::CategoryName(c.category)},
          {"video_timestamp", c.video_timestamp ? Num(*c.video_timestamp) : json(nullptr)},
          {"created_at", c.created_at}};
}

json ScoredJson(const moderation::ScoredComment& s, bool has_helpfulness, bool has_sentiment) {
  json j = CommentJson(s.comment);
  j["predicted_helpfulness"] = has_helpfulness ? Num(s.helpfulness) : json(nullptr);
  j["predicted_sentiment"] = has_sentiment ? json(moderation::SentimentName(s.sentiment)) : json(nullptr);
  return j;
}

json RatingsSummary(const BundleInput& in) {
  json qualities = json::array();
  for (const auto& q : in.qualities) {
    std::array<int, 5> histogram{};
    int sum = 0, n = 0;
    for (const auto& r : in.ratings) {
      auto it = r.ratings.find(q.name);
      if (it == r.ratings.end()) continue;
      ++histogram[static_cast<std::size_t>(it->second - 1)];
      sum += it->second;
      ++n;
    }
    qualities.push_back({{"quality", q.name},
                         {"category", moderation::CategoryName(q.category)},
                         {"mean", n ? Num(static_cast<double>(sum) / n) : json(nullptr)},
                         {"count", n},
                         {"histogram", histogram}});
  }
  int overall_sum = 0;
  for (const auto& r : in.ratings) overall_sum += r.overall_rating;
  const int count = static_cast<int>(in.ratings.size());
  return {{"reviews", count},
          {"overall", {{"mean", count ? Num(static_cast<double>(overall_sum) / count) : json(nullptr)}, {"count", count}}},
          {"qualities", qualities}};
}

json CategoryMeans(const BundleInput& in) {
  json out = json::object();
  for (Category c : moderation::kAllCategories) {
    int sum = 0, n = 0;
    for (const auto& q : in.qualities) {
      if (q.category != c) continue;
      for (const auto& r : in.ratings) {
        auto it = r.ratings.find(q.name);
        if (it == r.ratings.end()) continue;
        sum += it->second;
        ++n;
      }
    }
    out[moderation::CategoryName(c)] = n ? Num(static_cast<double>(sum) / n) : json(nullptr);
  }
  return out;
}

}  // namespace

json BuildFeedbackBundle(const BundleInput& in) {
  const bool treatment = in.condition == workflow::Condition::kTreatment;
  json b = {{"schema_version", kBundleSchemaVersion},
            {"kind", "feedback_bundle"},
            {"video_id", in.video_id},
            {"condition", workflow::ConditionName(in.condition)},
            {"prompt_index", in.prompt_index},
            {"title", in.title},
            {"description", in.description}};
  json playback = {{"video_id", in.video_id}};
  if (in.analysis) playback["duration_seconds"] = in.analysis->at("headline").at("duration_seconds");
  b["playback"] = playback;
  b["ratings_summary"] = RatingsSummary(in);

  if (!treatment) {
    std::vector<moderation::Comment> ordered = in.comments;
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& c) {
      return std::tie(a.created_at, a.id) < std::tie(c.created_at, c.id);
    });
    json comments = json::array();
    for (const auto& c : ordered) comments.push_back(CommentJson(c));
    b["comments"] = comments;
    return workflow::AnonymizeFeedback(std::move(b));
  }

  b["analysis_status"] = in.analysis_status;
  const moderation::SeriesMap series = in.analysis ? SeriesFromAnalysis(*in.analysis) : moderation::EmptySeriesMap();
  if (in.analysis) {
    for (const char* key : {"series", "transcript", "unique_words", "word_frequencies", "fillers", "word_prosody"})
      b[key] = in.analysis->at(key);
  } else {
    b["series"] = nullptr;
    b["transcript"] = nullptr;
    b["unique_words"] = nullptr;
    b["word_frequencies"] = json::array();
    b["fillers"] = json::array();
    b["word_prosody"] = json::array();
  }

  const bool has_sentiment = in.models && in.models->sentiment;
  std::vector<moderation::ScoredComment> scored;
  std::map<std::string, bool> helpful_known;
  for (const auto& c : in.comments) {
    moderation::ScoredComment s;
    s.comment = c;
    s.comment.author_id.clear();
    s.helpfulness = std::numeric_limits<double>::quiet_NaN();
    if (in.models) {
      auto it = in.models->helpfulness.find(c.category);
      if (it != in.models->helpfulness.end())
        s.helpfulness = moderation::ScoreHelpfulness(it->second, moderation::ExtractFeatures(c, series));
    }
    helpful_known[c.id] = std::isfinite(s.helpfulness);
    if (has_sentiment) s.sentiment = moderation::Classify(*in.models->sentiment, c.text);
    scored.push_back(std::move(s));
  }
  const auto ranked = moderation::RankComments(scored, in.top_comments);
  json top = json::array(), rest = json::array();
  for (const auto& s : ranked.top) top.push_back(ScoredJson(s, helpful_known[s.comment.id], has_sentiment));
  for (const auto& s : ranked.rest) rest.push_back(ScoredJson(s, helpful_known[s.comment.id], has_sentiment));
  b["ranked_comments"] = {{"top", top}, {"rest", rest}};

  json top_positive = nullptr, top_negative = nullptr;
  if (has_sentiment) {
    std::vector<moderation::ScoredComment> all = ranked.top;
    all.insert(all.end(), ranked.rest.begin(), ranked.rest.end());
    for (const auto& s : all) {
      if (s.sentiment == moderation::Sentiment::kPositive && top_positive.is_null())
        top_positive = ScoredJson(s, helpful_known[s.comment.id], true);
      if (s.sentiment == moderation::Sentiment::kNegative && top_negative.is_null())
        top_negative = ScoredJson(s, helpful_known[s.comment.id], true);
    }
  }
  b["feedback_summary"] = {{"category_mean_rating", CategoryMeans(in)},
                           {"headline", in.analysis ? in.analysis->at("headline") : json(nullptr)},
                           {"top_positive_comment", top_positive},
                           {"top_negative_comment", top_negative}};
  return workflow::AnonymizeFeedback(std::move(b));
}

}  // namespace speakloop::service
