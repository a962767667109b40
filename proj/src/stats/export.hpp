#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace speakloop::stats {

// One row of `rater_id,video_id,user_id,prompt_index,condition,overall_rating,timestamp`.
// user_id is the owner of the rated video.
struct RatingRecord {
  std::string rater_id;
  std::string video_id;
  std::string user_id;
  int prompt_index = 1;
  std::string condition;
  int overall_rating = 0;
  std::int64_t timestamp = 0;
};

std::vector<RatingRecord> ParseRatingsExport(std::string_view csv);
std::string RatingsExportHeader();

// Keeps the latest rating (by timestamp, then file order) for every
// (rater, video) pair; each dropped duplicate adds a warning.
std::vector<RatingRecord> LatestPerRaterVideo(const std::vector<RatingRecord>& records,
                                              std::vector<std::string>& warnings);

// (user, prompt) -> final video. An export should reference final videos
// only; when a user has several videos for one prompt the one with the most
// recent rating activity is kept and a warning is added.
std::map<std::pair<std::string, int>, std::string> FinalVideosFromExport(
    const std::vector<RatingRecord>& records, std::vector<std::string>& warnings);

struct TrajectoryPoint {
  int prompt_index = 0;
  double mean = 0.0;
  double standard_error = 0.0;  // sample sd / sqrt(n); 0 when n == 1
  std::size_t n = 0;
};

// condition -> per-prompt points over all ratings of the prompt's final
// videos. Prompts in [1, prompt_count] without ratings are omitted with a
// warning.
std::map<std::string, std::vector<TrajectoryPoint>> Trajectory(const std::vector<RatingRecord>& records,
                                                               std::optional<int> prompt_count,
                                                               std::vector<std::string>& warnings);

struct UserDelta {
  std::string user_id;
  std::string condition;
  double initial = 0.0;  // mean rating of the first prompt's final video
  double final = 0.0;    // mean rating of the last prompt's final video
  double delta = 0.0;
};

struct DeltaSummary {
  double mean = 0.0;
  std::size_t regressed = 0;
  std::size_t same = 0;
  std::size_t improved = 0;
};

std::vector<UserDelta> ImprovementDeltas(const std::vector<RatingRecord>& records, int first_prompt,
                                         int last_prompt, std::vector<std::string>& warnings);
DeltaSummary SummarizeDeltas(const std::vector<UserDelta>& deltas);

// Full evaluation report: alpha, trajectories, deltas, paired t per
// condition, and treatment-vs-control effect sizes on the deltas.
nlohmann::json BuildStatsReport(const std::vector<RatingRecord>& records, std::optional<int> prompt_count);
std::string RenderStatsReportText(const nlohmann::json& report);

}  // namespace speakloop::stats
