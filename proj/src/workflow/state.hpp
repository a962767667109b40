#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "moderation/comment.hpp"
#include "workflow/config.hpp"
#include "workflow/events.hpp"

namespace speakloop::workflow {

// Log position: (timestamp, sequence). Configured release times sit at
// sequence 0, ahead of any event at the same second.
using LogPosition = std::pair<std::int64_t, std::uint64_t>;

enum class AnalysisStatus { kPending, kReady, kFailed };
const char* AnalysisStatusName(AnalysisStatus status);

struct UserRecord {
  std::string id;
  Condition condition = Condition::kTreatment;
  std::string token_digest;
};

struct Video {
  std::string id;
  std::string owner;
  int prompt_index = 1;
  std::string title;
  std::string description;
  std::vector<std::string> qualities;
  std::int64_t uploaded_at = 0;
  std::uint64_t sequence = 0;
  AnalysisStatus analysis = AnalysisStatus::kPending;
  std::string analysis_detail;
};

struct ReviewComment {
  std::string id;
  std::string text;
  moderation::Category category = moderation::Category::kSpeech;
  std::optional<double> video_timestamp;
};

struct ReviewRecord {
  std::string id;
  std::string reviewer;
  std::string video_id;
  std::vector<ReviewComment> comments;
  std::map<std::string, int> ratings;  // quality -> 1..5
  int overall_rating = 3;
  std::int64_t created_at = 0;
  std::uint64_t sequence = 0;
  bool counted = false;  // first accepted review of this video by this reviewer
};

struct Notification {
  std::uint64_t sequence = 0;
  std::string user_id;
  std::string video_id;
  std::string review_id;
  std::int64_t created_at = 0;
};

struct GateStatus {
  bool allowed = false;
  std::string reason;  // empty when allowed
  int reviews_done = 0;
  int reviews_required = 0;
};

struct UploadRequest {
  std::string user_id;
  int prompt_index = 1;
  std::string title;
  std::string description;
  std::vector<std::string> qualities;
  std::optional<std::string> video_id;  // default "v<sequence>"
};

struct UploadOutcome {
  bool accepted = false;
  std::string reason;
  std::string video_id;
};

struct CommentInput {
  std::string text;
  moderation::Category category = moderation::Category::kSpeech;
  std::optional<double> video_timestamp;
};

struct ReviewRequest {
  std::string reviewer_id;
  std::string video_id;
  std::vector<CommentInput> comments;
  std::map<std::string, int> ratings;
  // Absent: the mean of the quality ratings rounded half up.
  std::optional<int> overall_rating;
};

struct ReviewOutcome {
  bool accepted = false;
  std::string reason;
  std::string review_id;
  bool progress_incremented = false;
};

struct FeedItem {
  std::string video_id;
  std::string owner_pseudonym;
  int prompt_index = 1;
  std::string title;
  std::string description;
  std::vector<std::string> qualities;
  std::int64_t uploaded_at = 0;
};

struct LeaderboardEntry {
  std::string user_id;
  double mean_rating = 0.0;
  std::size_t ratings = 0;
};

struct Leaderboard {
  std::int64_t as_of = 0;
  std::vector<LeaderboardEntry> entries;
};

// Stable per-viewer alias for a video owner.
std::string OwnerPseudonym(std::string_view viewer, std::string_view owner);

// Every mutation is an Event passed through Apply(), both live and on
// replay, so replaying a log prefix reproduces the live state at that point.
class Workflow {
 public:
  explicit Workflow(PlatformConfig config);

  // Called with each new event before it is applied; throwing aborts the
  // command with state unchanged.
  using EventSink = std::function<void(const Event&)>;
  void SetSink(EventSink sink) { sink_ = std::move(sink); }

  static Workflow Replay(PlatformConfig config, std::span<const Event> events);
  void Apply(const Event& event);

  void AddUser(const std::string& user_id, Condition condition, const std::string& token_digest, std::int64_t now);
  UploadOutcome Upload(const UploadRequest& request, std::int64_t now);
  void CompleteAnalysis(const std::string& video_id, bool ok, const std::string& detail, std::int64_t now);
  ReviewOutcome SubmitReview(const ReviewRequest& request, std::int64_t now);
  void ReleasePrompt(int index, std::int64_t now);

  GateStatus CanUpload(const std::string& user_id, int prompt_index, std::int64_t now) const;
  std::optional<LogPosition> UnlockPosition(const std::string& user_id, int prompt_index) const;
  std::int64_t EffectiveRelease(int prompt_index) const;
  // Highest prompt released at `now`, 0 when none.
  int CurrentPrompt(std::int64_t now) const;

  std::vector<FeedItem> Feed(const std::string& viewer_id) const;
  std::map<std::string, std::string> FinalVideos(int prompt_index) const;
  std::size_t Progress(const std::string& user_id) const;
  std::vector<Notification> Notifications(const std::string& user_id) const;
  std::vector<const ReviewRecord*> ReviewsOf(const std::string& video_id) const;
  Leaderboard LeaderboardAt(std::int64_t now) const;
  // Ratings of final videos in the stats export format.
  std::string RatingsExportCsv() const;

  const UserRecord* FindUser(const std::string& user_id) const;
  const UserRecord* FindUserByToken(const std::string& token_digest) const;
  const Video* FindVideo(const std::string& video_id) const;
  std::vector<std::string> PendingAnalyses() const;

  const PlatformConfig& config() const { return config_; }
  const std::vector<Event>& events() const { return events_; }
  std::uint64_t next_sequence() const { return next_sequence_; }

  nlohmann::json StateJson() const;
  std::uint64_t StateHash() const;

 private:
  Event Commit(EventKind kind, std::int64_t now, nlohmann::json payload);
  const std::vector<LogPosition>& CountedPositions(const std::string& user_id) const;

  PlatformConfig config_;
  EventSink sink_;
  std::vector<Event> events_;
  std::uint64_t next_sequence_ = 1;
  std::int64_t last_timestamp_ = std::numeric_limits<std::int64_t>::min();

  std::map<std::string, UserRecord> users_;
  std::map<std::string, std::string> users_by_token_;
  std::map<std::string, Video> videos_;
  std::vector<ReviewRecord> reviews_;
  std::map<std::string, std::set<std::string>> reviewed_;  // reviewer -> videos
  std::map<std::string, std::vector<LogPosition>> counted_;  // reviewer -> first-review positions
  std::map<std::string, std::vector<Notification>> notifications_;
  std::map<int, LogPosition> release_events_;
};

}  // namespace speakloop::workflow
