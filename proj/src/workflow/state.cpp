#include "workflow/state.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::workflow {

using nlohmann::json;

namespace {

bool ValidId(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

std::optional<double> OptionalDouble(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

AnalysisStatus ParseAnalysisStatus(const std::string& name) {
  if (name == "ready") return AnalysisStatus::kReady;
  if (name == "failed") return AnalysisStatus::kFailed;
  if (name == "pending") return AnalysisStatus::kPending;
  Fail(ErrorKind::kFormat, "event: unknown analysis status '" + name + "'");
}

}  // namespace

const char* AnalysisStatusName(AnalysisStatus status) {
  switch (status) {
    case AnalysisStatus::kPending: return "pending";
    case AnalysisStatus::kReady: return "ready";
    case AnalysisStatus::kFailed: return "failed";
  }
  return "pending";
}

std::string OwnerPseudonym(std::string_view viewer, std::string_view owner) {
  std::string key(viewer);
  key.push_back('\x1f');
  key.append(owner);
  return "peer-" + HexDigest(Fnv1a64(key)).substr(0, 10);
}

Workflow::Workflow(PlatformConfig config) : config_(std::move(config)) { ValidateConfig(config_); }

Workflow Workflow::Replay(PlatformConfig config, std::span<const Event> events) {
  Workflow w(std::move(config));
  for (const auto& e : events) w.Apply(e);
  return w;
}

Event Workflow::Commit(EventKind kind, std::int64_t now, json payload) {
  Event e;
  e.sequence = next_sequence_;
  e.timestamp = std::max(now, last_timestamp_);
  e.kind = kind;
  e.payload = std::move(payload);
  if (sink_) sink_(e);
  Apply(e);
  return e;
}

void Workflow::Apply(const Event& e) {
  if (e.sequence != next_sequence_)
    Fail(ErrorKind::kFormat, "event " + std::to_string(e.sequence) + ": expected sequence " +
                                 std::to_string(next_sequence_));
  if (e.timestamp < last_timestamp_)
    Fail(ErrorKind::kFormat, "event " + std::to_string(e.sequence) + ": timestamp goes backwards");
  const json& p = e.payload;
  try {
    switch (e.kind) {
      case EventKind::kUser: {
        UserRecord u;
        u.id = p.at("user_id").get<std::string>();
        auto c = ParseCondition(p.at("condition").get<std::string>());
        if (!c) Fail(ErrorKind::kFormat, "event: bad condition");
        u.condition = *c;
        u.token_digest = p.value("token_digest", std::string());
        if (users_.contains(u.id)) Fail(ErrorKind::kFormat, "event: duplicate user " + u.id);
        if (!u.token_digest.empty()) users_by_token_[u.token_digest] = u.id;
        users_.emplace(u.id, std::move(u));
        break;
      }
      case EventKind::kUpload: {
        Video v;
        v.id = p.at("video_id").get<std::string>();
        v.owner = p.at("user_id").get<std::string>();
        v.prompt_index = p.at("prompt_index").get<int>();
        v.title = p.value("title", std::string());
        v.description = p.value("description", std::string());
        v.qualities = p.at("qualities").get<std::vector<std::string>>();
        v.uploaded_at = e.timestamp;
        v.sequence = e.sequence;
        if (!users_.contains(v.owner)) Fail(ErrorKind::kFormat, "event: upload by unknown user");
        if (videos_.contains(v.id)) Fail(ErrorKind::kFormat, "event: duplicate video " + v.id);
        videos_.emplace(v.id, std::move(v));
        break;
      }
      case EventKind::kAnalysis: {
        auto it = videos_.find(p.at("video_id").get<std::string>());
        if (it == videos_.end()) Fail(ErrorKind::kFormat, "event: analysis of unknown video");
        it->second.analysis = ParseAnalysisStatus(p.at("status").get<std::string>());
        it->second.analysis_detail = p.value("detail", std::string());
        break;
      }
      case EventKind::kReview: {
        ReviewRecord r;
        r.id = p.at("review_id").get<std::string>();
        r.reviewer = p.at("reviewer_id").get<std::string>();
        r.video_id = p.at("video_id").get<std::string>();
        for (const auto& c : p.at("comments")) {
          ReviewComment rc;
          rc.id = c.at("id").get<std::string>();
          rc.text = c.at("text").get<std::string>();
          auto cat = moderation::ParseCategory(c.at("category").get<std::string>());
          if (!cat) Fail(ErrorKind::kFormat, "event: bad comment category");
          rc.category = *cat;
          rc.video_timestamp = OptionalDouble(c, "video_timestamp");
          r.comments.push_back(std::move(rc));
        }
        r.ratings = p.at("ratings").get<std::map<std::string, int>>();
        r.overall_rating = p.at("overall_rating").get<int>();
        r.created_at = e.timestamp;
        r.sequence = e.sequence;
        auto video = videos_.find(r.video_id);
        if (video == videos_.end() || !users_.contains(r.reviewer))
          Fail(ErrorKind::kFormat, "event: review references unknown video or user");
        r.counted = reviewed_[r.reviewer].insert(r.video_id).second;
        if (r.counted) counted_[r.reviewer].push_back({e.timestamp, e.sequence});
        notifications_[video->second.owner].push_back(
            {e.sequence, video->second.owner, r.video_id, r.id, e.timestamp});
        reviews_.push_back(std::move(r));
        break;
      }
      case EventKind::kPromptRelease: {
        const int index = p.at("index").get<int>();
        if (!config_.FindPrompt(index)) Fail(ErrorKind::kFormat, "event: release of unknown prompt");
        const LogPosition pos{e.timestamp, e.sequence};
        auto [it, fresh] = release_events_.emplace(index, pos);
        if (!fresh) it->second = std::min(it->second, pos);
        break;
      }
    }
  } catch (const json::exception& ex) {
    Fail(ErrorKind::kFormat, "event " + std::to_string(e.sequence) + ": " + ex.what());
  }
  events_.push_back(e);
  ++next_sequence_;
  last_timestamp_ = e.timestamp;
}

void Workflow::AddUser(const std::string& user_id, Condition condition, const std::string& token_digest,
                       std::int64_t now) {
  if (!ValidId(user_id)) Fail(ErrorKind::kInvalidArgument, "user id must be 1-64 chars of [A-Za-z0-9_.-]");
  if (users_.contains(user_id)) Fail(ErrorKind::kInvalidArgument, "user " + user_id + " already exists");
  if (!token_digest.empty() && users_by_token_.contains(token_digest))
    Fail(ErrorKind::kInvalidArgument, "token already issued");
  Commit(EventKind::kUser, now,
         {{"user_id", user_id}, {"condition", ConditionName(condition)}, {"token_digest", token_digest}});
}

UploadOutcome Workflow::Upload(const UploadRequest& req, std::int64_t now) {
  if (!users_.contains(req.user_id)) Fail(ErrorKind::kNotFound, "unknown user " + req.user_id);
  if (!config_.FindPrompt(req.prompt_index))
    Fail(ErrorKind::kNotFound, "unknown prompt " + std::to_string(req.prompt_index));
  const std::int64_t ts = std::max(now, last_timestamp_);
  auto gate = CanUpload(req.user_id, req.prompt_index, ts);
  if (!gate.allowed) return {false, gate.reason, {}};

  if (req.qualities.size() != static_cast<std::size_t>(config_.qualities_per_video))
    Fail(ErrorKind::kInvalidArgument, "qualities: expected " + std::to_string(config_.qualities_per_video));
  std::set<std::string> seen;
  for (const auto& q : req.qualities) {
    if (!config_.FindQuality(q)) Fail(ErrorKind::kInvalidArgument, "qualities: unknown quality '" + q + "'");
    if (!seen.insert(q).second) Fail(ErrorKind::kInvalidArgument, "qualities: duplicate '" + q + "'");
  }
  const std::string id = req.video_id.value_or("v" + std::to_string(next_sequence_));
  if (!ValidId(id)) Fail(ErrorKind::kInvalidArgument, "video id must be 1-64 chars of [A-Za-z0-9_.-]");
  if (videos_.contains(id)) Fail(ErrorKind::kInvalidArgument, "video " + id + " already exists");
  Commit(EventKind::kUpload, ts,
         {{"video_id", id},
          {"user_id", req.user_id},
          {"prompt_index", req.prompt_index},
          {"title", req.title},
          {"description", req.description},
          {"qualities", req.qualities}});
  return {true, {}, id};
}

void Workflow::CompleteAnalysis(const std::string& video_id, bool ok, const std::string& detail,
                                std::int64_t now) {
  if (!videos_.contains(video_id)) Fail(ErrorKind::kNotFound, "unknown video " + video_id);
  Commit(EventKind::kAnalysis, now,
         {{"video_id", video_id}, {"status", ok ? "ready" : "failed"}, {"detail", detail}});
}

ReviewOutcome Workflow::SubmitReview(const ReviewRequest& req, std::int64_t now) {
  const Video* video = FindVideo(req.video_id);
  if (!video) Fail(ErrorKind::kNotFound, "unknown video " + req.video_id);
  if (!users_.contains(req.reviewer_id)) Fail(ErrorKind::kNotFound, "unknown user " + req.reviewer_id);
  ReviewOutcome out;
  if (req.reviewer_id == video->owner) {
    out.reason = "own video";
    return out;
  }
  const int required = config_.comments_required;
  if (req.comments.size() < static_cast<std::size_t>(required)) {
    out.reason = "comments " + std::to_string(req.comments.size()) + "/" + std::to_string(required);
    return out;
  }
  for (const auto& c : req.comments) {
    if (Trim(c.text).empty()) {
      out.reason = "comments: empty text";
      return out;
    }
    if (c.video_timestamp && !(std::isfinite(*c.video_timestamp) && *c.video_timestamp >= 0)) {
      out.reason = "comments: video_timestamp must be a non-negative number";
      return out;
    }
  }
  bool exact = req.ratings.size() == video->qualities.size();
  for (const auto& q : video->qualities) exact = exact && req.ratings.contains(q);
  if (!exact) {
    out.reason = "ratings: expected the " + std::to_string(video->qualities.size()) + " selected qualities";
    return out;
  }
  int sum = 0;
  for (const auto& [q, stars] : req.ratings) {
    if (stars < 1 || stars > 5) {
      out.reason = "ratings: '" + q + "' outside 1..5";
      return out;
    }
    sum += stars;
  }
  int overall;
  if (req.overall_rating) {
    overall = *req.overall_rating;
    if (overall < 1 || overall > 5) {
      out.reason = "overall_rating outside 1..5";
      return out;
    }
  } else {
    // round half up of sum / n in integers
    const int n = static_cast<int>(req.ratings.size());
    overall = (2 * sum + n) / (2 * n);
  }

  const std::string review_id = "r" + std::to_string(next_sequence_);
  json comments = json::array();
  for (std::size_t i = 0; i < req.comments.size(); ++i) {
    const auto& c = req.comments[i];
    comments.push_back({{"id", review_id + "-c" + std::to_string(i + 1)},
                        {"text", c.text},
                        {"category", moderation::CategoryName(c.category)},
                        {"video_timestamp", c.video_timestamp ? json(*c.video_timestamp) : json(nullptr)}});
  }
  auto seen = reviewed_.find(req.reviewer_id);
  out.progress_incremented = seen == reviewed_.end() || !seen->second.contains(req.video_id);
  Commit(EventKind::kReview, now,
         {{"review_id", review_id},
          {"reviewer_id", req.reviewer_id},
          {"video_id", req.video_id},
          {"comments", comments},
          {"ratings", req.ratings},
          {"overall_rating", overall}});
  out.accepted = true;
  out.review_id = review_id;
  return out;
}

void Workflow::ReleasePrompt(int index, std::int64_t now) {
  if (!config_.FindPrompt(index)) Fail(ErrorKind::kNotFound, "unknown prompt " + std::to_string(index));
  Commit(EventKind::kPromptRelease, now, {{"index", index}});
}

std::int64_t Workflow::EffectiveRelease(int prompt_index) const {
  const Prompt* p = config_.FindPrompt(prompt_index);
  if (!p) Fail(ErrorKind::kNotFound, "unknown prompt " + std::to_string(prompt_index));
  auto it = release_events_.find(prompt_index);
  return it == release_events_.end() ? p->release_time : std::min(p->release_time, it->second.first);
}

int Workflow::CurrentPrompt(std::int64_t now) const {
  int current = 0;
  for (const auto& p : config_.prompts)
    if (EffectiveRelease(p.index) <= now) current = std::max(current, p.index);
  return current;
}

const std::vector<LogPosition>& Workflow::CountedPositions(const std::string& user_id) const {
  static const std::vector<LogPosition> kNone;
  auto it = counted_.find(user_id);
  return it == counted_.end() ? kNone : it->second;
}

std::optional<LogPosition> Workflow::UnlockPosition(const std::string& user_id, int prompt_index) const {
  auto release = [&](int index) -> LogPosition {
    const Prompt* p = config_.FindPrompt(index);
    LogPosition pos{p->release_time, 0};
    auto it = release_events_.find(index);
    return it == release_events_.end() ? pos : std::min(pos, it->second);
  };
  if (!config_.FindPrompt(prompt_index)) Fail(ErrorKind::kNotFound, "unknown prompt " + std::to_string(prompt_index));
  const auto& counted = CountedPositions(user_id);
  const std::size_t required = static_cast<std::size_t>(config_.reviews_required);
  if (config_.gate_mode == GateMode::kCumulative) {
    if (prompt_index == 1) return release(1);
    const std::size_t need = required * static_cast<std::size_t>(prompt_index - 1);
    if (counted.size() < need) return std::nullopt;
    return std::max(release(prompt_index), counted[need - 1]);
  }
  LogPosition unlock = release(1);
  for (int p = 2; p <= prompt_index; ++p) {
    auto first = std::upper_bound(counted.begin(), counted.end(), unlock);
    if (static_cast<std::size_t>(counted.end() - first) < required) return std::nullopt;
    unlock = std::max(release(p), *(first + static_cast<std::ptrdiff_t>(required) - 1));
  }
  return unlock;
}

GateStatus Workflow::CanUpload(const std::string& user_id, int prompt_index, std::int64_t now) const {
  if (!config_.FindPrompt(prompt_index)) Fail(ErrorKind::kNotFound, "unknown prompt " + std::to_string(prompt_index));
  if (!users_.contains(user_id)) Fail(ErrorKind::kNotFound, "unknown user " + user_id);
  GateStatus g;
  g.reviews_required = config_.reviews_required;
  const int required = config_.reviews_required;
  if (EffectiveRelease(prompt_index) > now) {
    g.reason = "not released";
    return g;
  }
  if (prompt_index == 1) {
    g.allowed = true;
    return g;
  }
  const auto& counted = CountedPositions(user_id);
  auto until_now = [&](auto begin) {
    return static_cast<int>(std::count_if(begin, counted.end(), [&](const LogPosition& p) { return p.first <= now; }));
  };
  if (config_.gate_mode == GateMode::kCumulative) {
    const int total = until_now(counted.begin());
    g.reviews_done = std::clamp(total - required * (prompt_index - 2), 0, required);
    g.allowed = total >= required * (prompt_index - 1);
  } else {
    auto prev = UnlockPosition(user_id, prompt_index - 1);
    if (!prev || prev->first > now) {
      g.reason = "prompt " + std::to_string(prompt_index - 1) + " locked";
      return g;
    }
    g.reviews_done = std::min(required, until_now(std::upper_bound(counted.begin(), counted.end(), *prev)));
    g.allowed = g.reviews_done >= required;
  }
  if (!g.allowed) g.reason = "reviews " + std::to_string(g.reviews_done) + "/" + std::to_string(required);
  return g;
}

std::vector<FeedItem> Workflow::Feed(const std::string& viewer_id) const {
  static const std::set<std::string> kNone;
  auto seen = reviewed_.find(viewer_id);
  const auto& reviewed = seen == reviewed_.end() ? kNone : seen->second;
  std::vector<const Video*> picked;
  for (const auto& [id, v] : videos_) {
    if (v.owner == viewer_id || v.analysis == AnalysisStatus::kPending) continue;
    if (reviewed.contains(id)) continue;
    picked.push_back(&v);
  }
  std::sort(picked.begin(), picked.end(), [](const Video* a, const Video* b) {
    return std::tie(a->uploaded_at, a->sequence) > std::tie(b->uploaded_at, b->sequence);
  });
  std::vector<FeedItem> out;
  for (const Video* v : picked)
    out.push_back({v->id, OwnerPseudonym(viewer_id, v->owner), v->prompt_index, v->title, v->description,
                   v->qualities, v->uploaded_at});
  return out;
}

std::map<std::string, std::string> Workflow::FinalVideos(int prompt_index) const {
  std::map<std::string, const Video*> best;
  for (const auto& [id, v] : videos_) {
    if (v.prompt_index != prompt_index) continue;
    auto& slot = best[v.owner];
    if (!slot || std::tie(v.uploaded_at, v.sequence) > std::tie(slot->uploaded_at, slot->sequence)) slot = &v;
  }
  std::map<std::string, std::string> out;
  for (const auto& [owner, v] : best) out.emplace(owner, v->id);
  return out;
}

std::size_t Workflow::Progress(const std::string& user_id) const {
  auto it = counted_.find(user_id);
  return it == counted_.end() ? 0 : it->second.size();
}

std::vector<Notification> Workflow::Notifications(const std::string& user_id) const {
  auto it = notifications_.find(user_id);
  return it == notifications_.end() ? std::vector<Notification>{} : it->second;
}

std::vector<const ReviewRecord*> Workflow::ReviewsOf(const std::string& video_id) const {
  std::vector<const ReviewRecord*> out;
  for (const auto& r : reviews_)
    if (r.video_id == video_id) out.push_back(&r);
  return out;
}

Leaderboard Workflow::LeaderboardAt(std::int64_t now) const {
  Leaderboard board;
  const std::int64_t epoch = config_.prompts.front().release_time;
  if (now < epoch) {
    board.as_of = epoch;
    return board;
  }
  const std::int64_t period = config_.leaderboard_period_seconds;
  board.as_of = epoch + ((now - epoch) / period) * period;

  // final video per (owner, prompt) among uploads visible at the cutoff
  std::map<std::pair<std::string, int>, const Video*> finals;
  for (const auto& [id, v] : videos_) {
    if (v.uploaded_at > board.as_of) continue;
    auto& slot = finals[{v.owner, v.prompt_index}];
    if (!slot || std::tie(v.uploaded_at, v.sequence) > std::tie(slot->uploaded_at, slot->sequence)) slot = &v;
  }
  std::set<std::string> final_ids;
  for (const auto& [k, v] : finals) final_ids.insert(v->id);
  std::map<std::pair<std::string, std::string>, const ReviewRecord*> latest;  // (reviewer, video)
  for (const auto& r : reviews_)
    if (r.created_at <= board.as_of && final_ids.contains(r.video_id)) latest[{r.reviewer, r.video_id}] = &r;
  std::map<std::string, std::pair<double, std::size_t>> totals;
  for (const auto& [k, r] : latest) {
    auto& t = totals[videos_.at(r->video_id).owner];
    t.first += r->overall_rating;
    ++t.second;
  }
  for (const auto& [user, t] : totals) board.entries.push_back({user, Round6(t.first / t.second), t.second});
  std::sort(board.entries.begin(), board.entries.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    if (a.mean_rating != b.mean_rating) return a.mean_rating > b.mean_rating;
    if (a.ratings != b.ratings) return a.ratings > b.ratings;
    return a.user_id < b.user_id;
  });
  return board;
}

std::string Workflow::RatingsExportCsv() const {
  std::set<std::string> finals;
  for (const auto& p : config_.prompts)
    for (const auto& [user, video] : FinalVideos(p.index)) finals.insert(video);
  std::string out = "rater_id,video_id,user_id,prompt_index,condition,overall_rating,timestamp\n";
  for (const auto& r : reviews_) {
    if (!finals.contains(r.video_id)) continue;
    const Video& v = videos_.at(r.video_id);
    out += r.reviewer + "," + v.id + "," + v.owner + "," + std::to_string(v.prompt_index) + "," +
           ConditionName(users_.at(v.owner).condition) + "," + std::to_string(r.overall_rating) + "," +
           std::to_string(r.created_at) + "\n";
  }
  return out;
}

const UserRecord* Workflow::FindUser(const std::string& user_id) const {
  auto it = users_.find(user_id);
  return it == users_.end() ? nullptr : &it->second;
}

const UserRecord* Workflow::FindUserByToken(const std::string& token_digest) const {
  auto it = users_by_token_.find(token_digest);
  return it == users_by_token_.end() ? nullptr : FindUser(it->second);
}

const Video* Workflow::FindVideo(const std::string& video_id) const {
  auto it = videos_.find(video_id);
  return it == videos_.end() ? nullptr : &it->second;
}

std::vector<std::string> Workflow::PendingAnalyses() const {
  std::vector<const Video*> pending;
  for (const auto& [id, v] : videos_)
    if (v.analysis == AnalysisStatus::kPending) pending.push_back(&v);
  std::sort(pending.begin(), pending.end(), [](const Video* a, const Video* b) { return a->sequence < b->sequence; });
  std::vector<std::string> out;
  for (const Video* v : pending) out.push_back(v->id);
  return out;
}

json Workflow::StateJson() const {
  json users = json::array();
  for (const auto& [id, u] : users_)
    users.push_back({{"id", id}, {"condition", ConditionName(u.condition)}, {"token_digest", u.token_digest},
                     {"progress", Progress(id)}});
  json videos = json::array();
  for (const auto& [id, v] : videos_)
    videos.push_back({{"id", id}, {"owner", v.owner}, {"prompt_index", v.prompt_index}, {"title", v.title},
                      {"description", v.description}, {"qualities", v.qualities}, {"uploaded_at", v.uploaded_at},
                      {"sequence", v.sequence}, {"analysis", AnalysisStatusName(v.analysis)},
                      {"analysis_detail", v.analysis_detail}});
  json reviews = json::array();
  for (const auto& r : reviews_) {
    json comments = json::array();
    for (const auto& c : r.comments)
      comments.push_back({{"id", c.id}, {"text", c.text}, {"category", moderation::CategoryName(c.category)},
                          {"video_timestamp", c.video_timestamp ? json(Round6(*c.video_timestamp)) : json(nullptr)}});
    reviews.push_back({{"id", r.id}, {"reviewer", r.reviewer}, {"video_id", r.video_id}, {"comments", comments},
                       {"ratings", r.ratings}, {"overall_rating", r.overall_rating}, {"created_at", r.created_at},
                       {"sequence", r.sequence}, {"counted", r.counted}});
  }
  json notifications = json::object();
  for (const auto& [user, list] : notifications_) {
    json items = json::array();
    for (const auto& n : list)
      items.push_back({{"sequence", n.sequence}, {"video_id", n.video_id}, {"review_id", n.review_id},
                       {"created_at", n.created_at}});
    notifications[user] = items;
  }
  json releases = json::object();
  for (const auto& [index, pos] : release_events_)
    releases[std::to_string(index)] = {{"timestamp", pos.first}, {"sequence", pos.second}};
  return {{"schema_version", 1},   {"users", users},
          {"videos", videos},      {"reviews", reviews},
          {"notifications", notifications}, {"releases", releases},
          {"next_sequence", next_sequence_}};
}

std::uint64_t Workflow::StateHash() const { return Fnv1a64(StateJson().dump()); }

}  // namespace speakloop::workflow
