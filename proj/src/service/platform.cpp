#include "service/platform.hpp"

#include <fcntl.h>
#include <openssl/rand.h>
#include <openssl/sha.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "common/error.hpp"
#include "common/util.hpp"
#include "service/bundle.hpp"
#include "service/tar.hpp"
#include "workflow/events.hpp"

namespace speakloop::service {

namespace fs = std::filesystem;
using nlohmann::json;
using workflow::Condition;

namespace {

HttpResponse JsonResponse(int status, const json& body) { return {status, "application/json", body.dump()}; }

HttpResponse ErrorResponse(int status, const std::string& code, const std::string& detail) {
  return JsonResponse(status, {{"schema_version", 1}, {"error", code}, {"detail", detail}});
}

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    if (next > pos) out.push_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void FailErrno(const std::string& what) { Fail(ErrorKind::kIo, what + ": " + std::strerror(errno)); }

void WriteAll(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      FailErrno("event log write");
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

const HttpPart* FindPart(const HttpRequest& req, const std::string& name) {
  for (const auto& p : req.parts)
    if (p.name == name) return &p;
  return nullptr;
}

int HttpStatusFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kPermission: return 403;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kFormat:
    case ErrorKind::kParameter: return 422;
    default: return 500;
  }
}

json GateJson(const workflow::GateStatus& g) {
  return {{"allowed", g.allowed}, {"reason", g.reason}, {"reviews_done", g.reviews_done},
          {"reviews_required", g.reviews_required}};
}

}  // namespace

std::string TokenDigest(const std::string& token) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(token.data()), token.size(), digest);
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 15]);
  }
  return out;
}

Platform::Platform(PlatformOptions options) : options_(std::move(options)) {
  const fs::path& dir = options_.data_dir;
  fs::create_directories(dir / "media");
  fs::create_directories(dir / "analysis");
  fs::create_directories(dir / "bundles");
  lock_fd_ = ::open((dir / "lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) FailErrno("open lock file");
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    Fail(ErrorKind::kIo, "data directory " + dir.string() + " is in use by another process");
  }

  workflow::PlatformConfig config;
  const fs::path config_path = dir / "config.json";
  if (fs::exists(config_path)) {
    config = workflow::ConfigFromJson(json::parse(ReadFile(config_path)));
  } else {
    config = options_.config.value_or(workflow::DefaultConfig(Now()));
    workflow::ValidateConfig(config);
    WriteFileAtomic(config_path, workflow::ConfigToJson(config).dump(2) + "\n");
  }

  const fs::path log_path = dir / "events.jsonl";
  std::vector<workflow::Event> events;
  if (fs::exists(log_path)) {
    const std::string text = ReadFile(log_path);
    auto decoded = workflow::DecodeEventLog(text);
    if (decoded.truncated_tail) {
      // drop the torn record so the next append starts on a clean line
      std::string clean;
      for (const auto& e : decoded.events) clean += workflow::EncodeEventLine(e);
      WriteFileAtomic(log_path, clean);
    }
    events = std::move(decoded.events);
  }
  workflow_ = std::make_unique<workflow::Workflow>(workflow::Workflow::Replay(config, events));
  log_fd_ = ::open(log_path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (log_fd_ < 0) FailErrno("open event log");
  workflow_->SetSink([this](const workflow::Event& e) { AppendEvent(e); });

  if (options_.models_dir) models_ = moderation::LoadModerationModels(*options_.models_dir);

  for (int i = 0; i < options_.workers && !options_.synchronous_analysis; ++i)
    workers_.emplace_back([this] { WorkerLoop(); });
  if (!workers_.empty() || options_.synchronous_analysis)
    for (const auto& id : workflow_->PendingAnalyses()) Enqueue(id);
}

Platform::~Platform() {
  {
    std::lock_guard lock(queue_mu_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) t.join();
  if (log_fd_ >= 0) ::close(log_fd_);
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

std::int64_t Platform::Now() const {
  if (options_.clock) return options_.clock();
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

void Platform::AppendEvent(const workflow::Event& event) {
  WriteAll(log_fd_, workflow::EncodeEventLine(event));
  if (::fdatasync(log_fd_) != 0) FailErrno("event log sync");
}

void Platform::Enqueue(const std::string& video_id) {
  if (options_.synchronous_analysis) {
    RunAnalysis(video_id);
    return;
  }
  {
    std::lock_guard lock(queue_mu_);
    queue_.push_back({video_id});
  }
  queue_cv_.notify_one();
}

void Platform::WorkerLoop() {
  for (;;) {
    Job job;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      ++running_;
    }
    try {
      RunAnalysis(job.video_id);
    } catch (...) {
      // RunAnalysis records failures itself; this only guards the pool
    }
    {
      std::lock_guard lock(queue_mu_);
      --running_;
    }
    idle_cv_.notify_all();
  }
}

void Platform::WaitIdle() {
  std::unique_lock lock(queue_mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && running_ == 0; });
}

void Platform::RunAnalysis(const std::string& video_id) {
  const fs::path media_dir = options_.data_dir / "media" / video_id;
  bool ok = true;
  std::string detail;
  json doc;
  try {
    SubmissionFiles files;
    files.wav = ReadFile(media_dir / "audio.wav");
    files.frames = ReadTar(ReadFile(media_dir / "frames.tar"));
    files.transcript_json = ReadFile(media_dir / "transcript.json");
    if (fs::exists(media_dir / "smile.txt")) files.smile_sidecar = ReadFile(media_dir / "smile.txt");
    MediaLimits limits;
    {
      std::lock_guard lock(mu_);
      limits = {workflow_->config().max_audio_seconds, workflow_->config().max_frame_rate};
    }
    doc = AnalyzeSubmission(DecodeSubmission(files, limits), options_.analysis);
    WriteFileAtomic(options_.data_dir / "analysis" / (video_id + ".json"), doc.dump() + "\n");
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  std::lock_guard lock(mu_);
  if (ok) analysis_cache_[video_id] = std::move(doc);
  workflow_->CompleteAnalysis(video_id, ok, detail, Now());
}

const json* Platform::AnalysisDoc(const std::string& video_id) {
  auto it = analysis_cache_.find(video_id);
  if (it != analysis_cache_.end()) return &it->second;
  const fs::path path = options_.data_dir / "analysis" / (video_id + ".json");
  if (!fs::exists(path)) return nullptr;
  return &(analysis_cache_[video_id] = json::parse(ReadFile(path)));
}

std::string Platform::AddUser(const std::string& user_id, Condition condition) {
  unsigned char raw[16];
  if (RAND_bytes(raw, sizeof(raw)) != 1) Fail(ErrorKind::kInternal, "token generation failed");
  std::string token = "slk_";
  static const char* kHex = "0123456789abcdef";
  for (unsigned char c : raw) {
    token.push_back(kHex[c >> 4]);
    token.push_back(kHex[c & 15]);
  }
  std::lock_guard lock(mu_);
  workflow_->AddUser(user_id, condition, TokenDigest(token), Now());
  return token;
}

void Platform::ReleasePrompt(int index) {
  std::lock_guard lock(mu_);
  workflow_->ReleasePrompt(index, Now());
}

std::uint64_t Platform::StateHash() const {
  std::lock_guard lock(mu_);
  return workflow_->StateHash();
}

std::size_t Platform::EventCount() const {
  std::lock_guard lock(mu_);
  return workflow_->events().size();
}

std::string Platform::RatingsExportCsv() const {
  std::lock_guard lock(mu_);
  return workflow_->RatingsExportCsv();
}

json Platform::ConfigJson() const {
  std::lock_guard lock(mu_);
  return workflow::ConfigToJson(workflow_->config());
}

json Platform::FeedbackBundle(const std::string& video_id) {
  std::lock_guard lock(mu_);
  return BundleLocked(video_id);
}

json Platform::BundleLocked(const std::string& video_id) {
  const workflow::Video* v = workflow_->FindVideo(video_id);
  if (!v) Fail(ErrorKind::kNotFound, "unknown video " + video_id);
  const workflow::UserRecord* owner = workflow_->FindUser(v->owner);
  BundleInput in;
  in.video_id = v->id;
  in.condition = owner->condition;
  in.prompt_index = v->prompt_index;
  in.title = v->title;
  in.description = v->description;
  for (const auto& q : v->qualities) in.qualities.push_back(*workflow_->config().FindQuality(q));
  in.analysis_status = workflow::AnalysisStatusName(v->analysis);
  in.analysis = v->analysis == workflow::AnalysisStatus::kReady ? AnalysisDoc(v->id) : nullptr;
  in.models = &models_;
  std::map<std::string, const workflow::ReviewRecord*> latest;  // per reviewer
  for (const auto* r : workflow_->ReviewsOf(video_id)) {
    latest[r->reviewer] = r;
    for (const auto& c : r->comments)
      in.comments.push_back({c.id, video_id, r->reviewer, c.text, c.category, c.video_timestamp, r->created_at});
  }
  // ratings in review order so the summary does not depend on reviewer ids
  std::vector<const workflow::ReviewRecord*> kept;
  for (const auto& [reviewer, r] : latest) kept.push_back(r);
  std::sort(kept.begin(), kept.end(), [](auto* a, auto* b) { return a->sequence < b->sequence; });
  for (const auto* r : kept) in.ratings.push_back({r->ratings, r->overall_rating});
  json bundle = BuildFeedbackBundle(in);
  WriteFileAtomic(options_.data_dir / "bundles" / (video_id + ".json"), bundle.dump() + "\n");
  return bundle;
}

HttpResponse Platform::Handle(const HttpRequest& req) {
  try {
    const auto parts = SplitPath(req.path);
    if (req.method == "GET" && parts == std::vector<std::string>{"health"})
      return JsonResponse(200, {{"schema_version", 1}, {"status", "ok"}});

    std::string token;
    auto auth = req.headers.find("authorization");
    if (auth != req.headers.end() && auth->second.rfind("Bearer ", 0) == 0) token = Trim(auth->second.substr(7));
    if (token.empty()) return ErrorResponse(401, "unauthorized", "missing bearer token");
    std::unique_lock lock(mu_);
    const workflow::UserRecord* found = workflow_->FindUserByToken(TokenDigest(token));
    if (!found) return ErrorResponse(401, "unauthorized", "unknown token");
    const workflow::UserRecord user = *found;

    const std::size_t n = parts.size();
    if (n == 1 && parts[0] == "config" && req.method == "GET")
      return JsonResponse(200, workflow::ConfigToJson(workflow_->config()));
    if (n == 1 && parts[0] == "me" && req.method == "GET") return Me(user);
    if (n == 1 && parts[0] == "feed" && req.method == "GET") {
      json items = json::array();
      for (const auto& f : workflow_->Feed(user.id))
        items.push_back({{"video_id", f.video_id},
                         {"owner", f.owner_pseudonym},
                         {"prompt_index", f.prompt_index},
                         {"title", f.title},
                         {"description", f.description},
                         {"qualities", f.qualities},
                         {"uploaded_at", f.uploaded_at}});
      return JsonResponse(200, {{"schema_version", 1}, {"items", items}});
    }
    if (n == 1 && parts[0] == "notifications" && req.method == "GET") {
      json items = json::array();
      for (const auto& note : workflow_->Notifications(user.id))
        items.push_back({{"sequence", note.sequence},
                         {"kind", "review"},
                         {"video_id", note.video_id},
                         {"created_at", note.created_at}});
      return JsonResponse(200, {{"schema_version", 1}, {"items", items}});
    }
    if (n == 1 && parts[0] == "leaderboard" && req.method == "GET") {
      auto board = workflow_->LeaderboardAt(Now());
      json entries = json::array();
      for (std::size_t i = 0; i < board.entries.size(); ++i)
        entries.push_back({{"rank", i + 1},
                           {"user_id", board.entries[i].user_id},
                           {"mean_rating", board.entries[i].mean_rating},
                           {"ratings", board.entries[i].ratings}});
      return JsonResponse(200, {{"schema_version", 1}, {"as_of", board.as_of}, {"entries", entries}});
    }
    if (n == 1 && parts[0] == "videos" && req.method == "POST") {
      lock.unlock();
      return Upload(user, req);
    }
    if (n == 2 && parts[0] == "videos" && req.method == "GET") {
      const workflow::Video* v = workflow_->FindVideo(parts[1]);
      if (!v) return ErrorResponse(404, "not_found", "unknown video");
      return JsonResponse(200, {{"schema_version", 1},
                                {"video_id", v->id},
                                {"prompt_index", v->prompt_index},
                                {"analysis", workflow::AnalysisStatusName(v->analysis)},
                                {"own", v->owner == user.id}});
    }
    if (n == 3 && parts[0] == "videos" && parts[2] == "reviews" && req.method == "POST") {
      lock.unlock();
      return Review(user, parts[1], req);
    }
    if (n == 3 && parts[0] == "videos" && parts[2] == "feedback" && req.method == "GET") {
      const workflow::Video* v = workflow_->FindVideo(parts[1]);
      if (!v) return ErrorResponse(404, "not_found", "unknown video");
      if (v->owner != user.id) return ErrorResponse(403, "forbidden", "feedback is visible to the video owner only");
      return JsonResponse(200, BundleLocked(parts[1]));
    }
    return ErrorResponse(404, "not_found", "no route for " + req.method + " " + req.path);
  } catch (const Error& e) {
    return ErrorResponse(HttpStatusFor(e.kind()), ErrorKindName(e.kind()), e.what());
  } catch (const json::exception& e) {
    return ErrorResponse(422, "invalid_json", e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

HttpResponse Platform::Me(const workflow::UserRecord& user) {
  const auto now = Now();
  json prompts = json::array();
  for (const auto& p : workflow_->config().prompts) {
    json entry = {{"index", p.index},
                  {"text", p.text},
                  {"guideline_video_ref", p.guideline_video_ref ? json(*p.guideline_video_ref) : json(nullptr)},
                  {"release_time", workflow_->EffectiveRelease(p.index)},
                  {"deadline", p.deadline},
                  {"gate", GateJson(workflow_->CanUpload(user.id, p.index, now))}};
    prompts.push_back(entry);
  }
  return JsonResponse(200, {{"schema_version", 1},
                            {"user_id", user.id},
                            {"condition", workflow::ConditionName(user.condition)},
                            {"progress", workflow_->Progress(user.id)},
                            {"current_prompt", workflow_->CurrentPrompt(now)},
                            {"prompts", prompts}});
}

HttpResponse Platform::Upload(const workflow::UserRecord& user, const HttpRequest& req) {
  const std::int64_t now = Now();
  int prompt_index = 0;
  workflow::PlatformConfig config;
  {
    std::lock_guard lock(mu_);
    config = workflow_->config();
    prompt_index = workflow_->CurrentPrompt(now);
  }
  if (const HttpPart* p = FindPart(req, "prompt_index")) {
    try {
      prompt_index = std::stoi(Trim(p->data));
    } catch (const std::exception&) {
      return ErrorResponse(422, "invalid_submission", "prompt_index: not an integer");
    }
  }
  if (prompt_index == 0) return ErrorResponse(403, "gate_closed", "not released");
  if (!config.FindPrompt(prompt_index)) return ErrorResponse(404, "not_found", "unknown prompt");
  {
    std::lock_guard lock(mu_);
    auto gate = workflow_->CanUpload(user.id, prompt_index, now);
    if (!gate.allowed) return JsonResponse(403, {{"schema_version", 1}, {"error", "gate_closed"}, {"reason", gate.reason},
                                                 {"detail", gate.reason}});
  }

  std::vector<std::string> qualities;
  const HttpPart* qpart = FindPart(req, "qualities");
  if (!qpart) return ErrorResponse(422, "invalid_submission", "qualities: expected " + std::to_string(config.qualities_per_video));
  try {
    qualities = json::parse(qpart->data).get<std::vector<std::string>>();
  } catch (const json::exception&) {
    return ErrorResponse(422, "invalid_submission", "qualities: expected a JSON array of names");
  }
  for (const char* required : {"wav", "frames", "transcript"})
    if (!FindPart(req, required)) return ErrorResponse(422, "invalid_submission", std::string(required) + ": missing part");

  SubmissionFiles files;
  files.wav = FindPart(req, "wav")->data;
  const std::string frames_tar = FindPart(req, "frames")->data;
  files.transcript_json = FindPart(req, "transcript")->data;
  if (const HttpPart* smile = FindPart(req, "smile")) files.smile_sidecar = smile->data;
  try {
    files.frames = ReadTar(frames_tar);
    DecodeSubmission(files, {config.max_audio_seconds, config.max_frame_rate});
  } catch (const Error& e) {
    return ErrorResponse(422, "invalid_submission", e.what());
  }

  workflow::UploadRequest up;
  up.user_id = user.id;
  up.prompt_index = prompt_index;
  if (const HttpPart* t = FindPart(req, "title")) up.title = t->data;
  if (const HttpPart* d = FindPart(req, "description")) up.description = d->data;
  up.qualities = qualities;
  workflow::UploadOutcome out;
  {
    std::lock_guard lock(mu_);
    const std::string id = "v" + std::to_string(workflow_->next_sequence());
    const fs::path dir = options_.data_dir / "media" / id;
    fs::create_directories(dir);
    WriteFileAtomic(dir / "audio.wav", files.wav);
    WriteFileAtomic(dir / "frames.tar", frames_tar);
    WriteFileAtomic(dir / "transcript.json", files.transcript_json);
    if (files.smile_sidecar) WriteFileAtomic(dir / "smile.txt", *files.smile_sidecar);
    up.video_id = id;
    try {
      out = workflow_->Upload(up, now);
    } catch (const Error& e) {
      fs::remove_all(dir);
      if (e.kind() != ErrorKind::kInvalidArgument) throw;
      return ErrorResponse(422, "invalid_submission", e.what());
    }
    if (!out.accepted) {
      fs::remove_all(dir);
      return JsonResponse(403, {{"schema_version", 1}, {"error", "gate_closed"}, {"reason", out.reason},
                                {"detail", out.reason}});
    }
  }
  Enqueue(out.video_id);
  std::string status;
  {
    std::lock_guard lock(mu_);
    status = workflow::AnalysisStatusName(workflow_->FindVideo(out.video_id)->analysis);
  }
  return JsonResponse(202, {{"schema_version", 1}, {"video_id", out.video_id}, {"prompt_index", prompt_index},
                            {"analysis", status}});
}

HttpResponse Platform::Review(const workflow::UserRecord& user, const std::string& video_id, const HttpRequest& req) {
  const json body = json::parse(req.body);
  workflow::ReviewRequest r;
  r.reviewer_id = user.id;
  r.video_id = video_id;
  for (const auto& c : body.at("comments")) {
    workflow::CommentInput in;
    in.text = c.at("text").get<std::string>();
    auto cat = moderation::ParseCategory(c.value("category", std::string("speech")));
    if (!cat) return ErrorResponse(422, "review_rejected", "comments: unknown category");
    in.category = *cat;
    if (c.contains("video_timestamp") && !c.at("video_timestamp").is_null())
      in.video_timestamp = c.at("video_timestamp").get<double>();
    r.comments.push_back(std::move(in));
  }
  r.ratings = body.value("ratings", std::map<std::string, int>{});
  if (body.contains("overall_rating") && !body.at("overall_rating").is_null())
    r.overall_rating = body.at("overall_rating").get<int>();

  std::lock_guard lock(mu_);
  auto out = workflow_->SubmitReview(r, Now());
  if (!out.accepted) {
    const int status = out.reason == "own video" ? 403 : 422;
    return JsonResponse(status, {{"schema_version", 1}, {"error", "review_rejected"}, {"reason", out.reason},
                                 {"detail", out.reason}});
  }
  return JsonResponse(201, {{"schema_version", 1},
                            {"review_id", out.review_id},
                            {"progress", workflow_->Progress(user.id)},
                            {"progress_incremented", out.progress_incremented}});
}

}  // namespace speakloop::service
