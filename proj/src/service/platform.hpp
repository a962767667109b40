#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "moderation/training.hpp"
#include "service/analysis.hpp"
#include "workflow/state.hpp"

namespace speakloop::service {

struct PlatformOptions {
  std::filesystem::path data_dir;
  // Used only when the data directory has no config.json yet; otherwise
  // the stored config wins.
  std::optional<workflow::PlatformConfig> config;
  std::optional<std::filesystem::path> models_dir;
  // 0 workers with synchronous_analysis off leaves uploads pending (admin
  // commands, replay inspection).
  int workers = 2;
  bool synchronous_analysis = false;
  std::function<std::int64_t()> clock;  // unix seconds; defaults to system time
  AnalysisOptions analysis;
};

struct HttpPart {
  std::string name;
  std::string filename;
  std::string content_type;
  std::string data;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
  std::vector<HttpPart> parts;  // multipart/form-data fields and files
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// The deployable platform: workflow state rebuilt from data_dir/events.jsonl,
// uploaded media under media/<video>/, analysis documents under
// analysis/<video>.json and bundle snapshots under bundles/<video>.json.
// All workflow mutations are serialized under one mutex; analysis runs in a
// bounded worker pool. Holds an exclusive lock on the data directory.
class Platform {
 public:
  explicit Platform(PlatformOptions options);
  ~Platform();
  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  HttpResponse Handle(const HttpRequest& request);

  // Returns the bearer token for the new user. Only its digest is stored.
  std::string AddUser(const std::string& user_id, workflow::Condition condition);
  void ReleasePrompt(int index);

  // Blocks until no analysis job is queued or running.
  void WaitIdle();

  std::uint64_t StateHash() const;
  std::size_t EventCount() const;
  std::string RatingsExportCsv() const;
  nlohmann::json ConfigJson() const;
  // Owner-facing bundle, also written to bundles/<video>.json.
  nlohmann::json FeedbackBundle(const std::string& video_id);

 private:
  struct Job {
    std::string video_id;
  };

  std::int64_t Now() const;
  void AppendEvent(const workflow::Event& event);
  void Enqueue(const std::string& video_id);
  void WorkerLoop();
  void RunAnalysis(const std::string& video_id);
  const nlohmann::json* AnalysisDoc(const std::string& video_id);
  nlohmann::json BundleLocked(const std::string& video_id);

  HttpResponse Upload(const workflow::UserRecord& user, const HttpRequest& request);
  HttpResponse Review(const workflow::UserRecord& user, const std::string& video_id, const HttpRequest& request);
  HttpResponse Me(const workflow::UserRecord& user);

  PlatformOptions options_;
  int lock_fd_ = -1;
  int log_fd_ = -1;
  mutable std::mutex mu_;
  std::unique_ptr<workflow::Workflow> workflow_;
  moderation::ModerationModels models_;
  std::map<std::string, nlohmann::json> analysis_cache_;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<Job> queue_;
  std::size_t running_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

std::string TokenDigest(const std::string& token);

}  // namespace speakloop::service
