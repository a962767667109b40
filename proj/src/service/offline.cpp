#include "service/offline.hpp"

#include "common/error.hpp"
#include "common/util.hpp"
#include "moderation/training.hpp"
#include "service/bundle.hpp"
#include "service/tar.hpp"
#include "workflow/config.hpp"

namespace speakloop::service {

namespace fs = std::filesystem;
using nlohmann::json;

std::map<std::string, std::string> ReadFrameFiles(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file()) files[entry.path().filename().string()] = ReadFile(entry.path());
    return files;
  }
  return ReadTar(ReadFile(path));
}

json AnalyzeOffline(const OfflineAnalysisInput& in) {
  SubmissionFiles files;
  files.wav = ReadFile(in.wav);
  files.frames = ReadFrameFiles(in.frames);
  files.transcript_json = ReadFile(in.transcript);
  if (in.smile) files.smile_sidecar = ReadFile(*in.smile);
  const json analysis = AnalyzeSubmission(DecodeSubmission(files, in.limits));

  moderation::ModerationModels models;
  if (in.models_dir) models = moderation::LoadModerationModels(*in.models_dir);

  BundleInput b;
  b.video_id = "local";
  b.analysis = &analysis;
  b.models = &models;
  if (in.feedback) {
    const json doc = json::parse(ReadFile(*in.feedback));
    try {
      b.video_id = doc.value("video_id", b.video_id);
      auto condition = workflow::ParseCondition(doc.value("condition", std::string("treatment")));
      if (!condition) Fail(ErrorKind::kFormat, "feedback: condition must be treatment or control");
      b.condition = *condition;
      b.prompt_index = doc.value("prompt_index", 1);
      b.title = doc.value("title", std::string());
      b.description = doc.value("description", std::string());
      const auto known = workflow::DefaultQualities();
      for (const auto& name : doc.value("qualities", std::vector<std::string>{})) {
        auto it = std::find_if(known.begin(), known.end(), [&](const auto& q) { return q.name == name; });
        if (it == known.end()) Fail(ErrorKind::kFormat, "feedback: unknown quality '" + name + "'");
        b.qualities.push_back(*it);
      }
      for (const auto& c : doc.value("comments", json::array())) {
        moderation::Comment comment;
        comment.id = c.at("id").get<std::string>();
        comment.video_id = b.video_id;
        comment.text = c.at("text").get<std::string>();
        auto cat = moderation::ParseCategory(c.value("category", std::string("speech")));
        if (!cat) Fail(ErrorKind::kFormat, "feedback: unknown category for comment " + comment.id);
        comment.category = *cat;
        if (c.contains("video_timestamp") && !c.at("video_timestamp").is_null())
          comment.video_timestamp = c.at("video_timestamp").get<double>();
        comment.created_at = c.value("created_at", std::int64_t{0});
        b.comments.push_back(std::move(comment));
      }
      for (const auto& r : doc.value("ratings", json::array())) {
        RatingSet set;
        set.ratings = r.at("ratings").get<std::map<std::string, int>>();
        set.overall_rating = r.at("overall_rating").get<int>();
        for (const auto& [q, stars] : set.ratings)
          if (stars < 1 || stars > 5) Fail(ErrorKind::kFormat, "feedback: rating for '" + q + "' outside 1..5");
        if (set.overall_rating < 1 || set.overall_rating > 5) Fail(ErrorKind::kFormat, "feedback: overall_rating outside 1..5");
        b.ratings.push_back(std::move(set));
      }
    } catch (const json::exception& e) {
      Fail(ErrorKind::kFormat, std::string("feedback: ") + e.what());
    }
  }
  return BuildFeedbackBundle(b);
}

json TrainModerationOffline(const fs::path& training_csv, const std::optional<fs::path>& series_dir,
                            std::uint64_t seed, const fs::path& out_dir) {
  const auto rows = moderation::ParseTrainingCsv(ReadFile(training_csv));
  std::map<std::string, std::optional<moderation::SeriesMap>> cache;
  moderation::SeriesLookup lookup = [&](const std::string& video_id) -> const moderation::SeriesMap* {
    if (!series_dir) return nullptr;
    auto [it, fresh] = cache.try_emplace(video_id);
    if (fresh) {
      const fs::path path = *series_dir / (video_id + ".json");
      if (fs::exists(path)) {
        const json doc = json::parse(ReadFile(path));
        if (doc.contains("series") && doc.at("series").is_object()) it->second = SeriesFromAnalysis(doc);
      }
    }
    return it->second ? &*it->second : nullptr;
  };
  const auto artifacts = moderation::TrainModeration(rows, lookup, seed);
  moderation::WriteModerationArtifacts(artifacts, out_dir);
  return artifacts.Metrics();
}

}  // namespace speakloop::service
