#include "moderation/training.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::moderation {

namespace {

std::optional<double> ParseOptionalNumber(const std::string& field, const char* what, std::size_t line) {
  std::string t = Trim(field);
  if (t.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    Fail(ErrorKind::kFormat, "training csv line " + std::to_string(line) + ": bad " + what + " '" + t + "'");
  }
}

}  // namespace

std::vector<TrainingRow> ParseTrainingCsv(std::string_view csv) {
  auto rows = ParseCsv(csv);
  if (rows.empty()) Fail(ErrorKind::kFormat, "training csv: empty file");
  const std::vector<std::string> expected{"comment_id", "video_id", "text", "category",
                                          "timestamp", "score", "sentiment"};
  std::vector<std::string> header;
  for (auto& h : rows[0]) header.push_back(Trim(h));
  if (header != expected)
    Fail(ErrorKind::kFormat, "training csv: header must be comment_id,video_id,text,category,timestamp,score,sentiment");
  std::vector<TrainingRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::size_t line = i + 1;
    if (r.size() != expected.size())
      Fail(ErrorKind::kFormat, "training csv line " + std::to_string(line) + ": expected 7 fields");
    TrainingRow row;
    row.comment_id = Trim(r[0]);
    row.video_id = Trim(r[1]);
    row.text = r[2];
    if (Trim(row.text).empty()) Fail(ErrorKind::kFormat, "training csv line " + std::to_string(line) + ": empty text");
    auto cat = ParseCategory(Trim(r[3]));
    if (!cat) Fail(ErrorKind::kFormat, "training csv line " + std::to_string(line) + ": unknown category '" + r[3] + "'");
    row.category = *cat;
    row.timestamp = ParseOptionalNumber(r[4], "timestamp", line);
    row.score = ParseOptionalNumber(r[5], "score", line);
    std::string s = Trim(r[6]);
    if (!s.empty()) {
      row.sentiment = ParseSentiment(ToLower(s));
      if (!row.sentiment) Fail(ErrorKind::kFormat, "training csv line " + std::to_string(line) + ": unknown sentiment '" + s + "'");
    }
    out.push_back(std::move(row));
  }
  return out;
}

SeriesMap EmptySeriesMap() {
  SeriesMap m;
  for (media::Signal s : media::kAllSignals) m[s] = media::BehaviorSeries{s, 0.0, 1.0, {}, true};
  return m;
}

ModerationArtifacts TrainModeration(const std::vector<TrainingRow>& rows, const SeriesLookup& lookup,
                                    std::uint64_t seed) {
  static const SeriesMap kEmpty = EmptySeriesMap();
  ModerationArtifacts out;
  out.seed = seed;

  std::map<Category, std::vector<LabeledFeatures>> by_category;
  std::vector<LabeledText> corpus;
  for (const auto& row : rows) {
    if (row.score) {
      Comment c;
      c.id = row.comment_id;
      c.video_id = row.video_id;
      c.text = row.text;
      c.category = row.category;
      c.video_timestamp = row.timestamp;
      const SeriesMap* series = lookup ? lookup(row.video_id) : nullptr;
      by_category[row.category].push_back({ExtractFeatures(c, series ? *series : kEmpty), *row.score});
    }
    if (row.sentiment) corpus.push_back({row.text, *row.sentiment});
  }
  for (auto& [category, labeled] : by_category) {
    try {
      out.helpfulness.emplace(category, TrainHelpfulness(labeled, category));
    } catch (const Error& e) {
      out.helpfulness_failures.emplace(category, e.what());
    }
  }
  try {
    out.sentiment = TrainSentiment(corpus, seed);
  } catch (const Error& e) {
    out.sentiment_failure = e.what();
  }
  return out;
}

nlohmann::json ModerationArtifacts::Metrics() const {
  nlohmann::json h = nlohmann::json::object();
  for (const auto& [c, m] : helpfulness) {
    h[CategoryName(c)] = {{"examples", m.training_examples},
                          {"r_squared", m.r_squared ? nlohmann::json(*m.r_squared) : nlohmann::json(nullptr)},
                          {"r_squared_kind", "in_sample"},
                          {"ridge_fallback", m.ridge_fallback}};
  }
  for (const auto& [c, err] : helpfulness_failures) h[CategoryName(c)] = {{"error", err}};
  nlohmann::json s;
  if (sentiment) {
    s = {{"held_out_accuracy", sentiment->held_out_accuracy},
         {"train_size", sentiment->train_size},
         {"test_size", sentiment->test_size},
         {"vocabulary_size", sentiment->model.vocabulary.size()}};
  } else {
    s = {{"error", sentiment_failure.value_or("no labeled comments")}};
  }
  return {{"schema_version", 1}, {"kind", "moderation_metrics"}, {"split_seed", seed},
          {"helpfulness", h}, {"sentiment", s}};
}

void WriteModerationArtifacts(const ModerationArtifacts& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [c, m] : a.helpfulness)
    WriteFileAtomic(dir / (std::string("helpfulness_") + CategoryName(c) + ".json"),
                    HelpfulnessModelToJson(m).dump(2) + "\n");
  if (a.sentiment) WriteFileAtomic(dir / "sentiment.json", SentimentModelToJson(*a.sentiment).dump(2) + "\n");
  WriteFileAtomic(dir / "metrics.json", a.Metrics().dump(2) + "\n");
}

ModerationModels LoadModerationModels(const std::filesystem::path& dir) {
  ModerationModels models;
  auto parse = [](const std::filesystem::path& p) {
    auto doc = nlohmann::json::parse(ReadFile(p), nullptr, false);
    if (doc.is_discarded()) Fail(ErrorKind::kFormat, "model: invalid JSON in " + p.string());
    return doc;
  };
  for (Category c : kAllCategories) {
    auto p = dir / (std::string("helpfulness_") + CategoryName(c) + ".json");
    if (std::filesystem::exists(p)) models.helpfulness.emplace(c, HelpfulnessModelFromJson(parse(p)));
  }
  if (auto p = dir / "sentiment.json"; std::filesystem::exists(p)) models.sentiment = SentimentModelFromJson(parse(p));
  return models;
}

}  // namespace speakloop::moderation
