#include "stats/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/util.hpp"
#include "stats/reliability.hpp"
#include "stats/tests.hpp"

namespace speakloop::stats {

namespace {

constexpr const char* kColumns[] = {"rater_id", "video_id", "user_id", "prompt_index",
                                    "condition", "overall_rating", "timestamp"};

long long ParseInteger(const std::string& field, const char* what, std::size_t line) {
  const std::string t = Trim(field);
  try {
    std::size_t used = 0;
    long long v = std::stoll(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    Fail(ErrorKind::kFormat, "ratings export line " + std::to_string(line) + ": bad " + what + " '" + t + "'");
  }
}

std::vector<double> RatingsOf(const std::vector<RatingRecord>& records, const std::string& video) {
  std::vector<double> out;
  for (const auto& r : records)
    if (r.video_id == video) out.push_back(r.overall_rating);
  return out;
}

nlohmann::json ErrorJson(const Error& e) {
  return {{"error", e.what()}, {"error_kind", ErrorKindName(e.kind())}};
}

}  // namespace

std::string RatingsExportHeader() {
  std::string h;
  for (const char* c : kColumns) h += (h.empty() ? "" : ",") + std::string(c);
  return h;
}

std::vector<RatingRecord> ParseRatingsExport(std::string_view csv) {
  auto rows = ParseCsv(csv);
  if (rows.empty()) Fail(ErrorKind::kFormat, "ratings export: empty file");
  std::vector<std::string> header;
  for (auto& h : rows[0]) header.push_back(Trim(h));
  if (header != std::vector<std::string>(std::begin(kColumns), std::end(kColumns)))
    Fail(ErrorKind::kFormat, "ratings export: header must be " + RatingsExportHeader());
  std::vector<RatingRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::size_t line = i + 1;
    if (r.size() != 7) Fail(ErrorKind::kFormat, "ratings export line " + std::to_string(line) + ": expected 7 fields");
    RatingRecord rec;
    rec.rater_id = Trim(r[0]);
    rec.video_id = Trim(r[1]);
    rec.user_id = Trim(r[2]);
    rec.prompt_index = static_cast<int>(ParseInteger(r[3], "prompt_index", line));
    rec.condition = Trim(r[4]);
    rec.overall_rating = static_cast<int>(ParseInteger(r[5], "overall_rating", line));
    rec.timestamp = ParseInteger(r[6], "timestamp", line);
    if (rec.prompt_index < 1) Fail(ErrorKind::kFormat, "ratings export line " + std::to_string(line) + ": prompt_index < 1");
    if (rec.overall_rating < 1 || rec.overall_rating > 5)
      Fail(ErrorKind::kFormat, "ratings export line " + std::to_string(line) + ": rating outside 1..5");
    if (rec.rater_id.empty() || rec.video_id.empty() || rec.user_id.empty())
      Fail(ErrorKind::kFormat, "ratings export line " + std::to_string(line) + ": empty identifier");
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RatingRecord> LatestPerRaterVideo(const std::vector<RatingRecord>& records,
                                              std::vector<std::string>& warnings) {
  std::map<std::pair<std::string, std::string>, std::size_t> latest;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto key = std::make_pair(records[i].rater_id, records[i].video_id);
    auto [it, fresh] = latest.emplace(key, i);
    if (fresh) continue;
    warnings.push_back("rater " + key.first + " rated video " + key.second + " more than once; keeping the latest");
    if (records[i].timestamp >= records[it->second].timestamp) it->second = i;
  }
  std::vector<std::size_t> keep;
  for (const auto& [k, i] : latest) keep.push_back(i);
  std::sort(keep.begin(), keep.end());
  std::vector<RatingRecord> out;
  for (std::size_t i : keep) out.push_back(records[i]);
  return out;
}

std::map<std::pair<std::string, int>, std::string> FinalVideosFromExport(
    const std::vector<RatingRecord>& records, std::vector<std::string>& warnings) {
  // (user, prompt) -> video -> latest rating timestamp
  std::map<std::pair<std::string, int>, std::map<std::string, std::int64_t>> activity;
  for (const auto& r : records) {
    auto& slot = activity[{r.user_id, r.prompt_index}];
    auto [it, fresh] = slot.emplace(r.video_id, r.timestamp);
    if (!fresh) it->second = std::max(it->second, r.timestamp);
  }
  std::map<std::pair<std::string, int>, std::string> out;
  for (const auto& [key, videos] : activity) {
    auto best = videos.begin();
    for (auto it = videos.begin(); it != videos.end(); ++it)
      if (it->second >= best->second) best = it;
    if (videos.size() > 1)
      warnings.push_back("user " + key.first + " has " + std::to_string(videos.size()) + " videos for prompt " +
                         std::to_string(key.second) + "; using " + best->first + " as final");
    out.emplace(key, best->first);
  }
  return out;
}

std::map<std::string, std::vector<TrajectoryPoint>> Trajectory(const std::vector<RatingRecord>& records,
                                                               std::optional<int> prompt_count,
                                                               std::vector<std::string>& warnings) {
  const auto finals = FinalVideosFromExport(records, warnings);
  std::set<std::string> final_set;
  for (const auto& [k, v] : finals) final_set.insert(v);

  std::map<std::string, std::map<int, std::vector<double>>> grouped;
  std::set<std::string> conditions;
  for (const auto& r : records) {
    conditions.insert(r.condition);
    if (final_set.contains(r.video_id)) grouped[r.condition][r.prompt_index].push_back(r.overall_rating);
  }
  std::map<std::string, std::vector<TrajectoryPoint>> out;
  for (const auto& condition : conditions) {
    auto& points = out[condition];
    const auto& by_prompt = grouped[condition];
    if (prompt_count) {
      for (int p = 1; p <= *prompt_count; ++p)
        if (!by_prompt.contains(p))
          warnings.push_back("condition " + condition + ": prompt " + std::to_string(p) + " has no ratings; omitted");
    }
    for (const auto& [prompt, values] : by_prompt) {
      TrajectoryPoint pt;
      pt.prompt_index = prompt;
      pt.n = values.size();
      pt.mean = Mean(values);
      pt.standard_error = values.size() > 1 ? SampleSd(values) / std::sqrt(static_cast<double>(values.size())) : 0.0;
      points.push_back(pt);
    }
  }
  return out;
}

std::vector<UserDelta> ImprovementDeltas(const std::vector<RatingRecord>& records, int first_prompt,
                                         int last_prompt, std::vector<std::string>& warnings) {
  const auto finals = FinalVideosFromExport(records, warnings);
  std::map<std::string, std::string> condition_of;
  for (const auto& r : records) condition_of.emplace(r.user_id, r.condition);
  std::vector<UserDelta> out;
  for (const auto& [user, condition] : condition_of) {
    auto first = finals.find({user, first_prompt});
    auto last = finals.find({user, last_prompt});
    if (first == finals.end() || last == finals.end()) {
      warnings.push_back("user " + user + ": missing rated final video for prompt " +
                         std::to_string(first == finals.end() ? first_prompt : last_prompt) + "; omitted from deltas");
      continue;
    }
    UserDelta d;
    d.user_id = user;
    d.condition = condition;
    d.initial = Mean(RatingsOf(records, first->second));
    d.final = Mean(RatingsOf(records, last->second));
    d.delta = d.final - d.initial;
    out.push_back(d);
  }
  return out;
}

DeltaSummary SummarizeDeltas(const std::vector<UserDelta>& deltas) {
  DeltaSummary s;
  std::vector<double> values;
  for (const auto& d : deltas) {
    values.push_back(d.delta);
    if (std::abs(d.delta) < 1e-12)
      ++s.same;
    else if (d.delta < 0)
      ++s.regressed;
    else
      ++s.improved;
  }
  s.mean = Mean(values);
  return s;
}

nlohmann::json BuildStatsReport(const std::vector<RatingRecord>& raw, std::optional<int> prompt_count) {
  std::vector<std::string> warnings;
  const auto records = LatestPerRaterVideo(raw, warnings);
  int last_prompt = prompt_count.value_or(0);
  if (!prompt_count)
    for (const auto& r : records) last_prompt = std::max(last_prompt, r.prompt_index);

  const auto trajectories = Trajectory(records, prompt_count, warnings);
  const auto deltas = ImprovementDeltas(records, 1, last_prompt, warnings);

  nlohmann::json conditions = nlohmann::json::object();
  std::map<std::string, std::vector<double>> delta_groups;
  for (const auto& [condition, points] : trajectories) {
    nlohmann::json c;
    std::vector<std::string> raters, videos;
    std::set<std::string> rater_set, video_set;
    for (const auto& r : records) {
      if (r.condition != condition) continue;
      if (rater_set.insert(r.rater_id).second) raters.push_back(r.rater_id);
      if (video_set.insert(r.video_id).second) videos.push_back(r.video_id);
    }
    SparseRatingMatrix matrix(raters, videos);
    for (const auto& r : records) {
      if (r.condition != condition) continue;
      auto ri = std::find(raters.begin(), raters.end(), r.rater_id) - raters.begin();
      auto vi = std::find(videos.begin(), videos.end(), r.video_id) - videos.begin();
      matrix.Set(static_cast<std::size_t>(ri), static_cast<std::size_t>(vi), r.overall_rating);
    }
    c["raters"] = raters.size();
    c["videos"] = videos.size();
    try {
      c["krippendorff_alpha_ordinal"] = KrippendorffAlphaOrdinal(matrix);
    } catch (const Error& e) {
      c["krippendorff_alpha_ordinal"] = nullptr;
      c["krippendorff_alpha_error"] = e.what();
    }
    nlohmann::json traj = nlohmann::json::array();
    for (const auto& p : points)
      traj.push_back({{"prompt_index", p.prompt_index}, {"mean", p.mean}, {"standard_error", p.standard_error}, {"n", p.n}});
    c["trajectory"] = traj;

    nlohmann::json users = nlohmann::json::array();
    std::vector<UserDelta> mine;
    std::vector<PairedSample> pairs;
    for (const auto& d : deltas) {
      if (d.condition != condition) continue;
      mine.push_back(d);
      pairs.push_back({d.initial, d.final});
      delta_groups[condition].push_back(d.delta);
      users.push_back({{"user_id", d.user_id}, {"initial", d.initial}, {"final", d.final}, {"delta", d.delta}});
    }
    const auto summary = SummarizeDeltas(mine);
    c["improvement"] = {{"first_prompt", 1},
                        {"last_prompt", last_prompt},
                        {"users", users},
                        {"mean_delta", summary.mean},
                        {"regressed", summary.regressed},
                        {"same", summary.same},
                        {"improved", summary.improved}};
    try {
      auto t = PairedTTest(pairs);
      c["paired_t_test"] = {{"t", t.t}, {"df", t.df}, {"p_two_tailed", t.p_two_tailed}, {"n", t.n},
                            {"mean_difference", t.mean_difference}};
    } catch (const Error& e) {
      c["paired_t_test"] = ErrorJson(e);
    }
    conditions[condition] = c;
  }

  nlohmann::json between = nullptr;
  if (delta_groups.contains("treatment") && delta_groups.contains("control")) {
    const auto& a = delta_groups["treatment"];
    const auto& b = delta_groups["control"];
    between = {{"groups", "treatment deltas vs control deltas"}};
    try {
      between["cohens_d"] = CohensD(a, b);
    } catch (const Error& e) {
      between["cohens_d"] = ErrorJson(e);
    }
    try {
      between["cliffs_delta"] = CliffsDelta(a, b);
    } catch (const Error& e) {
      between["cliffs_delta"] = ErrorJson(e);
    }
  }
  std::vector<std::string> unique;
  for (auto& w : warnings)
    if (std::find(unique.begin(), unique.end(), w) == unique.end()) unique.push_back(std::move(w));
  return {{"schema_version", 1},
          {"kind", "stats_report"},
          {"ratings", records.size()},
          {"conditions", conditions},
          {"between_conditions", between},
          {"warnings", unique}};
}

std::string RenderStatsReportText(const nlohmann::json& report) {
  std::ostringstream out;
  char buf[256];
  auto num = [](const nlohmann::json& v) -> std::string {
    if (!v.is_number()) return "n/a";
    char b[64];
    std::snprintf(b, sizeof(b), "%.4g", v.get<double>());
    return b;
  };
  out << "ratings: " << report.value("ratings", 0) << "\n";
  for (const auto& [name, c] : report.at("conditions").items()) {
    out << "\n[" << name << "] raters=" << c.at("raters") << " videos=" << c.at("videos")
        << " alpha(ordinal)=" << num(c.at("krippendorff_alpha_ordinal")) << "\n";
    out << "  prompt      mean        se     n\n";
    for (const auto& p : c.at("trajectory")) {
      std::snprintf(buf, sizeof(buf), "  %6d  %8.3f  %8.3f  %4zu\n", p.at("prompt_index").get<int>(),
                    p.at("mean").get<double>(), p.at("standard_error").get<double>(), p.at("n").get<std::size_t>());
      out << buf;
    }
    const auto& imp = c.at("improvement");
    out << "  deltas: mean=" << num(imp.at("mean_delta")) << " regressed=" << imp.at("regressed")
        << " same=" << imp.at("same") << " improved=" << imp.at("improved") << "\n";
    const auto& t = c.at("paired_t_test");
    if (t.contains("t"))
      out << "  paired t: t=" << num(t.at("t")) << " df=" << num(t.at("df")) << " p=" << num(t.at("p_two_tailed")) << "\n";
    else
      out << "  paired t: " << t.at("error").get<std::string>() << "\n";
  }
  const auto& b = report.at("between_conditions");
  if (!b.is_null())
    out << "\ntreatment vs control deltas: cohen's d=" << num(b.at("cohens_d"))
        << " cliff's delta=" << num(b.at("cliffs_delta")) << "\n";
  const auto& w = report.at("warnings");
  if (!w.empty()) {
    out << "\nwarnings:\n";
    for (const auto& msg : w) out << "  - " << msg.get<std::string>() << "\n";
  }
  return out.str();
}

}  // namespace speakloop::stats
