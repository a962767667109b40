#include "speakloop/speakloop.h"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/util.hpp"
#include "service/offline.hpp"
#include "service/platform.hpp"
#include "stats/export.hpp"
#include "stats/reliability.hpp"
#include "stats/tests.hpp"
#include "workflow/config.hpp"

struct sl_platform {
  std::unique_ptr<speakloop::service::Platform> impl;
};

namespace {

using speakloop::ErrorKind;

thread_local std::string g_last_error;

sl_status StatusOf(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return SL_INVALID_ARGUMENT;
    case ErrorKind::kEmptySeries: return SL_EMPTY_SERIES;
    case ErrorKind::kFormat: return SL_FORMAT;
    case ErrorKind::kParameter: return SL_PARAMETER;
    case ErrorKind::kNotFound: return SL_NOT_FOUND;
    case ErrorKind::kTraining: return SL_TRAINING;
    case ErrorKind::kVersion: return SL_VERSION;
    case ErrorKind::kDegenerate: return SL_DEGENERATE;
    case ErrorKind::kUndefinedStatistic: return SL_UNDEFINED_STATISTIC;
    case ErrorKind::kIo: return SL_IO;
    case ErrorKind::kPermission: return SL_PERMISSION;
    case ErrorKind::kInternal: return SL_INTERNAL;
  }
  return SL_INTERNAL;
}

template <typename F>
sl_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SL_OK;
  } catch (const speakloop::Error& e) {
    g_last_error = e.what();
    return StatusOf(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return SL_FORMAT;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return SL_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SL_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SL_INTERNAL;
  }
}

void Require(bool ok, const char* what) {
  if (!ok) speakloop::Fail(ErrorKind::kInvalidArgument, what);
}

char* CopyOut(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void Emit(char** out, const std::string& s) {
  if (out) *out = CopyOut(s);
}

speakloop::service::HttpRequest ToRequest(const sl_http_request& r) {
  speakloop::service::HttpRequest req;
  req.method = r.method;
  std::string path = r.path;
  if (auto q = path.find('?'); q != std::string::npos) {
    std::string query = path.substr(q + 1);
    path.resize(q);
    std::size_t start = 0;
    while (start <= query.size()) {
      std::size_t end = query.find('&', start);
      if (end == std::string::npos) end = query.size();
      std::string pair = query.substr(start, end - start);
      if (!pair.empty()) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) req.query[pair] = "";
        else req.query[pair.substr(0, eq)] = pair.substr(eq + 1);
      }
      start = end + 1;
    }
  }
  req.path = path;
  for (std::size_t i = 0; i < r.header_count; ++i) {
    std::string name = r.headers[i].name ? r.headers[i].name : "";
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    req.headers[name] = r.headers[i].value ? r.headers[i].value : "";
  }
  if (r.body) req.body.assign(r.body, r.body_size);
  for (std::size_t i = 0; i < r.part_count; ++i) {
    const sl_http_part& p = r.parts[i];
    Require(p.name != nullptr, "part name is NULL");
    speakloop::service::HttpPart part;
    part.name = p.name;
    if (p.filename) part.filename = p.filename;
    if (p.content_type) part.content_type = p.content_type;
    if (p.data) part.data.assign(p.data, p.size);
    req.parts.push_back(std::move(part));
  }
  return req;
}

}  // namespace

extern "C" {

const char* sl_version(void) { return "1.0.0"; }

const char* sl_status_name(sl_status status) {
  switch (status) {
    case SL_OK: return "ok";
    case SL_INVALID_ARGUMENT: return "invalid_argument";
    case SL_EMPTY_SERIES: return "empty_series";
    case SL_FORMAT: return "format";
    case SL_PARAMETER: return "parameter";
    case SL_NOT_FOUND: return "not_found";
    case SL_TRAINING: return "training";
    case SL_VERSION: return "version";
    case SL_DEGENERATE: return "degenerate";
    case SL_UNDEFINED_STATISTIC: return "undefined_statistic";
    case SL_IO: return "io";
    case SL_PERMISSION: return "permission";
    case SL_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sl_last_error(void) { return g_last_error.c_str(); }

void sl_string_free(char* s) { std::free(s); }

sl_status sl_analyze(const sl_analyze_options* options, char** bundle_json) {
  return Guard([&] {
    Require(options && bundle_json, "options and bundle_json are required");
    Require(options->wav_path && options->frames_path && options->transcript_path,
            "wav_path, frames_path and transcript_path are required");
    speakloop::service::OfflineAnalysisInput in;
    in.wav = options->wav_path;
    in.frames = options->frames_path;
    in.transcript = options->transcript_path;
    if (options->smile_path) in.smile = options->smile_path;
    if (options->feedback_path) in.feedback = options->feedback_path;
    if (options->models_dir) in.models_dir = options->models_dir;
    if (options->max_audio_seconds > 0) in.limits.max_audio_seconds = options->max_audio_seconds;
    if (options->max_frame_rate > 0) in.limits.max_frame_rate = options->max_frame_rate;
    *bundle_json = CopyOut(speakloop::service::AnalyzeOffline(in).dump(2));
  });
}

sl_status sl_train_moderation(const char* training_csv_path, const char* series_dir, uint64_t seed,
                              const char* out_dir, char** metrics_json) {
  return Guard([&] {
    Require(training_csv_path && out_dir, "training_csv_path and out_dir are required");
    std::optional<std::filesystem::path> series;
    if (series_dir) series = series_dir;
    const auto metrics = speakloop::service::TrainModerationOffline(training_csv_path, series, seed, out_dir);
    Emit(metrics_json, metrics.dump(2));
  });
}

sl_status sl_stats_report(const char* export_csv, size_t export_size, int prompt_count, char** report_json,
                          char** report_text) {
  return Guard([&] {
    Require(export_csv != nullptr, "export_csv is NULL");
    const auto records = speakloop::stats::ParseRatingsExport(std::string_view(export_csv, export_size));
    std::optional<int> prompts;
    if (prompt_count > 0) prompts = prompt_count;
    const auto report = speakloop::stats::BuildStatsReport(records, prompts);
    Emit(report_json, report.dump(2));
    Emit(report_text, speakloop::stats::RenderStatsReportText(report));
  });
}

sl_status sl_krippendorff_alpha_ordinal(const int* cells, size_t raters, size_t items, int scale_min,
                                        int scale_max, double* alpha) {
  return Guard([&] {
    Require(alpha && (cells || raters * items == 0), "cells and alpha are required");
    std::vector<std::string> r(raters), it(items);
    for (std::size_t i = 0; i < raters; ++i) r[i] = std::to_string(i);
    for (std::size_t j = 0; j < items; ++j) it[j] = std::to_string(j);
    speakloop::stats::SparseRatingMatrix m(r, it, scale_min, scale_max);
    for (std::size_t i = 0; i < raters; ++i)
      for (std::size_t j = 0; j < items; ++j)
        if (int v = cells[i * items + j]; v != 0) m.Set(i, j, v);
    *alpha = speakloop::stats::KrippendorffAlphaOrdinal(m);
  });
}

sl_status sl_paired_t_test(const double* pre, const double* post, size_t n, sl_t_test* result) {
  return Guard([&] {
    Require(result && ((pre && post) || n == 0), "pre, post and result are required");
    std::vector<speakloop::stats::PairedSample> samples(n);
    for (std::size_t i = 0; i < n; ++i) samples[i] = {pre[i], post[i]};
    const auto t = speakloop::stats::PairedTTest(samples);
    *result = {t.t, t.df, t.p_two_tailed, t.mean_difference, t.n};
  });
}

sl_status sl_cohens_d(const double* a, size_t na, const double* b, size_t nb, double* d) {
  return Guard([&] {
    Require(d && (a || na == 0) && (b || nb == 0), "a, b and d are required");
    *d = speakloop::stats::CohensD({a, na}, {b, nb});
  });
}

sl_status sl_cliffs_delta(const double* a, size_t na, const double* b, size_t nb, double* delta) {
  return Guard([&] {
    Require(delta && (a || na == 0) && (b || nb == 0), "a, b and delta are required");
    *delta = speakloop::stats::CliffsDelta({a, na}, {b, nb});
  });
}

sl_status sl_platform_open(const sl_platform_options* options, sl_platform** platform) {
  return Guard([&] {
    Require(options && options->data_dir && platform, "options, data_dir and platform are required");
    Require(options->workers >= 0, "workers must be >= 0");
    speakloop::service::PlatformOptions po;
    po.data_dir = options->data_dir;
    if (options->config_path)
      po.config = speakloop::workflow::ConfigFromJson(
          nlohmann::json::parse(speakloop::ReadFile(options->config_path)));
    if (options->models_dir) po.models_dir = options->models_dir;
    po.workers = options->workers;
    po.synchronous_analysis = options->synchronous_analysis != 0;
    auto handle = std::make_unique<sl_platform>();
    handle->impl = std::make_unique<speakloop::service::Platform>(std::move(po));
    *platform = handle.release();
  });
}

void sl_platform_close(sl_platform* platform) { delete platform; }

sl_status sl_platform_handle(sl_platform* platform, const sl_http_request* request, sl_http_response* response) {
  return Guard([&] {
    Require(platform && request && response && request->method && request->path,
            "platform, request (method, path) and response are required");
    const auto res = platform->impl->Handle(ToRequest(*request));
    char* type = CopyOut(res.content_type);
    char* body = nullptr;
    try {
      body = CopyOut(res.body);
    } catch (...) {
      std::free(type);
      throw;
    }
    *response = {res.status, type, body, res.body.size()};
  });
}

void sl_http_response_free(sl_http_response* response) {
  if (!response) return;
  std::free(response->content_type);
  std::free(response->body);
  response->content_type = nullptr;
  response->body = nullptr;
  response->body_size = 0;
}

sl_status sl_platform_add_user(sl_platform* platform, const char* user_id, const char* condition, char** token) {
  return Guard([&] {
    Require(platform && user_id && condition && token, "platform, user_id, condition and token are required");
    auto c = speakloop::workflow::ParseCondition(condition);
    Require(c.has_value(), "condition must be treatment or control");
    *token = CopyOut(platform->impl->AddUser(user_id, *c));
  });
}

sl_status sl_platform_release_prompt(sl_platform* platform, int index) {
  return Guard([&] {
    Require(platform != nullptr, "platform is NULL");
    platform->impl->ReleasePrompt(index);
  });
}

sl_status sl_platform_wait_idle(sl_platform* platform) {
  return Guard([&] {
    Require(platform != nullptr, "platform is NULL");
    platform->impl->WaitIdle();
  });
}

sl_status sl_platform_state_hash(sl_platform* platform, uint64_t* hash) {
  return Guard([&] {
    Require(platform && hash, "platform and hash are required");
    *hash = platform->impl->StateHash();
  });
}

sl_status sl_platform_export_ratings(sl_platform* platform, char** csv) {
  return Guard([&] {
    Require(platform && csv, "platform and csv are required");
    *csv = CopyOut(platform->impl->RatingsExportCsv());
  });
}

sl_status sl_platform_config(sl_platform* platform, char** config_json) {
  return Guard([&] {
    Require(platform && config_json, "platform and config_json are required");
    *config_json = CopyOut(platform->impl->ConfigJson().dump(2));
  });
}

}  // extern "C"
