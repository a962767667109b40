#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "speakloop/speakloop.h"

namespace {

using nlohmann::json;

int ExitCode(sl_status status) { return status == SL_INTERNAL ? 2 : 1; }

int ReportError(const std::string& error, const std::string& detail, int code) {
  std::cerr << json{{"schema_version", 1}, {"error", error}, {"detail", detail}}.dump() << "\n";
  return code;
}

int ReportStatus(sl_status status) { return ReportError(sl_status_name(status), sl_last_error(), ExitCode(status)); }

// Takes ownership of a C-API string.
std::string Take(char* s) {
  std::string out = s ? s : "";
  sl_string_free(s);
  return out;
}

bool ReadAll(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  out.assign(std::istreambuf_iterator<char>(in), {});
  return true;
}

bool WriteAll(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out.flush());
}

const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct PlatformHandle {
  sl_platform* p = nullptr;
  ~PlatformHandle() { sl_platform_close(p); }
};

sl_status OpenAdmin(const std::string& data_dir, const std::string& config, PlatformHandle& h) {
  sl_platform_options o{};
  o.data_dir = data_dir.c_str();
  o.config_path = OrNull(config);
  o.workers = 0;
  return sl_platform_open(&o, &h.p);
}

struct ServeArgs {
  std::string data_dir, config, models, host = "127.0.0.1";
  int port = 8080;
  int workers = 2;
  bool sync = false;
};

int Serve(const ServeArgs& a) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  PlatformHandle h;
  sl_platform_options o{};
  o.data_dir = a.data_dir.c_str();
  o.config_path = OrNull(a.config);
  o.models_dir = OrNull(a.models);
  o.workers = a.workers;
  o.synchronous_analysis = a.sync ? 1 : 0;
  if (sl_status s = sl_platform_open(&o, &h.p); s != SL_OK) return ReportStatus(s);

  httplib::Server server;
  auto dispatch = [&](const httplib::Request& req, httplib::Response& res) {
    std::vector<sl_http_header> headers;
    for (const auto& [k, v] : req.headers) headers.push_back({k.c_str(), v.c_str()});
    std::vector<sl_http_part> parts;
    for (const auto& [name, f] : req.files)
      parts.push_back({f.name.c_str(), f.filename.c_str(), f.content_type.c_str(), f.content.data(), f.content.size()});
    sl_http_request r{};
    r.method = req.method.c_str();
    r.path = req.path.c_str();
    r.headers = headers.data();
    r.header_count = headers.size();
    if (!req.is_multipart_form_data()) {
      r.body = req.body.data();
      r.body_size = req.body.size();
    }
    r.parts = parts.data();
    r.part_count = parts.size();
    sl_http_response out{};
    if (sl_status s = sl_platform_handle(h.p, &r, &out); s != SL_OK) {
      res.status = 500;
      res.set_content(json{{"schema_version", 1}, {"error", "internal"}, {"detail", sl_last_error()}}.dump(),
                      "application/json");
      return;
    }
    res.status = out.status;
    res.set_content(std::string(out.body, out.body_size), out.content_type);
    sl_http_response_free(&out);
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  server.set_payload_max_length(512ull << 20);

  if (!server.bind_to_port(a.host, a.port))
    return ReportError("io", "cannot bind " + a.host + ":" + std::to_string(a.port), 1);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  std::cerr << json{{"event", "listening"}, {"host", a.host}, {"port", a.port}}.dump() << "\n";
  server.listen_after_bind();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  sl_platform_wait_idle(h.p);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speakloop: peer review platform with automated speaking feedback"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--data-dir", serve.data_dir, "Platform data directory")->required();
  serve_cmd->add_option("--config", serve.config, "Config JSON for a fresh data directory");
  serve_cmd->add_option("--models", serve.models, "Moderation model directory");
  serve_cmd->add_option("--host", serve.host);
  serve_cmd->add_option("--port", serve.port);
  serve_cmd->add_option("--workers", serve.workers, "Analysis worker threads")->check(CLI::Range(0, 64));
  serve_cmd->add_flag("--sync", serve.sync, "Analyse inside the upload request");

  std::string wav, frames, transcript, smile, feedback, models, out, series_out;
  double max_audio = 0, max_fps = 0;
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyse local files and write a FeedbackBundle");
  analyze_cmd->add_option("--wav", wav)->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--frames", frames, "Frame directory or tar archive")->required()->check(CLI::ExistingPath);
  analyze_cmd->add_option("--transcript", transcript)->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--smile", smile, "Smile sidecar")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--feedback", feedback, "Comments and ratings JSON")->check(CLI::ExistingFile);
  analyze_cmd->add_option("--models", models)->check(CLI::ExistingDirectory);
  analyze_cmd->add_option("--max-audio-seconds", max_audio);
  analyze_cmd->add_option("--max-frame-rate", max_fps);
  analyze_cmd->add_option("--out", out, "Output path, stdout if omitted");

  std::string data, series;
  std::uint64_t seed = 7;
  auto* train_cmd = app.add_subcommand("train-moderation", "Train helpfulness and sentiment models");
  train_cmd->add_option("--data", data, "Training CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--series", series, "Directory of <video_id>.json series documents")
      ->check(CLI::ExistingDirectory);
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--out", out, "Model output directory")->required();

  std::string export_path, report;
  int prompts = 0;
  bool text = false;
  auto* stats_cmd = app.add_subcommand("stats", "Reliability and learning-gain report from a ratings export");
  stats_cmd->add_option("--export", export_path)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--report", report, "JSON report path, stdout if omitted");
  stats_cmd->add_option("--prompts", prompts, "Prompt count (default: range in the export)");
  stats_cmd->add_flag("--text", text, "Print the text table to stdout");

  std::string data_dir, config;
  int index = 0;
  auto* release_cmd = app.add_subcommand("release-prompt", "Release a prompt now");
  release_cmd->add_option("--data-dir", data_dir)->required();
  release_cmd->add_option("--config", config);
  release_cmd->add_option("--index", index)->required();

  std::string user_id, condition;
  auto* user_cmd = app.add_subcommand("add-user", "Create a participant and print its bearer token");
  user_cmd->add_option("--data-dir", data_dir)->required();
  user_cmd->add_option("--config", config);
  user_cmd->add_option("--id", user_id)->required();
  user_cmd->add_option("--condition", condition)->required()->check(CLI::IsMember({"treatment", "control"}));

  auto* export_cmd = app.add_subcommand("export-ratings", "Write the ratings export CSV");
  export_cmd->add_option("--data-dir", data_dir)->required();
  export_cmd->add_option("--out", out, "Output path, stdout if omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", e.what(), 1);
  }

  auto emit = [&](const std::string& body) {
    if (out.empty()) {
      std::cout << body;
      if (!body.empty() && body.back() != '\n') std::cout << "\n";
      return 0;
    }
    return WriteAll(out, body) ? 0 : ReportError("io", "cannot write " + out, 1);
  };

  if (*serve_cmd) return Serve(serve);

  if (*analyze_cmd) {
    sl_analyze_options o{};
    o.wav_path = wav.c_str();
    o.frames_path = frames.c_str();
    o.transcript_path = transcript.c_str();
    o.smile_path = OrNull(smile);
    o.feedback_path = OrNull(feedback);
    o.models_dir = OrNull(models);
    o.max_audio_seconds = max_audio;
    o.max_frame_rate = max_fps;
    char* bundle = nullptr;
    if (sl_status s = sl_analyze(&o, &bundle); s != SL_OK) return ReportStatus(s);
    return emit(Take(bundle) + "\n");
  }

  if (*train_cmd) {
    char* metrics = nullptr;
    if (sl_status s = sl_train_moderation(data.c_str(), OrNull(series), seed, out.c_str(), &metrics); s != SL_OK)
      return ReportStatus(s);
    std::cout << Take(metrics) << "\n";
    return 0;
  }

  if (*stats_cmd) {
    std::string csv;
    if (!ReadAll(export_path, csv)) return ReportError("io", "cannot read " + export_path, 1);
    char* report_json = nullptr;
    char* report_text = nullptr;
    if (sl_status s = sl_stats_report(csv.data(), csv.size(), prompts, &report_json, &report_text); s != SL_OK)
      return ReportStatus(s);
    const std::string doc = Take(report_json) + "\n";
    const std::string table = Take(report_text);
    if (report.empty()) {
      std::cout << (text ? table : doc);
      return 0;
    }
    if (!WriteAll(report, doc)) return ReportError("io", "cannot write " + report, 1);
    if (text) std::cout << table;
    return 0;
  }

  PlatformHandle h;
  if (sl_status s = OpenAdmin(data_dir, config, h); s != SL_OK) return ReportStatus(s);

  if (*release_cmd) {
    if (sl_status s = sl_platform_release_prompt(h.p, index); s != SL_OK) return ReportStatus(s);
    std::cout << json{{"released", index}}.dump() << "\n";
    return 0;
  }
  if (*user_cmd) {
    char* token = nullptr;
    if (sl_status s = sl_platform_add_user(h.p, user_id.c_str(), condition.c_str(), &token); s != SL_OK)
      return ReportStatus(s);
    std::cout << json{{"user_id", user_id}, {"condition", condition}, {"token", Take(token)}}.dump() << "\n";
    return 0;
  }
  char* csv = nullptr;
  if (sl_status s = sl_platform_export_ratings(h.p, &csv); s != SL_OK) return ReportStatus(s);
  return emit(Take(csv));
}
