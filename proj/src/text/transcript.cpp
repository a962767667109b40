#include "text/transcript.hpp"

#include <cctype>
#include <cmath>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::text {

void ValidateTranscript(const TimedTranscript& transcript) {
  const WordToken* prev = nullptr;
  for (std::size_t i = 0; i < transcript.words.size(); ++i) {
    const auto& w = transcript.words[i];
    const std::string where = "transcript word " + std::to_string(i) + ": ";
    if (!std::isfinite(w.start) || !std::isfinite(w.end) || w.start < 0.0)
      Fail(ErrorKind::kFormat, where + "times must be finite and non-negative");
    if (w.start > w.end) Fail(ErrorKind::kFormat, where + "start after end");
    if (!(w.confidence >= 0.0 && w.confidence <= 1.0))
      Fail(ErrorKind::kFormat, where + "confidence outside [0, 1]");
    if (prev != nullptr && (w.start < prev->start || w.start < prev->end))
      Fail(ErrorKind::kFormat, where + "tokens overlap or are out of order");
    prev = &w;
  }
}

TimedTranscript ParseTranscriptJson(std::string_view json_text) {
  auto doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) Fail(ErrorKind::kFormat, "transcript: invalid JSON");
  TimedTranscript out;
  const nlohmann::json* words = &doc;
  if (doc.is_object()) {
    if (doc.contains("schema_version") &&
        (!doc["schema_version"].is_number_integer() ||
         doc["schema_version"].get<int>() > kTranscriptSchemaVersion))
      Fail(ErrorKind::kVersion, "transcript: unsupported schema_version");
    if (doc.contains("language") && doc["language"].is_string())
      out.language_tag = doc["language"].get<std::string>();
    if (!doc.contains("words")) Fail(ErrorKind::kFormat, "transcript: missing words array");
    words = &doc["words"];
  }
  if (!words->is_array()) Fail(ErrorKind::kFormat, "transcript: words must be an array");
  for (const auto& w : *words) {
    if (!w.is_object() || !w.contains("text") || !w["text"].is_string() || !w.contains("start") ||
        !w["start"].is_number() || !w.contains("end") || !w["end"].is_number())
      Fail(ErrorKind::kFormat, "transcript: each word needs text, start and end");
    WordToken t;
    t.text = w["text"].get<std::string>();
    t.start = w["start"].get<double>();
    t.end = w["end"].get<double>();
    if (w.contains("confidence")) {
      if (!w["confidence"].is_number()) Fail(ErrorKind::kFormat, "transcript: confidence must be numeric");
      t.confidence = w["confidence"].get<double>();
    }
    out.words.push_back(std::move(t));
  }
  ValidateTranscript(out);
  return out;
}

nlohmann::json TranscriptToJson(const TimedTranscript& transcript) {
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : transcript.words) {
    words.push_back({{"text", w.text},
                     {"start", std::round(w.start * 1000.0) / 1000.0},
                     {"end", std::round(w.end * 1000.0) / 1000.0},
                     {"confidence", Round6(w.confidence)}});
  }
  return {{"schema_version", kTranscriptSchemaVersion},
          {"language", transcript.language_tag},
          {"words", std::move(words)}};
}

std::string NormalizeWord(std::string_view word) {
  std::size_t b = 0, e = word.size();
  auto strip = [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x80 && (std::ispunct(u) || std::isspace(u));
  };
  while (b < e && strip(word[b])) ++b;
  while (e > b && strip(word[e - 1])) --e;
  return ToLower(word.substr(b, e - b));
}

}  // namespace speakloop::text
