#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace speakloop::text {

struct WordToken {
  std::string text;
  double start = 0.0;
  double end = 0.0;
  double confidence = 1.0;
};

struct TimedTranscript {
  std::vector<WordToken> words;
  std::string language_tag = "en";
};

inline constexpr int kTranscriptSchemaVersion = 1;

// Throws kFormat unless start <= end, confidence is in [0, 1] and tokens
// are ordered by start without overlap.
void ValidateTranscript(const TimedTranscript& transcript);

// Accepts either a bare array of {text, start, end, confidence} or an
// object {schema_version, language, words: [...]}.
TimedTranscript ParseTranscriptJson(std::string_view json_text);
nlohmann::json TranscriptToJson(const TimedTranscript& transcript);

// Lowercase, strip leading/trailing punctuation, keep internal apostrophes.
std::string NormalizeWord(std::string_view word);

}  // namespace speakloop::text
