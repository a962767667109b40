#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace speakloop::workflow {

// Review events carry their ratings and raise the owner notification when
// applied, so review, rating and notification land atomically.
enum class EventKind { kUser, kUpload, kAnalysis, kReview, kPromptRelease };
const char* EventKindName(EventKind kind);
std::optional<EventKind> ParseEventKind(std::string_view name);

struct Event {
  std::uint64_t sequence = 0;
  std::int64_t timestamp = 0;
  EventKind kind = EventKind::kUser;
  nlohmann::json payload;
};

nlohmann::json EventToJson(const Event& event);
Event EventFromJson(const nlohmann::json& doc);

// One compact JSON document per line.
std::string EncodeEventLine(const Event& event);

struct DecodedLog {
  std::vector<Event> events;
  bool truncated_tail = false;  // last line had no newline or did not parse
};

// A damaged final line (crash mid-append) is dropped; damage anywhere else
// throws kFormat.
DecodedLog DecodeEventLog(std::string_view text);

}  // namespace speakloop::workflow
