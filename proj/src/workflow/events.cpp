#include "workflow/events.hpp"

#include "common/error.hpp"

namespace speakloop::workflow {

namespace {
constexpr std::pair<EventKind, const char*> kNames[] = {
    {EventKind::kUser, "user"},       {EventKind::kUpload, "upload"},
    {EventKind::kAnalysis, "analysis"}, {EventKind::kReview, "review"},
    {EventKind::kPromptRelease, "prompt_release"},
};
}  // namespace

const char* EventKindName(EventKind kind) {
  for (const auto& [k, n] : kNames)
    if (k == kind) return n;
  return "unknown";
}

std::optional<EventKind> ParseEventKind(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  return std::nullopt;
}

nlohmann::json EventToJson(const Event& e) {
  return {{"seq", e.sequence}, {"ts", e.timestamp}, {"kind", EventKindName(e.kind)}, {"payload", e.payload}};
}

Event EventFromJson(const nlohmann::json& doc) {
  try {
    Event e;
    e.sequence = doc.at("seq").get<std::uint64_t>();
    e.timestamp = doc.at("ts").get<std::int64_t>();
    auto kind = ParseEventKind(doc.at("kind").get<std::string>());
    if (!kind) Fail(ErrorKind::kFormat, "event: unknown kind");
    e.kind = *kind;
    e.payload = doc.at("payload");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    Fail(ErrorKind::kFormat, std::string("event: ") + ex.what());
  }
}

std::string EncodeEventLine(const Event& event) { return EventToJson(event).dump() + "\n"; }

DecodedLog DecodeEventLog(std::string_view text) {
  DecodedLog log;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const bool last = nl == std::string_view::npos || nl + 1 == text.size();
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (nl == std::string_view::npos) {
      log.truncated_tail = true;
      break;
    }
    if (line.empty()) continue;
    try {
      log.events.push_back(EventFromJson(nlohmann::json::parse(line)));
    } catch (const std::exception&) {
      if (last) {
        log.truncated_tail = true;
        break;
      }
      Fail(ErrorKind::kFormat, "event log: corrupt record at line " + std::to_string(line_no));
    }
  }
  return log;
}

}  // namespace speakloop::workflow
