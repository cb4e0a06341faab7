#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace starlock {

struct Event {
  std::string type;
  nlohmann::json payload;
  std::uint64_t clock = 0;
};

// Append-only judge-station log; serialized as JSON lines with sorted keys
// and decimal-string clocks.
class EventLog {
 public:
  void append(std::string type, nlohmann::json payload, std::uint64_t clock) {
    events_.push_back({std::move(type), std::move(payload), clock});
  }

  const std::vector<Event>& events() const noexcept { return events_; }

  std::string to_jsonl() const {
    std::string out;
    for (const auto& e : events_) {
      nlohmann::json j{{"type", e.type}, {"payload", e.payload}, {"clock", std::to_string(e.clock)}};
      out += j.dump();
      out += '\n';
    }
    return out;
  }

  static EventLog from_jsonl(const std::string& text) {
    EventLog log;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      if (end > start) {
        auto j = nlohmann::json::parse(text.substr(start, end - start));
        log.append(j.at("type").get<std::string>(), j.at("payload"), std::stoull(j.at("clock").get<std::string>()));
      }
      start = end + 1;
    }
    return log;
  }

 private:
  std::vector<Event> events_;
};

}  // namespace starlock
