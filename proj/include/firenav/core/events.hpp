#pragma once

#include <string>
#include <vector>

namespace firenav {

/// One timestamped record in the mission event log. `kind` is a stable
/// machine-readable tag (e.g. "collision", "task_status", "bt_node",
/// "phase", "eject_start"); `detail` is free-form.
struct Event {
  double time = 0.0;
  std::string robot;
  std::string kind;
  std::string detail;
};

class EventLog {
 public:
  void emit(double time, std::string robot, std::string kind,
            std::string detail) {
    events_.push_back(
        {time, std::move(robot), std::move(kind), std::move(detail)});
  }

  const std::vector<Event>& events() const { return events_; }
  void clear() { events_.clear(); }

  /// Events matching a kind, in emission order.
  std::vector<Event> of_kind(const std::string& kind) const {
    std::vector<Event> out;
    for (const auto& e : events_)
      if (e.kind == kind) out.push_back(e);
    return out;
  }

 private:
  std::vector<Event> events_;
};

}  // namespace firenav
