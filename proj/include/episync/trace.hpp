#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace episync {

inline constexpr const char* kTraceSchema = "episync-trace-v1";

enum class EventKind {
    task_update,
    disturbance,
    recovery,
    state,
    task_satisfied,
    sync_event,
    plan_revision,
    abort,
    done,
};

const char* to_string(EventKind k);
// Lower value sorts earlier within one step.
int event_priority(EventKind k);

struct TraceEvent {
    int step = 0;
    EventKind kind = EventKind::state;
    int agent = -1;  // -1 = system-wide
    nlohmann::json payload;
};

// Ordered audit log of one episode. Rows are appended in (step, priority)
// order and end with exactly one terminal row (done or abort).
class EpisodeTrace {
public:
    void add(int step, EventKind kind, int agent, nlohmann::json payload);

    const std::vector<TraceEvent>& events() const { return events_; }
    bool has_terminal() const;
    const TraceEvent* find_first(EventKind kind) const;

    void write_jsonl(std::ostream& os) const;
    void write_csv(std::ostream& os) const;

    static EpisodeTrace read_jsonl(std::istream& is);

private:
    std::vector<TraceEvent> events_;
};

}  // namespace episync
