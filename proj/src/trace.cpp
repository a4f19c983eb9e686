#include "episync/trace.hpp"

#include <ostream>
#include <stdexcept>

namespace episync {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::task_update: return "task_update";
        case EventKind::disturbance: return "disturbance";
        case EventKind::recovery: return "recovery";
        case EventKind::state: return "state";
        case EventKind::task_satisfied: return "task_satisfied";
        case EventKind::sync_event: return "sync_event";
        case EventKind::plan_revision: return "plan_revision";
        case EventKind::abort: return "abort";
        case EventKind::done: return "done";
    }
    return "unknown";
}

int event_priority(EventKind k) { return static_cast<int>(k); }

namespace {

EventKind kind_from_string(const std::string& s) {
    for (int k = 0; k <= static_cast<int>(EventKind::done); ++k) {
        if (s == to_string(static_cast<EventKind>(k))) return static_cast<EventKind>(k);
    }
    throw std::invalid_argument("unknown trace event kind: " + s);
}

}  // namespace

void EpisodeTrace::add(int step, EventKind kind, int agent, nlohmann::json payload) {
    if (has_terminal()) throw std::logic_error("trace already has a terminal row");
    if (!events_.empty()) {
        const TraceEvent& last = events_.back();
        if (step < last.step ||
            (step == last.step && event_priority(kind) < event_priority(last.kind))) {
            throw std::logic_error("trace rows must be ordered by (step, kind priority)");
        }
    }
    events_.push_back({step, kind, agent, std::move(payload)});
}

bool EpisodeTrace::has_terminal() const {
    return !events_.empty() && (events_.back().kind == EventKind::done || events_.back().kind == EventKind::abort);
}

const TraceEvent* EpisodeTrace::find_first(EventKind kind) const {
    for (const auto& e : events_) {
        if (e.kind == kind) return &e;
    }
    return nullptr;
}

void EpisodeTrace::write_jsonl(std::ostream& os) const {
    os << nlohmann::json{{"schema", kTraceSchema}}.dump() << '\n';
    for (const auto& e : events_) {
        nlohmann::json row{{"step", e.step}, {"event", to_string(e.kind)}, {"agent", e.agent}};
        for (auto it = e.payload.begin(); it != e.payload.end(); ++it) row[it.key()] = it.value();
        os << row.dump() << '\n';
    }
}

void EpisodeTrace::write_csv(std::ostream& os) const {
    os << "# " << kTraceSchema << '\n';
    os << "step,event,agent,payload\n";
    for (const auto& e : events_) {
        std::string payload;
        for (auto it = e.payload.begin(); it != e.payload.end(); ++it) {
            if (!payload.empty()) payload += ';';
            payload += it.key() + "=" + it.value().dump();
        }
        // payload values are JSON dumps with commas possible; quote the field
        std::string quoted = "\"";
        for (char c : payload) {
            if (c == '"') quoted += "\"\"";
            else quoted += c;
        }
        quoted += '"';
        os << e.step << ',' << to_string(e.kind) << ',' << e.agent << ',' << quoted << '\n';
    }
}

EpisodeTrace EpisodeTrace::read_jsonl(std::istream& is) {
    EpisodeTrace trace;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json row = nlohmann::json::parse(line);  // throws on corrupt input
        if (!header_seen) {
            if (!row.contains("schema") || row["schema"] != kTraceSchema) {
                throw std::invalid_argument("trace file schema mismatch");
            }
            header_seen = true;
            continue;
        }
        TraceEvent e;
        e.step = row.at("step").get<int>();
        e.kind = kind_from_string(row.at("event").get<std::string>());
        e.agent = row.at("agent").get<int>();
        for (auto it = row.begin(); it != row.end(); ++it) {
            if (it.key() == "step" || it.key() == "event" || it.key() == "agent") continue;
            e.payload[it.key()] = it.value();
        }
        trace.events_.push_back(std::move(e));
    }
    if (!header_seen) throw std::invalid_argument("trace file is empty");
    return trace;
}

}  // namespace episync
