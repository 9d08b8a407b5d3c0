#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "marlsim/cluster.hpp"
#include "marlsim/errors.hpp"

namespace marlsim {

enum class EventKind {
    TaskSubmitted,
    TaskAdmitted,
    RolloutStarted,
    RolloutSegmentDone,
    ToolCallDone,
    TrajectoryReady,
    TrainStarted,
    TrainDone,
    PolicyCommitted,
    TaskCompleted,
    AdmissionRetry,
    RateRecompute,
    BarrierReleased,
    RoundStarted,
};

inline constexpr std::string_view kEventKindNames[] = {
    "TaskSubmitted",   "TaskAdmitted", "RolloutStarted", "RolloutSegmentDone", "ToolCallDone",
    "TrajectoryReady", "TrainStarted", "TrainDone",      "PolicyCommitted",    "TaskCompleted",
    "AdmissionRetry",  "RateRecompute", "BarrierReleased", "RoundStarted",
};

inline std::string_view to_string(EventKind kind) { return kEventKindNames[static_cast<int>(kind)]; }

inline std::optional<EventKind> event_kind_from_string(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kEventKindNames); ++i) {
        if (kEventKindNames[i] == name) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

// A timestamped simulation event. Queued events are ordered by (time, seq);
// in a trace, seq is the record's position in the log.
//
// `value` is kind-specific: the pool share (0..1) after a RateRecompute,
// decode tokens for RolloutStarted, otherwise 0.
struct SimEvent {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::TaskSubmitted;
    std::string task;
    std::optional<std::int64_t> version;
    std::optional<PoolId> pool;
    double value = 0.0;

    bool operator==(const SimEvent&) const = default;
};

struct TraceLog {
    std::vector<SimEvent> records;
    // Set once the run terminated normally; the horizon of the run.
    std::optional<double> end_time;

    bool complete() const { return end_time.has_value(); }
    bool operator==(const TraceLog&) const = default;
};

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void append_json_string(std::string& out, std::string_view s) {
    out += nlohmann::json(std::string(s)).dump();
}

// One JSON object per line, fields in a fixed order:
//   time, seq, kind, task, version, pool, value
// followed by a final {"time":..,"seq":..,"kind":"End"} line for complete runs.
inline std::string serialize_trace(const TraceLog& trace) {
    std::string out;
    for (const auto& e : trace.records) {
        out += "{\"time\":" + format_number(e.time) + ",\"seq\":" + std::to_string(e.seq) + ",\"kind\":\"";
        out += to_string(e.kind);
        out += "\",\"task\":";
        if (e.task.empty()) out += "null";
        else append_json_string(out, e.task);
        out += ",\"version\":" + (e.version ? std::to_string(*e.version) : std::string("null"));
        out += ",\"pool\":";
        out += e.pool ? "\"" + std::string(to_string(*e.pool)) + "\"" : std::string("null");
        out += ",\"value\":" + format_number(e.value) + "}\n";
    }
    if (trace.end_time) {
        out += "{\"time\":" + format_number(*trace.end_time) + ",\"seq\":" + std::to_string(trace.records.size()) +
               ",\"kind\":\"End\"}\n";
    }
    return out;
}

inline TraceLog parse_trace(std::string_view text) {
    TraceLog trace;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, "", e.what());
        }
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "End") {
            trace.end_time = j.at("time").get<double>();
            continue;
        }
        SimEvent e;
        e.time = j.at("time").get<double>();
        e.seq = j.at("seq").get<std::uint64_t>();
        const auto k = event_kind_from_string(kind);
        if (!k) throw ParseError(lineno, "kind", "unknown event kind '" + kind + "'");
        e.kind = *k;
        if (!j.at("task").is_null()) e.task = j.at("task").get<std::string>();
        if (!j.at("version").is_null()) e.version = j.at("version").get<std::int64_t>();
        if (!j.at("pool").is_null()) {
            e.pool = pool_from_string(j.at("pool").get<std::string>());
            if (!e.pool) throw ParseError(lineno, "pool", "unknown pool");
        }
        e.value = j.at("value").get<double>();
        trace.records.push_back(std::move(e));
    }
    return trace;
}

// Min-heap of pending events keyed by (time, seq) with lazy cancellation.
class EventQueue {
public:
    double clock() const { return clock_; }
    bool empty() const { return live_ == 0; }
    std::size_t size() const { return live_; }

    std::uint64_t schedule(SimEvent event) {
        if (!(event.time >= clock_)) {
            throw TimeTravel("event " + std::string(to_string(event.kind)) + " at t=" + format_number(event.time) +
                             " is before clock t=" + format_number(clock_));
        }
        event.seq = next_seq_++;
        heap_.push(event);
        ++live_;
        return event.seq;
    }

    void cancel(std::uint64_t seq) {
        if (cancelled_.insert(seq).second) --live_;
    }

    std::optional<SimEvent> peek() {
        drop_cancelled();
        if (heap_.empty()) return std::nullopt;
        return heap_.top();
    }

    // Removes the next live event and advances the clock to it.
    std::optional<SimEvent> pop() {
        drop_cancelled();
        if (heap_.empty()) return std::nullopt;
        SimEvent e = heap_.top();
        heap_.pop();
        --live_;
        clock_ = e.time;
        return e;
    }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void drop_cancelled() {
        while (!heap_.empty()) {
            auto it = cancelled_.find(heap_.top().seq);
            if (it == cancelled_.end()) return;
            cancelled_.erase(it);
            heap_.pop();
        }
    }

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::unordered_set<std::uint64_t> cancelled_;
    std::uint64_t next_seq_ = 0;
    std::size_t live_ = 0;
    double clock_ = 0.0;
};

// Dispatch loop: pops events in (time, seq) order and hands them to the
// handler, stopping when the queue drains or the next event lies past
// `until`. Handlers append trace records through emit().
class EventLoop {
public:
    EventQueue& queue() { return queue_; }
    double now() const { return queue_.clock(); }
    const TraceLog& trace() const { return trace_; }
    TraceLog take_trace() { return std::move(trace_); }

    std::uint64_t schedule(SimEvent event) { return queue_.schedule(std::move(event)); }
    void cancel(std::uint64_t seq) { queue_.cancel(seq); }

    void emit(EventKind kind, std::string task = {}, std::optional<std::int64_t> version = std::nullopt,
              std::optional<PoolId> pool = std::nullopt, double value = 0.0) {
        trace_.records.push_back(SimEvent{now(), trace_.records.size(), kind, std::move(task), version, pool, value});
    }

    template <class Handler>
    void run(Handler&& handler, double until = std::numeric_limits<double>::infinity()) {
        while (auto next = queue_.peek()) {
            if (next->time > until) break;
            handler(*queue_.pop());
        }
    }

    void finish(double end_time) { trace_.end_time = end_time; }

private:
    EventQueue queue_;
    TraceLog trace_;
};

}  // namespace marlsim
