#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marlsim/sim_core.hpp"

namespace marlsim {

enum class Phase { rollout, tool, train };

inline std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::rollout: return "rollout";
        case Phase::tool: return "tool-call";
        case Phase::train: return "train";
    }
    return "?";
}

struct TimelineInterval {
    std::string lane;  // "rollout", "train", "env", "shared" or "task:<id>"
    Phase phase = Phase::rollout;
    double start = 0.0;
    double end = 0.0;
};

struct Timeline {
    std::vector<std::string> lanes;  // pool lanes first, then one per task
    std::vector<TimelineInterval> intervals;
    double horizon = 0.0;

    std::vector<TimelineInterval> lane(std::string_view name) const {
        std::vector<TimelineInterval> out;
        for (const auto& i : intervals)
            if (i.lane == name) out.push_back(i);
        return out;
    }
};

// Phase intervals per task, plus pool lanes holding the union of each pool's
// activity. Intervals still open at the end of the trace close at the horizon.
inline Timeline build_timeline(const TraceLog& trace) {
    Timeline tl;
    tl.horizon = trace.end_time.value_or(trace.records.empty() ? 0.0 : trace.records.back().time);

    struct Open {
        std::optional<double> rollout;
        std::optional<double> tool;
        std::optional<double> train;
    };
    std::map<std::string, Open> open;
    std::vector<std::string> task_order;
    std::map<std::string, std::vector<TimelineInterval>> pool_raw;
    std::vector<std::string> pool_order;

    const auto add = [&](const std::string& task, const std::string& pool, Phase phase, double s, double e) {
        tl.intervals.push_back({"task:" + task, phase, s, e});
        if (!pool_raw.contains(pool)) pool_order.push_back(pool);
        pool_raw[pool].push_back({pool, phase, s, e});
    };
    const auto note_task = [&](const std::string& task) {
        if (!open.contains(task)) {
            open[task] = {};
            task_order.push_back(task);
        }
    };

    std::map<std::string, std::string> rollout_pool_of;
    std::map<std::string, std::string> train_pool_of;
    for (const auto& e : trace.records) {
        if (e.task.empty()) continue;
        note_task(e.task);
        Open& o = open[e.task];
        switch (e.kind) {
            case EventKind::RolloutStarted:
                o.rollout = e.time;
                rollout_pool_of[e.task] = std::string(to_string(*e.pool));
                break;
            case EventKind::RolloutSegmentDone:
                if (o.rollout) add(e.task, rollout_pool_of[e.task], Phase::rollout, *o.rollout, e.time);
                o.rollout.reset();
                o.tool = e.time;  // dropped again if the trajectory is ready
                break;
            case EventKind::TrajectoryReady: o.tool.reset(); break;
            case EventKind::ToolCallDone:
                if (o.tool) add(e.task, "env", Phase::tool, *o.tool, e.time);
                o.tool.reset();
                o.rollout = e.time;
                break;
            case EventKind::TrainStarted:
                o.train = e.time;
                train_pool_of[e.task] = std::string(to_string(*e.pool));
                break;
            case EventKind::TrainDone:
                if (o.train) add(e.task, train_pool_of[e.task], Phase::train, *o.train, e.time);
                o.train.reset();
                break;
            default: break;
        }
    }
    for (const auto& task : task_order) {
        const Open& o = open[task];
        if (o.rollout && tl.horizon > *o.rollout) add(task, rollout_pool_of[task], Phase::rollout, *o.rollout, tl.horizon);
        if (o.tool && tl.horizon > *o.tool) add(task, "env", Phase::tool, *o.tool, tl.horizon);
        if (o.train && tl.horizon > *o.train) add(task, train_pool_of[task], Phase::train, *o.train, tl.horizon);
    }

    // Pool lanes: merge overlapping or touching intervals of the same phase.
    static constexpr const char* kPoolRank[] = {"rollout", "shared", "train", "env"};
    std::sort(pool_order.begin(), pool_order.end(), [](const std::string& a, const std::string& b) {
        const auto rank = [](const std::string& s) {
            return std::find_if(std::begin(kPoolRank), std::end(kPoolRank), [&](const char* p) { return s == p; }) -
                   std::begin(kPoolRank);
        };
        return rank(a) < rank(b);
    });
    std::vector<TimelineInterval> merged;
    for (const auto& pool : pool_order) {
        auto raw = pool_raw[pool];
        std::stable_sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
            if (a.phase != b.phase) return a.phase < b.phase;
            return a.start < b.start;
        });
        for (const auto& i : raw) {
            if (!merged.empty() && merged.back().lane == pool && merged.back().phase == i.phase &&
                i.start <= merged.back().end) {
                merged.back().end = std::max(merged.back().end, i.end);
            } else {
                merged.push_back(i);
            }
        }
        tl.lanes.push_back(pool);
    }
    for (const auto& task : task_order) tl.lanes.push_back("task:" + task);
    merged.insert(merged.end(), tl.intervals.begin(), tl.intervals.end());
    tl.intervals = std::move(merged);
    return tl;
}

enum class TimelineFormat { ascii, svg };

struct TimelineOptions {
    // Seconds per ASCII column; 0 picks horizon / max_columns.
    double quantum = 0.0;
    std::size_t max_columns = 120;
};

inline char phase_glyph(Phase p) {
    switch (p) {
        case Phase::rollout: return 'R';
        case Phase::tool: return 'E';
        case Phase::train: return 'T';
    }
    return '?';
}

inline std::string render_ascii(const Timeline& tl, const TimelineOptions& opt) {
    double quantum = opt.quantum;
    if (quantum <= 0.0) quantum = tl.horizon > 0.0 ? tl.horizon / static_cast<double>(opt.max_columns) : 1.0;
    const auto columns = tl.horizon > 0.0 ? static_cast<std::size_t>(std::ceil(tl.horizon / quantum - 1e-9)) : 0;

    std::size_t label_width = 6;
    for (const auto& l : tl.lanes) label_width = std::max(label_width, l.size());

    std::string out = "# timeline: R=rollout T=train E=tool-call, quantum=" + format_number(quantum) +
                      "s, horizon=" + format_number(tl.horizon) + "s\n";
    // Axis: a tick every 10 columns.
    std::string axis(label_width + 1, ' ');
    std::string ticks(label_width + 1, ' ');
    for (std::size_t c = 0; c <= columns; c += 10) {
        ticks.resize(label_width + 1 + c, ' ');
        ticks += '|';
        const std::string label = format_number(static_cast<double>(c) * quantum);
        axis.resize(std::max(axis.size(), label_width + 1 + c), ' ');
        if (axis.size() == label_width + 1 + c) axis += label;
    }
    out += axis + "\n" + ticks + "\n";

    for (const auto& lane : tl.lanes) {
        std::string row(columns, '.');
        std::vector<double> best(columns, 0.0);
        for (const auto& i : tl.intervals) {
            if (i.lane != lane) continue;
            const auto first = static_cast<std::size_t>(std::floor(i.start / quantum));
            for (std::size_t c = first; c < columns; ++c) {
                const double lo = static_cast<double>(c) * quantum;
                const double hi = lo + quantum;
                if (lo >= i.end) break;
                const double cover = std::min(hi, i.end) - std::max(lo, i.start);
                if (cover > best[c]) {
                    best[c] = cover;
                    row[c] = phase_glyph(i.phase);
                }
            }
        }
        std::string label = lane;
        label.resize(label_width, ' ');
        out += label + " " + row + "\n";
    }
    return out;
}

inline std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* phase_color(Phase p) {
    switch (p) {
        case Phase::rollout: return "#4e79a7";
        case Phase::tool: return "#59a14f";
        case Phase::train: return "#e15759";
    }
    return "#999999";
}

inline std::string render_svg(const Timeline& tl) {
    constexpr double kLabel = 160.0, kPlot = 960.0, kLane = 22.0, kTop = 40.0, kPad = 12.0;
    const double height = kTop + kLane * static_cast<double>(tl.lanes.size()) + 40.0;
    const double width = kLabel + kPlot + kPad;
    const double scale = tl.horizon > 0.0 ? kPlot / tl.horizon : 0.0;
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\" "
                  "font-family=\"monospace\" font-size=\"11\">\n",
                  width, height, width, height);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    double lx = kLabel;
    for (Phase p : {Phase::rollout, Phase::train, Phase::tool}) {
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.1f\" y=\"8\" width=\"12\" height=\"12\" fill=\"%s\"/><text x=\"%.1f\" y=\"18\">%s</text>\n",
                      lx, phase_color(p), lx + 16.0, std::string(to_string(p)).c_str());
        out += buf;
        lx += 110.0;
    }
    const double axis_y = kTop + kLane * static_cast<double>(tl.lanes.size()) + 4.0;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#000\"/>\n", kLabel,
                  axis_y, kLabel + kPlot, axis_y);
    out += buf;
    for (int k = 0; k <= 10; ++k) {
        const double x = kLabel + kPlot * k / 10.0;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#000\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n",
                      x, axis_y, x, axis_y + 4.0, x, axis_y + 16.0, format_number(tl.horizon * k / 10.0).c_str());
        out += buf;
    }
    for (std::size_t li = 0; li < tl.lanes.size(); ++li) {
        const double y = kTop + kLane * static_cast<double>(li);
        std::snprintf(buf, sizeof buf,
                      "<text x=\"4\" y=\"%.1f\">%s</text><rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                      "fill=\"#f2f2f2\"/>\n",
                      y + 15.0, svg_escape(tl.lanes[li]).c_str(), kLabel, y + 2.0, kPlot, kLane - 4.0);
        out += buf;
        for (const auto& i : tl.intervals) {
            if (i.lane != tl.lanes[li]) continue;
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%.3f\" y=\"%.1f\" width=\"%.3f\" height=\"%.1f\" fill=\"%s\"><title>%s [%s, %s)</title></rect>\n",
                          kLabel + i.start * scale, y + 2.0, std::max(0.0, (i.end - i.start) * scale), kLane - 4.0,
                          phase_color(i.phase), std::string(to_string(i.phase)).c_str(),
                          format_number(i.start).c_str(), format_number(i.end).c_str());
            out += buf;
        }
    }
    out += "</svg>\n";
    return out;
}

inline std::string export_timeline(const TraceLog& trace, TimelineFormat format, const TimelineOptions& options = {}) {
    const Timeline tl = build_timeline(trace);
    return format == TimelineFormat::svg ? render_svg(tl) : render_ascii(tl, options);
}

}  // namespace marlsim
