#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marlsim/cluster.hpp"
#include "marlsim/errors.hpp"
#include "marlsim/scenario.hpp"
#include "marlsim/schedulers.hpp"
#include "marlsim/sim_core.hpp"

namespace marlsim {

struct PoolMetrics {
    std::string pool;  // rollout | train | shared | all
    std::int64_t devices = 0;
    double busy_device_seconds = 0.0;
    double idle_device_seconds = 0.0;
    double utilization = 0.0;  // fraction
    double idle = 0.0;         // fraction
};

struct TaskMetrics {
    std::string task_id;
    double submit_time = 0.0;
    std::int64_t steps = 0;
    // Submission to first committed update.
    std::optional<double> ttfs;
    // Submission to first rollout start.
    std::optional<double> ttfs_start;
    // Mean gap between consecutive commits after the first.
    std::optional<double> tpts;
    double barrier_wait_total = 0.0;
    std::int64_t barrier_rounds = 0;
    std::optional<double> completed_at;
    std::optional<double> jct;

    double barrier_wait_per_round() const {
        return barrier_rounds > 0 ? barrier_wait_total / static_cast<double>(barrier_rounds) : 0.0;
    }
};

struct GlobalMetrics {
    std::string scenario;
    std::string scheduler;
    std::uint64_t seed = 0;
    std::int64_t tasks = 0;
    std::int64_t total_steps = 0;
    double horizon = 0.0;
    double steps_per_hour = 0.0;
    std::optional<double> mean_jct;
};

struct MetricsReport {
    GlobalMetrics global;
    std::vector<PoolMetrics> per_pool;
    std::vector<TaskMetrics> per_task;

    const PoolMetrics* pool(std::string_view name) const {
        for (const auto& p : per_pool)
            if (p.pool == name) return &p;
        return nullptr;
    }
    const TaskMetrics* task(std::string_view id) const {
        for (const auto& t : per_task)
            if (t.task_id == id) return &t;
        return nullptr;
    }
};

inline double steps_per_hour(std::int64_t steps, double horizon_seconds) {
    return horizon_seconds > 0.0 ? static_cast<double>(steps) / (horizon_seconds / 3600.0) : 0.0;
}

// Device counts of each accelerator pool for the scenario's scheduler.
inline std::map<PoolId, std::int64_t> pool_layout(const Scenario& scenario) {
    const auto mode = execution_mode(scenario.scheduler);
    const auto& c = scenario.cluster;
    if (mode.layout == Layout::collocated) return {{PoolId::shared, c.total_devices()}};
    return {{PoolId::rollout, c.rollout_devices}, {PoolId::train, c.train_devices}};
}

// Recomputes every reported quantity from the trace alone (plus the
// scenario for device counts and submit times).
inline MetricsReport compute_metrics(const TraceLog& trace, const Scenario& scenario) {
    if (!trace.end_time) throw IncompleteTrace("trace has no termination record");
    const double horizon = *trace.end_time;

    const auto layout = pool_layout(scenario);
    std::map<PoolId, double> busy;
    for (const auto& [id, n] : layout) busy[id] = 0.0;

    struct Share {
        double value = 0.0;
        double since = 0.0;
    };
    std::map<PoolId, Share> share;
    std::map<std::string, double> train_started;
    std::map<std::string, std::vector<double>> commits;
    std::map<std::string, double> first_rollout;
    std::map<std::string, double> completed;
    std::map<std::string, double> ready_since_barrier;
    std::map<std::string, std::pair<double, std::int64_t>> barrier;  // total, rounds
    std::int64_t total_steps = 0;

    const auto devices = [&](PoolId id) { return static_cast<double>(layout.at(id)); };

    for (const auto& e : trace.records) {
        switch (e.kind) {
            case EventKind::RateRecompute: {
                Share& s = share[*e.pool];
                busy[*e.pool] += (e.time - s.since) * (s.value * devices(*e.pool));
                s = {e.value, e.time};
                break;
            }
            case EventKind::TrainStarted: train_started[e.task] = e.time; break;
            case EventKind::TrainDone:
                busy[*e.pool] += (e.time - train_started.at(e.task)) * devices(*e.pool);
                train_started.erase(e.task);
                break;
            case EventKind::PolicyCommitted:
                commits[e.task].push_back(e.time);
                ++total_steps;
                break;
            case EventKind::RolloutStarted: first_rollout.try_emplace(e.task, e.time); break;
            case EventKind::TaskCompleted: completed[e.task] = e.time; break;
            case EventKind::TrajectoryReady: ready_since_barrier[e.task] = e.time; break;
            case EventKind::BarrierReleased:
                for (const auto& [task, ready] : ready_since_barrier) {
                    auto& b = barrier[task];
                    b.first += e.time - ready;
                    ++b.second;
                }
                ready_since_barrier.clear();
                break;
            default: break;
        }
    }
    // Close whatever was still running at the horizon.
    for (auto& [id, s] : share) {
        if (horizon > s.since) busy[id] += (horizon - s.since) * (s.value * devices(id));
    }
    for (const auto& [task, start] : train_started) {
        (void)task;
        const PoolId train = layout.contains(PoolId::train) ? PoolId::train : PoolId::shared;
        if (horizon > start) busy[train] += (horizon - start) * devices(train);
    }

    MetricsReport report;
    auto& g = report.global;
    g.scenario = scenario.name;
    g.scheduler = scenario.scheduler.label();
    g.seed = scenario.seed;
    g.tasks = static_cast<std::int64_t>(scenario.tasks.size());
    g.total_steps = total_steps;
    g.horizon = horizon;
    g.steps_per_hour = steps_per_hour(total_steps, horizon);

    double all_busy = 0.0;
    std::int64_t all_devices = 0;
    const auto make_pool = [&](std::string name, std::int64_t n, double b) {
        PoolMetrics p;
        p.pool = std::move(name);
        p.devices = n;
        p.busy_device_seconds = b;
        const double capacity = static_cast<double>(n) * horizon;
        p.idle_device_seconds = capacity - b;
        p.utilization = capacity > 0.0 ? b / capacity : 0.0;
        p.idle = capacity > 0.0 ? p.idle_device_seconds / capacity : 1.0;
        return p;
    };
    for (const auto& [id, n] : layout) {
        report.per_pool.push_back(make_pool(std::string(to_string(id)), n, busy[id]));
        all_busy += busy[id];
        all_devices += n;
    }
    report.per_pool.push_back(make_pool("all", all_devices, all_busy));

    double jct_sum = 0.0;
    std::int64_t jct_count = 0;
    for (const auto& spec : scenario.tasks) {
        TaskMetrics t;
        t.task_id = spec.task_id;
        t.submit_time = spec.submit_time;
        if (auto it = commits.find(spec.task_id); it != commits.end() && !it->second.empty()) {
            const auto& c = it->second;
            t.steps = static_cast<std::int64_t>(c.size());
            t.ttfs = c.front() - spec.submit_time;
            if (c.size() >= 2) t.tpts = (c.back() - c.front()) / static_cast<double>(c.size() - 1);
        }
        if (auto it = first_rollout.find(spec.task_id); it != first_rollout.end()) {
            t.ttfs_start = it->second - spec.submit_time;
        }
        if (auto it = barrier.find(spec.task_id); it != barrier.end()) {
            t.barrier_wait_total = it->second.first;
            t.barrier_rounds = it->second.second;
        }
        if (auto it = completed.find(spec.task_id); it != completed.end()) {
            t.completed_at = it->second;
            t.jct = it->second - spec.submit_time;
            jct_sum += *t.jct;
            ++jct_count;
        }
        report.per_task.push_back(std::move(t));
    }
    if (jct_count > 0) g.mean_jct = jct_sum / static_cast<double>(jct_count);
    return report;
}

// Runs the scenario and derives its report in one go.
inline MetricsReport run_and_measure(const Scenario& scenario, TraceLog* trace_out = nullptr) {
    Simulation sim(scenario);
    const TraceLog& trace = sim.run();
    auto report = compute_metrics(trace, scenario);
    if (trace_out) *trace_out = trace;
    return report;
}

// ---- export ---------------------------------------------------------------

enum class ReportFormat { csv, json };
enum class CsvTable { tasks, pools, summary };

inline constexpr int kReportFormatVersion = 1;

// Percentages are reported with two decimals, e.g. 0.0667 -> 6.67.
inline double to_percent(double fraction) { return std::round(fraction * 10000.0) / 100.0; }

inline std::string format_percent(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", to_percent(fraction));
    return buf;
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline constexpr const char* kTaskColumns =
    "task_id,submit_s,steps,ttfs_s,ttfs_start_s,tpts_s,barrier_wait_s,barrier_rounds,barrier_wait_per_round_s,"
    "completed_at_s,jct_s";
inline constexpr const char* kPoolColumns = "pool,devices,busy_device_s,idle_device_s,util_pct,idle_pct";
inline constexpr const char* kSummaryColumns =
    "scenario,scheduler,seed,tasks,total_steps,horizon_s,horizon_hr,steps_per_hr,mean_jct_s";

inline std::string export_csv(const MetricsReport& r, CsvTable table) {
    std::string out;
    switch (table) {
        case CsvTable::tasks:
            out = std::string(kTaskColumns) + "\n";
            for (const auto& t : r.per_task) {
                out += csv_quote(t.task_id) + "," + format_number(t.submit_time) + "," + std::to_string(t.steps) + "," +
                       format_optional(t.ttfs) + "," + format_optional(t.ttfs_start) + "," + format_optional(t.tpts) +
                       "," + format_number(t.barrier_wait_total) + "," + std::to_string(t.barrier_rounds) + "," +
                       format_number(t.barrier_wait_per_round()) + "," + format_optional(t.completed_at) + "," +
                       format_optional(t.jct) + "\n";
            }
            break;
        case CsvTable::pools:
            out = std::string(kPoolColumns) + "\n";
            for (const auto& p : r.per_pool) {
                out += p.pool + "," + std::to_string(p.devices) + "," + format_number(p.busy_device_seconds) + "," +
                       format_number(p.idle_device_seconds) + "," + format_percent(p.utilization) + "," +
                       format_percent(p.idle) + "\n";
            }
            break;
        case CsvTable::summary: {
            const auto& g = r.global;
            out = std::string(kSummaryColumns) + "\n";
            out += csv_quote(g.scenario) + "," + g.scheduler + "," + std::to_string(g.seed) + "," +
                   std::to_string(g.tasks) + "," + std::to_string(g.total_steps) + "," + format_number(g.horizon) + "," +
                   format_number(g.horizon / 3600.0) + "," + format_number(g.steps_per_hour) + "," +
                   format_optional(g.mean_jct) + "\n";
            break;
        }
    }
    return out;
}

inline nlohmann::ordered_json report_to_json(const MetricsReport& r) {
    using nlohmann::ordered_json;
    const auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
    ordered_json j;
    j["format_version"] = kReportFormatVersion;
    const auto& g = r.global;
    j["global"] = {{"scenario", g.scenario},       {"scheduler", g.scheduler},
                   {"seed", g.seed},               {"tasks", g.tasks},
                   {"total_steps", g.total_steps}, {"horizon_s", g.horizon},
                   {"steps_per_hr", g.steps_per_hour}, {"mean_jct_s", opt(g.mean_jct)}};
    j["pools"] = ordered_json::array();
    for (const auto& p : r.per_pool) {
        j["pools"].push_back({{"pool", p.pool},
                              {"devices", p.devices},
                              {"busy_device_s", p.busy_device_seconds},
                              {"idle_device_s", p.idle_device_seconds},
                              {"util_pct", to_percent(p.utilization)},
                              {"idle_pct", to_percent(p.idle)}});
    }
    j["tasks"] = ordered_json::array();
    for (const auto& t : r.per_task) {
        j["tasks"].push_back({{"task_id", t.task_id},
                              {"submit_s", t.submit_time},
                              {"steps", t.steps},
                              {"ttfs_s", opt(t.ttfs)},
                              {"ttfs_start_s", opt(t.ttfs_start)},
                              {"tpts_s", opt(t.tpts)},
                              {"barrier_wait_s", t.barrier_wait_total},
                              {"barrier_rounds", t.barrier_rounds},
                              {"barrier_wait_per_round_s", t.barrier_wait_per_round()},
                              {"completed_at_s", opt(t.completed_at)},
                              {"jct_s", opt(t.jct)}});
    }
    return j;
}

inline std::string export_report(const MetricsReport& report, ReportFormat format, CsvTable table = CsvTable::tasks) {
    if (format == ReportFormat::csv) return export_csv(report, table);
    return report_to_json(report).dump(2) + "\n";
}

}  // namespace marlsim
