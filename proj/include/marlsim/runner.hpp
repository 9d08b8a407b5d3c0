#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marlsim/bundled.hpp"
#include "marlsim/errors.hpp"
#include "marlsim/metrics.hpp"
#include "marlsim/rng.hpp"
#include "marlsim/scenario.hpp"
#include "marlsim/scheduler_choice.hpp"
#include "marlsim/timeline.hpp"

namespace marlsim {

enum class ExitCode : int {
    ok = 0,
    usage = 1,
    parse = 2,
    validation = 3,
    deadlock = 4,
    io = 5,
};

struct SweepSpec {
    std::string param;  // task_count | kv_budget_bytes | rollout_pool_token_rate | seed
    std::vector<double> values;
};

inline constexpr const char* kSweepParams[] = {"task_count", "kv_budget_bytes", "rollout_pool_token_rate", "seed"};

struct RunRequest {
    // A file path, or "bundled:<name>" for a shipped scenario.
    std::string scenario_path;
    std::optional<std::string> scheduler;
    std::optional<std::uint64_t> seed;
    std::optional<SweepSpec> sweep;
    std::filesystem::path output_dir = "marlsim-out";
    TimelineFormat timeline = TimelineFormat::ascii;
    unsigned jobs = 1;
};

inline constexpr const char* kOutputDirEnv = "MARLSIM_OUT";

// --out, then $MARLSIM_OUT, then ./marlsim-out.
inline std::filesystem::path default_output_dir(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "marlsim-out";
}

// "task_count=1,2,4"
inline SweepSpec parse_sweep(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ValidationError("sweep must look like name=v1,v2,...");
    SweepSpec s;
    s.param = std::string(detail::trim(text.substr(0, eq)));
    if (std::find(std::begin(kSweepParams), std::end(kSweepParams), s.param) == std::end(kSweepParams)) {
        throw ValidationError("unknown sweep parameter '" + s.param + "'");
    }
    std::string_view rest = text.substr(eq + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item(detail::trim(rest.substr(0, comma)));
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("sweep value '" + item + "' is not a number");
        }
        if (!std::isfinite(v)) throw ValidationError("sweep values must be finite");
        s.values.push_back(v);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    if (s.values.empty()) throw ValidationError("sweep needs at least one value");
    return s;
}

inline std::string read_scenario_text(const std::string& path) {
    constexpr std::string_view kPrefix = "bundled:";
    if (path.starts_with(kPrefix)) {
        const auto text = bundled_scenario(std::string_view(path).substr(kPrefix.size()));
        if (!text) throw IoError("no bundled scenario named '" + path.substr(kPrefix.size()) + "'");
        return std::string(*text);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::int64_t whole_number(const SweepSpec& sweep, double v, std::int64_t min) {
    if (v != std::floor(v) || v < static_cast<double>(min)) {
        throw ValidationError(sweep.param + " values must be integers >= " + std::to_string(min));
    }
    return static_cast<std::int64_t>(v);
}

inline Scenario apply_sweep_point(const Scenario& base, const SweepSpec& sweep, double v) {
    Scenario s = base;
    if (sweep.param == "task_count") {
        s = with_task_count(base, static_cast<std::size_t>(whole_number(sweep, v, 1)));
    } else if (sweep.param == "kv_budget_bytes") {
        s.cluster.kv_budget_bytes = whole_number(sweep, v, 1);
    } else if (sweep.param == "rollout_pool_token_rate") {
        if (!(v > 0.0)) throw ValidationError("rollout_pool_token_rate must be > 0");
        s.cluster.rollout_pool_token_rate = v;
    } else if (sweep.param == "seed") {
        s.seed = static_cast<std::uint64_t>(whole_number(sweep, v, 0));
    }
    validate(s);
    return s;
}

struct SweepPoint {
    std::string param;
    double value = 0.0;
};

struct RunOutcome {
    std::string scheduler;
    std::optional<SweepPoint> point;
    Scenario scenario;
    TraceLog trace;
    MetricsReport report;
    std::string subdir;
};

inline std::string run_subdir(const std::string& scenario_text, const Scenario& s, const std::optional<SweepPoint>& pt) {
    std::string key = scenario_text + "\n" + s.scheduler.label() + "\n" + std::to_string(s.seed);
    std::string name = s.name + "_" + s.scheduler.label() + "_s" + std::to_string(s.seed);
    if (pt) {
        key += "\n" + pt->param + "=" + format_number(pt->value);
        name += "_" + pt->param + format_number(pt->value);
    }
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
    return name + "_" + std::string(hash, 8);
}

// Runs every (scheduler, sweep point) combination. Each simulation is
// independent, so up to `jobs` of them run at once; results keep input order.
inline std::vector<RunOutcome> execute_runs(const RunRequest& req, const std::vector<SchedulerChoice>& schedulers) {
    const std::string text = read_scenario_text(req.scenario_path);
    Scenario base = load_scenario(text);
    if (req.seed) base.seed = *req.seed;

    std::vector<std::optional<SweepPoint>> points;
    if (req.sweep) {
        for (double v : req.sweep->values) points.push_back(SweepPoint{req.sweep->param, v});
    } else {
        points.push_back(std::nullopt);
    }

    std::vector<RunOutcome> jobs;
    for (const auto& pt : points) {
        for (const auto& choice : schedulers) {
            RunOutcome o;
            o.scenario = pt ? apply_sweep_point(base, *req.sweep, pt->value) : base;
            o.scenario.scheduler = choice;
            validate(o.scenario);
            o.scheduler = choice.label();
            o.point = pt;
            o.subdir = run_subdir(text, o.scenario, pt);
            jobs.push_back(std::move(o));
        }
    }

    const auto work = [](RunOutcome& o) { o.report = run_and_measure(o.scenario, &o.trace); };
    const std::size_t width = std::max(1u, req.jobs);
    for (std::size_t i = 0; i < jobs.size(); i += width) {
        std::vector<std::future<void>> batch;
        for (std::size_t j = i; j < std::min(jobs.size(), i + width); ++j) {
            batch.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async, work, std::ref(jobs[j])));
        }
        for (auto& f : batch) f.get();
    }
    return jobs;
}

inline double rollout_utilization(const MetricsReport& r) {
    if (const auto* p = r.pool("rollout")) return p->utilization;
    if (const auto* p = r.pool("shared")) return p->utilization;
    return 0.0;
}

struct ComparisonRow {
    std::string scheduler;
    std::optional<SweepPoint> point;
    std::uint64_t seed = 0;
    std::int64_t tasks = 0;
    double horizon = 0.0;
    double steps_per_hour = 0.0;
    double rollout_util = 0.0;
    std::optional<double> mean_jct;
    double speedup = 1.0;
    double util_ratio = 1.0;
};

struct ComparisonReport {
    std::string scenario;
    std::string baseline;
    std::vector<ComparisonRow> rows;
};

// Ratio columns are relative to single_disaggregated when it was run,
// otherwise to the first scheduler, at the same sweep point.
inline ComparisonReport build_comparison(const std::vector<RunOutcome>& runs, const std::vector<SchedulerChoice>& schedulers) {
    ComparisonReport out;
    if (runs.empty()) return out;
    out.scenario = runs.front().scenario.name;
    out.baseline = schedulers.front().label();
    for (const auto& c : schedulers)
        if (c == SchedulerChoice{SchedulerKind::single_disaggregated}) out.baseline = c.label();

    const std::size_t per_point = schedulers.size();
    for (std::size_t i = 0; i < runs.size(); i += per_point) {
        const RunOutcome* base = nullptr;
        for (std::size_t j = i; j < i + per_point; ++j)
            if (runs[j].scheduler == out.baseline) base = &runs[j];
        for (std::size_t j = i; j < i + per_point; ++j) {
            const auto& r = runs[j];
            ComparisonRow row;
            row.scheduler = r.scheduler;
            row.point = r.point;
            row.seed = r.scenario.seed;
            row.tasks = r.report.global.tasks;
            row.horizon = r.report.global.horizon;
            row.steps_per_hour = r.report.global.steps_per_hour;
            row.rollout_util = rollout_utilization(r.report);
            row.mean_jct = r.report.global.mean_jct;
            const double base_sph = base->report.global.steps_per_hour;
            const double base_util = rollout_utilization(base->report);
            row.speedup = base_sph > 0.0 ? row.steps_per_hour / base_sph : 0.0;
            row.util_ratio = base_util > 0.0 ? row.rollout_util / base_util : 0.0;
            out.rows.push_back(row);
        }
    }
    return out;
}

inline std::string comparison_csv(const ComparisonReport& c) {
    std::string out = "scheduler,sweep_param,sweep_value,seed,tasks,horizon_s,steps_per_hr,rollout_util_pct,mean_jct_s,"
                      "speedup,util_ratio\n";
    for (const auto& r : c.rows) {
        out += r.scheduler + "," + (r.point ? r.point->param : "") + "," +
               (r.point ? format_number(r.point->value) : "") + "," + std::to_string(r.seed) + "," +
               std::to_string(r.tasks) + "," + format_number(r.horizon) + "," + format_number(r.steps_per_hour) + "," +
               format_percent(r.rollout_util) + "," + format_optional(r.mean_jct) + "," + format_number(r.speedup) +
               "," + format_number(r.util_ratio) + "\n";
    }
    return out;
}

inline nlohmann::ordered_json comparison_json(const ComparisonReport& c) {
    nlohmann::ordered_json j;
    j["format_version"] = kReportFormatVersion;
    j["scenario"] = c.scenario;
    j["baseline"] = c.baseline;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : c.rows) {
        nlohmann::ordered_json row;
        row["scheduler"] = r.scheduler;
        if (r.point) {
            row["sweep_param"] = r.point->param;
            row["sweep_value"] = r.point->value;
        }
        row["seed"] = r.seed;
        row["tasks"] = r.tasks;
        row["horizon_s"] = r.horizon;
        row["steps_per_hr"] = r.steps_per_hour;
        row["rollout_util_pct"] = to_percent(r.rollout_util);
        row["mean_jct_s"] = r.mean_jct ? nlohmann::ordered_json(*r.mean_jct) : nlohmann::ordered_json(nullptr);
        row["speedup"] = r.speedup;
        row["util_ratio"] = r.util_ratio;
        j["rows"].push_back(std::move(row));
    }
    return j;
}

inline std::string headline_table(const ComparisonReport& c) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %-16s %10s %12s %10s %10s %9s\n", "scheduler", "point", "steps/hr",
                  "horizon_s", "roll_util%", "mean_jct_s", "speedup");
    out += buf;
    for (const auto& r : c.rows) {
        const std::string point = r.point ? r.point->param + "=" + format_number(r.point->value) : "-";
        std::snprintf(buf, sizeof buf, "%-28s %-16s %10.2f %12.2f %10s %10s %9.3f\n", r.scheduler.c_str(),
                      point.c_str(), r.steps_per_hour, r.horizon, format_percent(r.rollout_util).c_str(),
                      r.mean_jct ? format_number(std::round(*r.mean_jct * 100.0) / 100.0).c_str() : "-", r.speedup);
        out += buf;
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline void write_run_artifacts(const RunOutcome& o, const std::filesystem::path& root, TimelineFormat timeline) {
    const auto dir = root / o.subdir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    write_file(dir / "trace.ndjson", serialize_trace(o.trace));
    write_file(dir / "report.json", export_report(o.report, ReportFormat::json));
    write_file(dir / "report_tasks.csv", export_report(o.report, ReportFormat::csv, CsvTable::tasks));
    write_file(dir / "report_pools.csv", export_report(o.report, ReportFormat::csv, CsvTable::pools));
    write_file(dir / "report_summary.csv", export_report(o.report, ReportFormat::csv, CsvTable::summary));
    write_file(dir / (timeline == TimelineFormat::svg ? "timeline.svg" : "timeline.txt"),
               export_timeline(o.trace, timeline));
}

// Simulates, then writes everything. Nothing touches the disk until all runs
// succeeded, so a failed request leaves no partial artifacts behind.
inline ComparisonReport compare_schedulers(const RunRequest& req, const std::vector<SchedulerChoice>& schedulers,
                                           std::ostream& out) {
    if (schedulers.empty()) throw ValidationError("no schedulers given");
    const auto runs = execute_runs(req, schedulers);
    const auto report = build_comparison(runs, schedulers);
    for (const auto& o : runs) write_run_artifacts(o, req.output_dir, req.timeline);
    write_file(req.output_dir / "comparison.csv", comparison_csv(report));
    write_file(req.output_dir / "comparison.json", comparison_json(report).dump(2) + "\n");
    out << headline_table(report);
    return report;
}

inline std::vector<SchedulerChoice> request_schedulers(const RunRequest& req, const Scenario& base) {
    if (!req.scheduler) return {base.scheduler};
    const auto choice = parse_scheduler_label(*req.scheduler);
    if (!choice) throw ValidationError("unknown scheduler '" + *req.scheduler + "'");
    return {*choice};
}

inline ComparisonReport run_scenario(const RunRequest& req, std::ostream& out) {
    const auto base = load_scenario(read_scenario_text(req.scenario_path));
    return compare_schedulers(req, request_schedulers(req, base), out);
}

inline ExitCode exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return ExitCode::parse;
    if (dynamic_cast<const Deadlock*>(&e)) return ExitCode::deadlock;
    if (dynamic_cast<const IoError*>(&e)) return ExitCode::io;
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const InvalidParams*>(&e) ||
        dynamic_cast<const DuplicateTask*>(&e) || dynamic_cast<const TaskTooLarge*>(&e)) {
        return ExitCode::validation;
    }
    return ExitCode::usage;
}

}  // namespace marlsim
