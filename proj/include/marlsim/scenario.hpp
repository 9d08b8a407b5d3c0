#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "marlsim/cluster.hpp"
#include "marlsim/errors.hpp"
#include "marlsim/rng.hpp"
#include "marlsim/scheduler_choice.hpp"
#include "marlsim/workload.hpp"

namespace marlsim {

struct Scenario {
    std::string name = "scenario";
    std::vector<TaskSpec> tasks;
    std::map<std::string, ModelProfile> models;
    ClusterSpec cluster;
    SchedulerChoice scheduler;
    std::uint64_t seed = 0;

    const ModelProfile& profile(const TaskSpec& task) const {
        auto it = models.find(task.model_profile_id);
        if (it == models.end()) throw ValidationError("task '" + task.task_id + "' references unknown model");
        return it->second;
    }
};

inline void validate(const Scenario& s) {
    validate(s.cluster);
    if (s.scheduler.kv_budget_override && *s.scheduler.kv_budget_override <= 0) {
        throw ValidationError("kv_budget_override must be > 0");
    }
    for (const auto& [name, m] : s.models) validate(m);
    std::set<std::string> ids;
    for (const auto& t : s.tasks) {
        validate(t);
        if (!ids.insert(t.task_id).second) throw ValidationError("duplicate task_id '" + t.task_id + "'");
        (void)s.profile(t);
    }
}

// Parses "deterministic(m)", "uniform(lo, hi)" or "lognormal(mu, sigma)".
inline LatencyModel parse_latency_model(std::string_view text, std::uint64_t stream) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        throw InvalidParams("latency model must look like kind(args)");
    }
    std::string kind(text.substr(0, open));
    while (!kind.empty() && std::isspace(static_cast<unsigned char>(kind.back()))) kind.pop_back();
    std::vector<double> args;
    std::string_view rest = text.substr(open + 1, close - open - 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view arg = rest.substr(0, comma);
        while (!arg.empty() && std::isspace(static_cast<unsigned char>(arg.front()))) arg.remove_prefix(1);
        while (!arg.empty() && std::isspace(static_cast<unsigned char>(arg.back()))) arg.remove_suffix(1);
        double v = 0.0;
        auto res = std::from_chars(arg.data(), arg.data() + arg.size(), v);
        if (res.ec != std::errc{} || res.ptr != arg.data() + arg.size()) {
            throw InvalidParams("bad latency argument '" + std::string(arg) + "'");
        }
        args.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    LatencyModel model;
    if (kind == "deterministic" && args.size() == 1) model = LatencyModel::fixed(args[0], stream);
    else if (kind == "uniform" && args.size() == 2) model = LatencyModel::uniform(args[0], args[1], stream);
    else if (kind == "lognormal" && args.size() == 2) model = LatencyModel::lognormal(args[0], args[1], stream);
    else throw InvalidParams("unknown latency model '" + std::string(text) + "'");
    validate(model);
    return model;
}

inline std::string format_latency_model(const LatencyModel& m) {
    std::ostringstream out;
    out.precision(17);
    out << to_string(m.kind) << '(' << m.first;
    if (m.kind != LatencyKind::deterministic) out << ", " << m.second;
    out << ')';
    return out.str();
}

namespace detail {

using ConfigValue = std::variant<std::string, std::int64_t, double, bool>;

struct ConfigEntry {
    ConfigValue value;
    std::size_t line = 0;
};

struct ConfigTable {
    std::string section;
    std::size_t line = 0;
    std::map<std::string, ConfigEntry> entries;
};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Strips a trailing comment, respecting quoted strings.
inline std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

inline ConfigValue parse_value(std::string_view raw, std::size_t line, const std::string& key) {
    if (raw.empty()) throw ParseError(line, key, "missing value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') throw ParseError(line, key, "unterminated string");
        std::string out;
        for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
            if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
            out += raw[i];
        }
        return out;
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    std::string digits;
    for (char c : raw)
        if (c != '_') digits += c;
    const char* first = digits.data();
    const char* last = digits.data() + digits.size();
    if (digits.find_first_of(".eE") == std::string::npos || digits.find("inf") != std::string::npos) {
        std::int64_t i = 0;
        auto res = std::from_chars(first, last, i);
        if (res.ec == std::errc{} && res.ptr == last) return i;
    }
    double d = 0.0;
    auto res = std::from_chars(first, last, d);
    if (res.ec == std::errc{} && res.ptr == last) return d;
    throw ParseError(line, key, "cannot parse value '" + std::string(raw) + "'");
}

inline std::vector<ConfigTable> parse_tables(std::string_view text) {
    std::vector<ConfigTable> tables(1);
    tables[0].section = "";
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            const bool array = line.starts_with("[[");
            const std::string_view close = array ? "]]" : "]";
            if (!line.ends_with(close)) throw ParseError(lineno, "", "malformed section header");
            std::string name(trim(line.substr(array ? 2 : 1, line.size() - (array ? 4 : 2))));
            const bool known = array ? (name == "task" || name == "model") : (name == "cluster" || name == "scheduler");
            if (!known) throw ParseError(lineno, name, "unknown section");
            if (!array) {
                for (const auto& t : tables)
                    if (t.section == name) throw ParseError(lineno, name, "section repeated");
            }
            tables.push_back({name, lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "", "expected key = value");
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError(lineno, "", "empty key");
        auto& table = tables.back();
        if (table.entries.contains(key)) throw ParseError(lineno, key, "duplicate key");
        table.entries.emplace(key, ConfigEntry{parse_value(trim(line.substr(eq + 1)), lineno, key), lineno});
    }
    return tables;
}

class TableReader {
public:
    explicit TableReader(const ConfigTable& table) : table_(table) {}

    bool has(const std::string& key) const { return table_.entries.contains(key); }

    std::string str(const std::string& key) { return take<std::string>(key, "a string"); }
    bool boolean(const std::string& key) { return take<bool>(key, "true/false"); }

    std::int64_t integer(const std::string& key) {
        const auto& e = entry(key);
        if (const auto* i = std::get_if<std::int64_t>(&e.value)) return *i;
        throw ParseError(e.line, key, "expected an integer");
    }

    double number(const std::string& key) {
        const auto& e = entry(key);
        if (const auto* i = std::get_if<std::int64_t>(&e.value)) return static_cast<double>(*i);
        if (const auto* d = std::get_if<double>(&e.value)) return *d;
        throw ParseError(e.line, key, "expected a number");
    }

    LatencyModel latency(const std::string& key, std::uint64_t stream) {
        const std::size_t line = entry(key).line;
        const std::string text = str(key);
        try {
            return parse_latency_model(text, stream);
        } catch (const InvalidParams& e) {
            throw ParseError(line, key, e.what());
        }
    }

    // Every key must have been consumed.
    void finish() const {
        for (const auto& [key, e] : table_.entries) {
            if (!used_.contains(key)) {
                throw ParseError(e.line, key, "unknown key in [" + (table_.section.empty() ? "top" : table_.section) + "]");
            }
        }
    }

    std::size_t line() const { return table_.line; }

private:
    const ConfigEntry& entry(const std::string& key) {
        auto it = table_.entries.find(key);
        if (it == table_.entries.end()) throw ParseError(table_.line, key, "missing required key");
        used_.insert(key);
        return it->second;
    }

    template <class T>
    T take(const std::string& key, const char* expected) {
        const auto& e = entry(key);
        if (const auto* v = std::get_if<T>(&e.value)) return *v;
        throw ParseError(e.line, key, std::string("expected ") + expected);
    }

    const ConfigTable& table_;
    std::set<std::string> used_;
};

inline std::uint64_t stream_for(const std::string& task_id, std::string_view purpose) {
    return fnv1a64(task_id + "/" + std::string(purpose));
}

}  // namespace detail

// Re-derives per-task RNG stream ids from task ids (needed after renaming).
inline void assign_streams(TaskSpec& t) {
    t.rollout_model.rng_stream_id = detail::stream_for(t.task_id, "rollout");
    t.tool_latency_model.rng_stream_id = detail::stream_for(t.task_id, "tool");
    t.train_step_latency_model.rng_stream_id = detail::stream_for(t.task_id, "train");
}

// Reads a scenario document:
//
//   name = "demo"              # optional
//   seed = 7                   # optional, default 0
//   [cluster]    rollout_devices, train_devices, rollout_pool_token_rate,
//                kv_budget_bytes, collocation_mode, weight_commit_latency,
//                total_devices (optional, must equal rollout + train)
//   [scheduler]  kind, disable_async, disable_multi_lora, kv_budget_override
//   [[model]]    name, num_layers, num_kv_heads, head_dim, kv_dtype_bytes,
//                per_batch_peak_decode_rate
//   [[task]]     id, model, total_steps, batch_size, prompt_len, max_gen_len,
//                rollout_tokens | rollout_seconds, train_step_latency,
//                tool_calls_per_episode, tool_latency, submit_time,
//                replicas, submit_interval
inline Scenario load_scenario(std::string_view text) {
    using detail::TableReader;
    const auto tables = detail::parse_tables(text);
    Scenario s;
    bool have_cluster = false;
    for (const auto& table : tables) {
        TableReader r(table);
        if (table.section.empty()) {
            if (r.has("name")) s.name = r.str("name");
            if (r.has("seed")) {
                const auto seed = r.integer("seed");
                if (seed < 0) throw ParseError(table.line, "seed", "seed must be >= 0");
                s.seed = static_cast<std::uint64_t>(seed);
            }
        } else if (table.section == "cluster") {
            have_cluster = true;
            auto& c = s.cluster;
            c.rollout_devices = r.integer("rollout_devices");
            c.train_devices = r.integer("train_devices");
            c.rollout_pool_token_rate = r.number("rollout_pool_token_rate");
            c.kv_budget_bytes = r.integer("kv_budget_bytes");
            if (r.has("collocation_mode")) {
                const auto mode = r.str("collocation_mode");
                if (mode == "collocated") c.collocation_mode = Layout::collocated;
                else if (mode == "disaggregated") c.collocation_mode = Layout::disaggregated;
                else throw ParseError(table.line, "collocation_mode", "expected disaggregated or collocated");
            }
            if (r.has("weight_commit_latency")) c.weight_commit_latency = r.number("weight_commit_latency");
            if (r.has("total_devices") && r.integer("total_devices") != c.total_devices()) {
                throw ValidationError("total_devices must equal rollout_devices + train_devices");
            }
        } else if (table.section == "scheduler") {
            const auto kind_name = r.str("kind");
            const auto kind = scheduler_from_string(kind_name);
            if (!kind) throw ParseError(table.line, "kind", "unknown scheduler '" + kind_name + "'");
            s.scheduler.kind = *kind;
            if (r.has("disable_async")) s.scheduler.disable_async = r.boolean("disable_async");
            if (r.has("disable_multi_lora")) s.scheduler.disable_multi_lora = r.boolean("disable_multi_lora");
            if (r.has("kv_budget_override")) s.scheduler.kv_budget_override = r.integer("kv_budget_override");
            if ((s.scheduler.disable_async || s.scheduler.disable_multi_lora) && *kind != SchedulerKind::marlaas) {
                throw ValidationError("ablation flags apply to the marlaas scheduler only");
            }
        } else if (table.section == "model") {
            ModelProfile m;
            m.name = r.str("name");
            m.num_layers = r.integer("num_layers");
            m.num_kv_heads = r.integer("num_kv_heads");
            m.head_dim = r.integer("head_dim");
            m.kv_dtype_bytes = r.integer("kv_dtype_bytes");
            m.per_batch_peak_decode_rate = r.integer("per_batch_peak_decode_rate");
            if (s.models.contains(m.name)) throw ValidationError("duplicate model '" + m.name + "'");
            s.models.emplace(m.name, m);
        } else if (table.section == "task") {
            TaskSpec t;
            const std::string id = r.str("id");
            t.task_id = id;
            t.model_profile_id = r.str("model");
            t.total_steps = r.integer("total_steps");
            t.batch_size = r.integer("batch_size");
            t.prompt_len = r.integer("prompt_len");
            t.max_gen_len = r.integer("max_gen_len");
            if (r.has("rollout_tokens") == r.has("rollout_seconds")) {
                throw ParseError(table.line, "rollout_tokens", "exactly one of rollout_tokens / rollout_seconds");
            }
            if (r.has("rollout_tokens")) {
                t.rollout_unit = RolloutUnit::tokens;
                t.rollout_model = r.latency("rollout_tokens", 0);
            } else {
                t.rollout_unit = RolloutUnit::seconds;
                t.rollout_model = r.latency("rollout_seconds", 0);
            }
            t.train_step_latency_model = r.latency("train_step_latency", 0);
            if (r.has("tool_calls_per_episode")) t.tool_calls_per_episode = r.integer("tool_calls_per_episode");
            if (r.has("tool_latency")) t.tool_latency_model = r.latency("tool_latency", 0);
            else if (t.tool_calls_per_episode > 0) throw ParseError(table.line, "tool_latency", "required with tool calls");
            if (r.has("submit_time")) t.submit_time = r.number("submit_time");
            std::int64_t replicas = 1;
            double interval = 0.0;
            if (r.has("replicas")) replicas = r.integer("replicas");
            if (r.has("submit_interval")) interval = r.number("submit_interval");
            if (replicas < 1) throw ValidationError("task '" + id + "': replicas must be >= 1");
            if (interval < 0.0) throw ValidationError("task '" + id + "': submit_interval must be >= 0");
            for (std::int64_t k = 0; k < replicas; ++k) {
                TaskSpec copy = t;
                if (replicas > 1) copy.task_id = id + "-" + std::to_string(k);
                copy.submit_time = t.submit_time + interval * static_cast<double>(k);
                assign_streams(copy);
                s.tasks.push_back(std::move(copy));
            }
        }
        r.finish();
    }
    if (!have_cluster) throw ValidationError("scenario needs a [cluster] section");
    if (s.tasks.empty()) throw ValidationError("scenario has no tasks");
    validate(s);
    return s;
}

// The first n tasks of the scenario, cycling through the list (with renamed
// copies) when n exceeds it.
inline Scenario with_task_count(const Scenario& base, std::size_t n) {
    if (base.tasks.empty()) throw ValidationError("cannot resize an empty task list");
    Scenario s = base;
    s.tasks.clear();
    for (std::size_t i = 0; i < n; ++i) {
        TaskSpec t = base.tasks[i % base.tasks.size()];
        if (i >= base.tasks.size()) {
            t.task_id += "-r" + std::to_string(i / base.tasks.size());
            assign_streams(t);
        }
        s.tasks.push_back(std::move(t));
    }
    return s;
}

}  // namespace marlsim
