#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "marlsim/marlsim.hpp"

namespace testing_support {

using namespace marlsim;

inline ModelProfile tiny_model(std::int64_t cap = 100) {
    ModelProfile m;
    m.name = "m";
    m.num_layers = 1;
    m.num_kv_heads = 1;
    m.head_dim = 1;
    m.kv_dtype_bytes = 1;
    m.per_batch_peak_decode_rate = cap;
    return m;
}

inline TaskSpec seconds_task(const std::string& id, double rollout, double train, std::int64_t steps = 1,
                             double submit = 0.0) {
    TaskSpec t;
    t.task_id = id;
    t.submit_time = submit;
    t.total_steps = steps;
    t.batch_size = 1;
    t.prompt_len = 1;
    t.max_gen_len = 1;
    t.rollout_unit = RolloutUnit::seconds;
    t.rollout_model = LatencyModel::fixed(rollout);
    t.train_step_latency_model = LatencyModel::fixed(train);
    t.model_profile_id = "m";
    assign_streams(t);
    return t;
}

inline TaskSpec token_task(const std::string& id, double tokens, double train, std::int64_t steps = 1,
                           double submit = 0.0) {
    TaskSpec t = seconds_task(id, 1.0, train, steps, submit);
    t.rollout_unit = RolloutUnit::tokens;
    t.rollout_model = LatencyModel::fixed(tokens);
    assign_streams(t);
    return t;
}

inline Scenario make_scenario(std::vector<TaskSpec> tasks, SchedulerKind kind = SchedulerKind::marlaas,
                              double pool_rate = 1000.0, std::int64_t cap = 100) {
    Scenario s;
    s.name = "unit";
    s.models.emplace("m", tiny_model(cap));
    s.cluster.rollout_devices = 6;
    s.cluster.train_devices = 2;
    s.cluster.rollout_pool_token_rate = pool_rate;
    s.cluster.kv_budget_bytes = std::int64_t{1} << 40;
    s.scheduler.kind = kind;
    s.tasks = std::move(tasks);
    return s;
}

inline std::vector<SimEvent> records_of(const TraceLog& trace, EventKind kind, const std::string& task = {}) {
    std::vector<SimEvent> out;
    for (const auto& e : trace.records)
        if (e.kind == kind && (task.empty() || e.task == task)) out.push_back(e);
    return out;
}

// Small random workloads for property checks.
inline Scenario random_scenario(std::mt19937_64& gen, SchedulerChoice choice) {
    std::uniform_int_distribution<int> n_tasks(1, 5), steps(1, 4), tools(0, 2), bs(1, 8), len(1, 64);
    std::uniform_real_distribution<double> tokens(50, 2000), secs(0.5, 20), train(0.1, 5), submit(0, 30), rate(80, 600);
    std::bernoulli_distribution coin(0.5);
    std::vector<TaskSpec> tasks;
    const int n = n_tasks(gen);
    for (int i = 0; i < n; ++i) {
        const std::string id = "t" + std::to_string(i);
        TaskSpec t = coin(gen) ? token_task(id, tokens(gen), train(gen), steps(gen), coin(gen) ? 0.0 : submit(gen))
                               : seconds_task(id, secs(gen), train(gen), steps(gen), coin(gen) ? 0.0 : submit(gen));
        t.batch_size = bs(gen);
        t.prompt_len = len(gen);
        t.max_gen_len = len(gen);
        if (coin(gen)) t.rollout_model = LatencyModel::uniform(t.rollout_model.first * 0.5, t.rollout_model.first * 1.5);
        if (coin(gen)) t.train_step_latency_model = LatencyModel::lognormal(std::log(train(gen)), 0.4);
        t.tool_calls_per_episode = tools(gen);
        t.tool_latency_model = LatencyModel::uniform(0.1, 2.0);
        assign_streams(t);
        tasks.push_back(std::move(t));
    }
    Scenario s = make_scenario(std::move(tasks), choice.kind, rate(gen), 100);
    s.scheduler = choice;
    std::int64_t largest = 0, total = 0;
    for (const auto& t : s.tasks) {
        const auto f = kv_footprint(t, s.profile(t));
        largest = std::max(largest, f);
        total += f;
    }
    std::uniform_int_distribution<std::int64_t> budget(largest, std::max(largest, total));
    s.cluster.kv_budget_bytes = budget(gen);
    s.seed = gen();
    return s;
}

inline std::vector<SchedulerChoice> all_scheduler_choices() {
    std::vector<SchedulerChoice> out;
    for (auto k : kAllSchedulers) out.push_back({k});
    out.push_back({SchedulerKind::marlaas, true, false, std::nullopt});
    out.push_back({SchedulerKind::marlaas, false, true, std::nullopt});
    return out;
}

}  // namespace testing_support
