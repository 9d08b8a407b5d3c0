#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "marlsim/errors.hpp"
#include "marlsim/rng.hpp"

namespace marlsim {

enum class LatencyKind { deterministic, uniform, lognormal };

inline std::string_view to_string(LatencyKind kind) {
    switch (kind) {
        case LatencyKind::deterministic: return "deterministic";
        case LatencyKind::uniform: return "uniform";
        case LatencyKind::lognormal: return "lognormal";
    }
    return "?";
}

// A positive random quantity. Durations are seconds; for rollout cost in
// token mode the same model is read as a decode-token count.
//   deterministic: first = mean
//   uniform:       first = lo, second = hi
//   lognormal:     first = mu, second = sigma (of the natural log)
struct LatencyModel {
    LatencyKind kind = LatencyKind::deterministic;
    double first = 1.0;
    double second = 0.0;
    std::uint64_t rng_stream_id = 0;

    static LatencyModel fixed(double mean, std::uint64_t stream = 0) {
        return {LatencyKind::deterministic, mean, 0.0, stream};
    }
    static LatencyModel uniform(double lo, double hi, std::uint64_t stream = 0) {
        return {LatencyKind::uniform, lo, hi, stream};
    }
    static LatencyModel lognormal(double mu, double sigma, std::uint64_t stream = 0) {
        return {LatencyKind::lognormal, mu, sigma, stream};
    }

    // Expected value of the distribution.
    double mean() const {
        switch (kind) {
            case LatencyKind::deterministic: return first;
            case LatencyKind::uniform: return 0.5 * (first + second);
            case LatencyKind::lognormal: return std::exp(first + 0.5 * second * second);
        }
        return first;
    }

    bool operator==(const LatencyModel&) const = default;
};

inline void validate(const LatencyModel& model) {
    const auto finite = [](double v) { return std::isfinite(v); };
    switch (model.kind) {
        case LatencyKind::deterministic:
            if (!finite(model.first) || model.first <= 0.0) throw InvalidParams("deterministic mean must be > 0");
            break;
        case LatencyKind::uniform:
            if (!finite(model.first) || !finite(model.second)) throw InvalidParams("uniform bounds must be finite");
            if (model.first > model.second) throw InvalidParams("uniform lo > hi");
            if (model.first <= 0.0) throw InvalidParams("uniform lo must be > 0");
            break;
        case LatencyKind::lognormal:
            if (!finite(model.first) || !finite(model.second)) throw InvalidParams("lognormal params must be finite");
            if (model.second < 0.0) throw InvalidParams("lognormal sigma < 0");
            break;
    }
}

// Draws one value. Only the model's own stream advances; deterministic
// models draw nothing.
inline double sample_latency(const LatencyModel& model, SeededRngState& rng) {
    validate(model);
    double value = model.first;
    switch (model.kind) {
        case LatencyKind::deterministic: break;
        case LatencyKind::uniform:
            value = model.first + (model.second - model.first) * rng.uniform01(model.rng_stream_id);
            break;
        case LatencyKind::lognormal:
            value = std::exp(model.first + model.second * rng.standard_normal(model.rng_stream_id));
            break;
    }
    if (!std::isfinite(value) || value <= 0.0) {
        throw InvalidParams("latency sample is not a positive finite value");
    }
    return value;
}

struct ModelProfile {
    std::string name;
    std::int64_t num_layers = 1;
    std::int64_t num_kv_heads = 1;
    std::int64_t head_dim = 1;
    std::int64_t kv_dtype_bytes = 2;
    // Decode tokens/second a single batch can reach on its own.
    std::int64_t per_batch_peak_decode_rate = 1;

    std::int64_t per_token_kv_bytes() const { return 2 * num_layers * num_kv_heads * head_dim * kv_dtype_bytes; }
};

inline void validate(const ModelProfile& profile) {
    if (profile.name.empty()) throw ValidationError("model profile needs a name");
    if (profile.num_layers <= 0 || profile.num_kv_heads <= 0 || profile.head_dim <= 0 ||
        profile.kv_dtype_bytes <= 0 || profile.per_batch_peak_decode_rate <= 0) {
        throw ValidationError("model profile '" + profile.name + "': all sizes and rates must be positive");
    }
}

// How rollout cost is expressed. Token mode competes for pool throughput;
// seconds mode replays measured latencies without contention.
enum class RolloutUnit { tokens, seconds };

struct TaskSpec {
    std::string task_id;
    double submit_time = 0.0;
    std::int64_t total_steps = 1;
    std::int64_t batch_size = 1;
    std::int64_t prompt_len = 0;
    std::int64_t max_gen_len = 1;
    RolloutUnit rollout_unit = RolloutUnit::tokens;
    // Decode tokens per rollout batch (token mode) or rollout seconds.
    LatencyModel rollout_model = LatencyModel::fixed(1.0);
    // Tool calls split the rollout into tool_calls_per_episode + 1 segments.
    std::int64_t tool_calls_per_episode = 0;
    LatencyModel tool_latency_model = LatencyModel::fixed(1.0);
    LatencyModel train_step_latency_model = LatencyModel::fixed(1.0);
    std::string model_profile_id;

    bool agentic() const { return tool_calls_per_episode > 0; }
};

inline void validate(const TaskSpec& task) {
    const auto fail = [&](const std::string& what) { throw ValidationError("task '" + task.task_id + "': " + what); };
    if (task.task_id.empty()) throw ValidationError("task id must be non-empty");
    if (!std::isfinite(task.submit_time) || task.submit_time < 0.0) fail("submit_time must be >= 0");
    if (task.total_steps < 1) fail("total_steps must be >= 1");
    if (task.batch_size < 1) fail("batch_size must be >= 1");
    if (task.prompt_len < 0 || task.max_gen_len < 0) fail("lengths must be >= 0");
    if (task.prompt_len + task.max_gen_len <= 0) fail("prompt_len + max_gen_len must be > 0");
    if (task.tool_calls_per_episode < 0) fail("tool_calls_per_episode must be >= 0");
    if (task.model_profile_id.empty()) fail("model profile reference missing");
    try {
        validate(task.rollout_model);
        validate(task.tool_latency_model);
        validate(task.train_step_latency_model);
    } catch (const InvalidParams& e) {
        fail(e.what());
    }
}

}  // namespace marlsim
