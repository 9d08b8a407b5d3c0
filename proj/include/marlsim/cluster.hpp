#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "marlsim/errors.hpp"
#include "marlsim/workload.hpp"

namespace marlsim {

enum class Layout { disaggregated, collocated };

inline std::string_view to_string(Layout layout) {
    return layout == Layout::collocated ? "collocated" : "disaggregated";
}

struct ClusterSpec {
    // In collocated mode these are the dedicated pool sizes a phase would
    // get on a split layout; the shared pool has their sum.
    std::int64_t rollout_devices = 1;
    std::int64_t train_devices = 1;
    double rollout_pool_token_rate = 1.0;
    std::int64_t kv_budget_bytes = 1;
    Layout collocation_mode = Layout::disaggregated;
    double weight_commit_latency = 0.0;

    std::int64_t total_devices() const { return rollout_devices + train_devices; }
};

inline void validate(const ClusterSpec& c) {
    if (c.rollout_devices < 1 || c.train_devices < 1) throw ValidationError("cluster needs >= 1 rollout and train device");
    if (!std::isfinite(c.rollout_pool_token_rate) || c.rollout_pool_token_rate <= 0.0) {
        throw ValidationError("rollout_pool_token_rate must be > 0");
    }
    if (c.kv_budget_bytes <= 0) throw ValidationError("kv_budget_bytes must be > 0");
    if (!std::isfinite(c.weight_commit_latency) || c.weight_commit_latency < 0.0) {
        throw ValidationError("weight_commit_latency must be >= 0");
    }
}

// batch_size x (prompt_len + max_gen_len) x per-token KV bytes, where a token
// stores one key and one value vector per layer and KV head.
inline std::int64_t kv_footprint(const TaskSpec& task, const ModelProfile& profile) {
    return task.batch_size * (task.prompt_len + task.max_gen_len) * profile.per_token_kv_bytes();
}

enum class PoolId { rollout, train, env, shared };

inline std::string_view to_string(PoolId id) {
    switch (id) {
        case PoolId::rollout: return "rollout";
        case PoolId::train: return "train";
        case PoolId::env: return "env";
        case PoolId::shared: return "shared";
    }
    return "?";
}

inline std::optional<PoolId> pool_from_string(std::string_view s) {
    if (s == "rollout") return PoolId::rollout;
    if (s == "train") return PoolId::train;
    if (s == "env") return PoolId::env;
    if (s == "shared") return PoolId::shared;
    return std::nullopt;
}

struct BusyInterval {
    double start = 0.0;
    double end = 0.0;
    double devices = 0.0;
};

// Busy device-second accounting for one pool. Exclusive pools hold whole
// jobs that may not overlap; shared pools take fractional device shares.
class ResourcePool {
public:
    ResourcePool(PoolId id, std::int64_t device_count, bool exclusive)
        : id_(id), device_count_(device_count), exclusive_(exclusive) {}

    PoolId id() const { return id_; }
    std::int64_t device_count() const { return device_count_; }
    bool exclusive() const { return exclusive_; }

    void record_busy(double start, double end, double devices) {
        if (!(end >= start)) throw InvalidParams("busy interval ends before it starts");
        if (devices < 0.0 || devices > static_cast<double>(device_count_) * (1.0 + 1e-12)) {
            throw InvalidParams("device share outside [0, device_count] for pool " + std::string(to_string(id_)));
        }
        if (exclusive_ && end > start) {
            auto next = exclusive_spans_.lower_bound(start);
            if (next != exclusive_spans_.end() && next->first < end) {
                throw OverlapError("pool " + std::string(to_string(id_)) + " double-booked");
            }
            if (next != exclusive_spans_.begin()) {
                auto prev = std::prev(next);
                if (prev->second > start) throw OverlapError("pool " + std::string(to_string(id_)) + " double-booked");
            }
            exclusive_spans_.emplace(start, end);
        }
        intervals_.push_back({start, end, devices});
        busy_ += (end - start) * devices;
    }

    double busy_device_seconds() const { return busy_; }
    double idle_device_seconds(double horizon) const { return capacity(horizon) - busy_; }
    double capacity(double horizon) const { return static_cast<double>(device_count_) * horizon; }
    double utilization(double horizon) const { return horizon > 0.0 ? busy_ / capacity(horizon) : 0.0; }
    const std::vector<BusyInterval>& intervals() const { return intervals_; }

    int current_active_jobs = 0;

private:
    PoolId id_;
    std::int64_t device_count_;
    bool exclusive_;
    double busy_ = 0.0;
    std::vector<BusyInterval> intervals_;
    std::map<double, double> exclusive_spans_;
};

// Processor sharing with a per-batch cap: each of n active batches decodes at
// min(cap, pool_rate / n). Rates are piecewise constant between membership
// changes, so completion times follow from exact integration.
class ProcessorSharingPool {
public:
    struct Batch {
        std::string key;
        double remaining = 0.0;
        double cap = 0.0;
        double rate = 0.0;
    };

    explicit ProcessorSharingPool(double pool_rate) : pool_rate_(pool_rate) {}

    double pool_rate() const { return pool_rate_; }
    double now() const { return now_; }
    std::size_t size() const { return batches_.size(); }
    bool empty() const { return batches_.empty(); }
    const std::vector<Batch>& batches() const { return batches_; }

    // Integrates current rates up to `t`.
    void advance(double t) {
        const double dt = t - now_;
        if (dt > 0.0) {
            for (auto& b : batches_) b.remaining = std::max(0.0, b.remaining - b.rate * dt);
        }
        now_ = std::max(now_, t);
    }

    void add(std::string key, double tokens, double cap, double t) {
        advance(t);
        batches_.push_back({std::move(key), tokens, cap, 0.0});
        recompute();
    }

    void remove(std::string_view key, double t) {
        advance(t);
        std::erase_if(batches_, [&](const Batch& b) { return b.key == key; });
        recompute();
    }

    void recompute() {
        if (batches_.empty()) return;
        const double fair = pool_rate_ / static_cast<double>(batches_.size());
        for (auto& b : batches_) b.rate = std::min(b.cap, fair);
    }

    double delivered_rate() const {
        double total = 0.0;
        for (const auto& b : batches_) total += b.rate;
        return total;
    }

    const Batch* find(std::string_view key) const {
        for (const auto& b : batches_)
            if (b.key == key) return &b;
        return nullptr;
    }

    double completion_time(std::string_view key) const {
        const Batch* b = find(key);
        if (!b || b->rate <= 0.0) return std::numeric_limits<double>::infinity();
        return now_ + b->remaining / b->rate;
    }

    // Earliest finisher; ties resolve to the earliest-added batch.
    std::optional<std::pair<std::string, double>> next_completion() const {
        std::optional<std::pair<std::string, double>> best;
        for (const auto& b : batches_) {
            const double t = completion_time(b.key);
            if (!best || t < best->second) best = {b.key, t};
        }
        return best;
    }

private:
    double pool_rate_;
    double now_ = 0.0;
    std::vector<Batch> batches_;
};

struct RolloutRequest {
    std::string key;
    double tokens = 0.0;
    double cap = 0.0;
    double arrival = 0.0;
};

struct RolloutCompletion {
    std::string key;
    double finish = 0.0;
};

// Completion schedule for a set of decode batches sharing one rollout pool.
// Output is ordered by finish time.
inline std::vector<RolloutCompletion> rollout_service_time(std::vector<RolloutRequest> requests, double pool_rate) {
    for (const auto& r : requests) {
        if (!(r.tokens > 0.0)) throw InvalidParams("batch '" + r.key + "' has no remaining tokens");
        if (!(r.cap > 0.0)) throw InvalidParams("batch '" + r.key + "' has no decode cap");
    }
    std::stable_sort(requests.begin(), requests.end(),
                     [](const RolloutRequest& a, const RolloutRequest& b) { return a.arrival < b.arrival; });
    ProcessorSharingPool pool(pool_rate);
    std::vector<RolloutCompletion> out;
    std::size_t next = 0;
    while (next < requests.size() || !pool.empty()) {
        const auto done = pool.next_completion();
        if (next < requests.size() && (!done || requests[next].arrival < done->second)) {
            const auto& r = requests[next++];
            pool.add(r.key, r.tokens, r.cap, r.arrival);
        } else {
            out.push_back({done->first, done->second});
            pool.remove(done->first, done->second);
        }
    }
    return out;
}

inline std::vector<RolloutCompletion> rollout_service_time(const std::vector<RolloutRequest>& requests,
                                                           const ClusterSpec& cluster) {
    return rollout_service_time(requests, cluster.rollout_pool_token_rate);
}

}  // namespace marlsim
