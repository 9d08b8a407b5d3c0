#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "marlsim/cluster.hpp"
#include "marlsim/errors.hpp"
#include "marlsim/workload.hpp"

namespace marlsim {

enum class AdmissionResult { admitted, queued };

// KV-cache gate for the rollout engine. A task joins only if the summed
// footprint of admitted tasks stays within budget; the rest wait in FIFO.
struct AdmissionState {
    std::map<std::string, std::int64_t> admitted;  // task -> footprint
    std::deque<std::pair<std::string, std::int64_t>> pending;
    std::int64_t current_kv_usage = 0;

    bool is_admitted(const std::string& task_id) const { return admitted.contains(task_id); }
};

inline AdmissionResult admit(const std::string& task_id, std::int64_t footprint, AdmissionState& state,
                             std::int64_t budget) {
    if (state.is_admitted(task_id)) throw ValidationError("task '" + task_id + "' is already admitted");
    if (footprint > budget) {
        throw TaskTooLarge("task '" + task_id + "' needs " + std::to_string(footprint) + " KV bytes, budget is " +
                           std::to_string(budget));
    }
    if (state.current_kv_usage + footprint <= budget) {
        state.admitted.emplace(task_id, footprint);
        state.current_kv_usage += footprint;
        return AdmissionResult::admitted;
    }
    state.pending.emplace_back(task_id, footprint);
    return AdmissionResult::queued;
}

inline AdmissionResult admit(const TaskSpec& task, const ModelProfile& profile, AdmissionState& state,
                             std::int64_t budget) {
    return admit(task.task_id, kv_footprint(task, profile), state, budget);
}

inline void release(const std::string& task_id, AdmissionState& state) {
    auto it = state.admitted.find(task_id);
    if (it == state.admitted.end()) return;
    state.current_kv_usage -= it->second;
    state.admitted.erase(it);
}

// Walks the pending queue in FIFO order and admits every task that now
// fits; tasks that still do not fit keep their place.
inline std::vector<std::string> rescan(AdmissionState& state, std::int64_t budget) {
    std::vector<std::string> newly;
    std::deque<std::pair<std::string, std::int64_t>> still;
    for (auto& [id, footprint] : state.pending) {
        if (state.current_kv_usage + footprint <= budget) {
            state.admitted.emplace(id, footprint);
            state.current_kv_usage += footprint;
            newly.push_back(id);
        } else {
            still.emplace_back(std::move(id), footprint);
        }
    }
    state.pending = std::move(still);
    return newly;
}

}  // namespace marlsim
