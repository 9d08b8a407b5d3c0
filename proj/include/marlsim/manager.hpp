#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "marlsim/errors.hpp"
#include "marlsim/rng.hpp"
#include "marlsim/workload.hpp"

namespace marlsim {

inline constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stand-in for a tensor payload (adapter weights or optimizer state). The
// checksum chains through every update, so mixing versions is detectable.
struct ParamDescriptor {
    std::string task_id;
    std::int64_t version = 0;
    std::uint64_t checksum = 0;

    bool operator==(const ParamDescriptor&) const = default;
};

struct PolicyRecord {
    std::string task_id;
    std::int64_t version = 0;
    ParamDescriptor theta;
    ParamDescriptor phi;
    double committed_at = 0.0;
    bool consumed_by_rollout = false;
};

enum class EpisodeMarker { rollout_segment, tool_call };

struct TrajectoryBatch {
    std::string task_id;
    std::int64_t version = 0;
    double token_count = 0.0;
    double generated_at = 0.0;
    std::vector<EpisodeMarker> episode_structure;
    // theta checksum of the policy that generated the batch.
    std::uint64_t policy_checksum = 0;
};

struct PolicyPayload {
    std::int64_t version = 0;
    ParamDescriptor theta;
    ParamDescriptor phi;
};

inline PolicyRecord initial_policy(const std::string& task_id, double now) {
    const std::uint64_t seed = fnv1a64(task_id);
    return PolicyRecord{task_id,
                        0,
                        {task_id, 0, mix64(seed, 0x7468657461ULL)},
                        {task_id, 0, mix64(seed, 0x706869ULL)},
                        now,
                        false};
}

// Synthetic policy update: derives version v+1 descriptors from the version-v
// record and the trajectory it generated.
inline PolicyPayload policy_update(const PolicyRecord& current, const TrajectoryBatch& trajectory) {
    if (trajectory.task_id != current.task_id || trajectory.version != current.version ||
        trajectory.policy_checksum != current.theta.checksum) {
        throw StalenessViolation("trajectory (" + trajectory.task_id + ", v" + std::to_string(trajectory.version) +
                                 ") does not match policy v" + std::to_string(current.version));
    }
    const std::uint64_t traj = mix64(trajectory.policy_checksum, static_cast<std::uint64_t>(trajectory.version));
    const std::int64_t next = current.version + 1;
    return PolicyPayload{next,
                         {current.task_id, next, mix64(current.theta.checksum, traj)},
                         {current.task_id, next, mix64(current.phi.checksum, traj)}};
}

// Versioned per-task policy store plus the global FIFO trajectory buffer.
class Manager {
public:
    void init_task(const TaskSpec& spec, double now) {
        if (tasks_.contains(spec.task_id)) throw DuplicateTask("task '" + spec.task_id + "' already registered");
        TaskState state;
        state.records.push_back(initial_policy(spec.task_id, now));
        tasks_.emplace(spec.task_id, std::move(state));
    }

    bool registered(const std::string& task_id) const { return tasks_.contains(task_id); }

    // Latest committed version if nobody has rolled it out yet; marks it
    // consumed. Older unconsumed versions are skipped for good.
    std::optional<PolicyRecord> next_policy(const std::string& task_id) {
        TaskState& s = state(task_id);
        PolicyRecord& latest = s.records.back();
        if (latest.consumed_by_rollout) return std::nullopt;
        latest.consumed_by_rollout = true;
        s.checked_out = latest.version;
        return latest;
    }

    void enqueue_trajectory(TrajectoryBatch batch) {
        TaskState& s = state(batch.task_id);
        if (!s.checked_out || *s.checked_out != batch.version) {
            throw StalenessViolation("trajectory (" + batch.task_id + ", v" + std::to_string(batch.version) +
                                     ") was not generated by the checked-out policy");
        }
        if (!s.enqueued_versions.insert(batch.version).second) {
            throw StalenessViolation("second trajectory for (" + batch.task_id + ", v" +
                                     std::to_string(batch.version) + ")");
        }
        s.checked_out.reset();
        q_buffer_.push_back(Entry{std::move(batch), next_queue_seq_++});
    }

    // Training engine side: strict FIFO over every task.
    std::optional<TrajectoryBatch> pop_trajectory() {
        if (q_buffer_.empty()) return std::nullopt;
        TrajectoryBatch head = std::move(q_buffer_.front().batch);
        q_buffer_.pop_front();
        state(head.task_id).in_training = head.version;
        return head;
    }

    PolicyRecord commit_policy(const std::string& task_id, const PolicyPayload& payload, double now) {
        TaskState& s = state(task_id);
        const std::int64_t latest = s.records.back().version;
        if (payload.version != latest + 1) {
            throw VersionGap("commit of v" + std::to_string(payload.version) + " for '" + task_id +
                             "' but latest is v" + std::to_string(latest));
        }
        if (!s.in_training || *s.in_training != latest) {
            throw StalenessViolation("commit for '" + task_id + "' without training on v" + std::to_string(latest));
        }
        s.in_training.reset();
        PolicyRecord record{task_id, payload.version, payload.theta, payload.phi, now, false};
        s.records.push_back(record);
        ++s.steps_completed;
        return record;
    }

    const PolicyRecord& latest(const std::string& task_id) const { return state(task_id).records.back(); }
    const std::vector<PolicyRecord>& records(const std::string& task_id) const { return state(task_id).records; }
    std::int64_t steps_completed(const std::string& task_id) const { return state(task_id).steps_completed; }
    std::size_t q_buffer_size() const { return q_buffer_.size(); }

    std::vector<TrajectoryBatch> q_buffer() const {
        std::vector<TrajectoryBatch> out;
        for (const auto& e : q_buffer_) out.push_back(e.batch);
        return out;
    }

private:
    struct Entry {
        TrajectoryBatch batch;
        std::uint64_t seq = 0;
    };

    struct TaskState {
        std::vector<PolicyRecord> records;
        std::optional<std::int64_t> checked_out;
        std::optional<std::int64_t> in_training;
        std::set<std::int64_t> enqueued_versions;
        std::int64_t steps_completed = 0;
    };

    TaskState& state(const std::string& task_id) {
        auto it = tasks_.find(task_id);
        if (it == tasks_.end()) throw UnknownTask("task '" + task_id + "' is not registered");
        return it->second;
    }
    const TaskState& state(const std::string& task_id) const {
        auto it = tasks_.find(task_id);
        if (it == tasks_.end()) throw UnknownTask("task '" + task_id + "' is not registered");
        return it->second;
    }

    std::map<std::string, TaskState> tasks_;
    std::deque<Entry> q_buffer_;
    std::uint64_t next_queue_seq_ = 0;
};

}  // namespace marlsim
