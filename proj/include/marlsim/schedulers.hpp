#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marlsim/admission.hpp"
#include "marlsim/cluster.hpp"
#include "marlsim/errors.hpp"
#include "marlsim/manager.hpp"
#include "marlsim/rng.hpp"
#include "marlsim/scenario.hpp"
#include "marlsim/scheduler_choice.hpp"
#include "marlsim/sim_core.hpp"
#include "marlsim/workload.hpp"

namespace marlsim {

// How a SchedulerChoice maps onto execution mechanics.
struct ExecutionMode {
    enum class Progress {
        async,       // per-task pipelines, trainer pops Q_buffer whenever free
        sync_round,  // global barrier: every task rolls out, then all train
        sequential,  // one task at a time, start to finish
    };
    Progress progress = Progress::async;
    // Concurrent multi-adapter rollout; otherwise one rollout at a time.
    bool multi_lora = true;
    Layout layout = Layout::disaggregated;
};

inline ExecutionMode execution_mode(const SchedulerChoice& choice) {
    ExecutionMode m;
    switch (choice.kind) {
        case SchedulerKind::marlaas:
            m.progress = choice.disable_async ? ExecutionMode::Progress::sync_round : ExecutionMode::Progress::async;
            m.multi_lora = !choice.disable_multi_lora;
            break;
        case SchedulerKind::multi_lora_sync:
            m.progress = ExecutionMode::Progress::sync_round;
            break;
        case SchedulerKind::single_disaggregated:
            m.progress = ExecutionMode::Progress::sequential;
            m.multi_lora = false;
            break;
        case SchedulerKind::single_collocated:
            m.progress = ExecutionMode::Progress::sequential;
            m.multi_lora = false;
            m.layout = Layout::collocated;
            break;
    }
    return m;
}

// One simulated run of a scenario under its scheduler. Construct, call
// run(), then read the trace and pool accounting.
class Simulation {
public:
    explicit Simulation(Scenario scenario)
        : scenario_(std::move(scenario)),
          mode_(execution_mode(scenario_.scheduler)),
          rng_(scenario_.seed),
          ps_(1.0) {
        validate(scenario_);
        if (scenario_.cluster.collocation_mode == Layout::collocated &&
            scenario_.scheduler.kind != SchedulerKind::single_collocated) {
            throw ValidationError("a collocated cluster only supports the single_collocated scheduler");
        }
        const auto& c = scenario_.cluster;
        budget_ = scenario_.scheduler.kv_budget_override.value_or(c.kv_budget_bytes);
        if (mode_.layout == Layout::collocated) {
            rollout_scale_ = static_cast<double>(c.rollout_devices) / static_cast<double>(c.total_devices());
            train_scale_ = static_cast<double>(c.train_devices) / static_cast<double>(c.total_devices());
            rollout_pool_ = PoolId::shared;
            train_pool_ = PoolId::shared;
            pools_.emplace(PoolId::shared, ResourcePool(PoolId::shared, c.total_devices(), false));
        } else {
            pools_.emplace(PoolId::rollout, ResourcePool(PoolId::rollout, c.rollout_devices, false));
            pools_.emplace(PoolId::train, ResourcePool(PoolId::train, c.train_devices, true));
        }
        pools_.emplace(PoolId::env, ResourcePool(PoolId::env, 0, false));
        ps_ = ProcessorSharingPool(c.rollout_pool_token_rate / rollout_scale_);

        for (std::size_t i = 0; i < scenario_.tasks.size(); ++i) {
            const TaskSpec& spec = scenario_.tasks[i];
            TaskRuntime rt;
            rt.spec = &spec;
            rt.profile = &scenario_.profile(spec);
            rt.footprint = kv_footprint(spec, *rt.profile);
            index_.emplace(spec.task_id, i);
            tasks_.push_back(std::move(rt));
        }
    }

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    // Runs until every task completes (or until `until`, if finite) and
    // returns the trace. Throws Deadlock if work stalls with tasks left.
    const TraceLog& run(double until = std::numeric_limits<double>::infinity()) {
        if (ran_) throw Error("simulation already ran");
        ran_ = true;
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            loop_.schedule({tasks_[i].spec->submit_time, 0, EventKind::TaskSubmitted, tasks_[i].spec->task_id});
        }
        loop_.run([this](const SimEvent& e) { dispatch(e); }, until);

        const bool stopped_early = !loop_.queue().empty();
        if (!stopped_early) {
            for (const auto& rt : tasks_) {
                if (!rt.completed) throw Deadlock(diagnose());
            }
        }
        horizon_ = stopped_early ? until : loop_.now();
        close_open_intervals(horizon_);
        loop_.finish(horizon_);
        return loop_.trace();
    }

    const TraceLog& trace() const { return loop_.trace(); }
    const Scenario& scenario() const { return scenario_; }
    const ExecutionMode& mode() const { return mode_; }
    const Manager& manager() const { return manager_; }
    const AdmissionState& admission() const { return admission_; }
    std::int64_t kv_budget() const { return budget_; }
    double horizon() const { return horizon_; }

    // Accelerator pools (excludes the environment service).
    std::vector<const ResourcePool*> device_pools() const {
        std::vector<const ResourcePool*> out;
        for (const auto& [id, p] : pools_)
            if (id != PoolId::env) out.push_back(&p);
        return out;
    }
    const ResourcePool& pool(PoolId id) const { return pools_.at(id); }
    PoolId rollout_pool_id() const { return rollout_pool_; }
    PoolId train_pool_id() const { return train_pool_; }

private:
    struct TaskRuntime {
        const TaskSpec* spec = nullptr;
        const ModelProfile* profile = nullptr;
        std::int64_t footprint = 0;
        bool admitted = false;
        bool completed = false;
        std::optional<PolicyRecord> policy;  // checked out for the current rollout
        double rollout_amount = 0.0;
        double segment_amount = 0.0;
        std::vector<double> tool_latencies;
        std::size_t segment = 0;
        std::optional<std::uint64_t> segment_event;
        double tool_started = 0.0;
        bool in_tool = false;
        std::optional<PolicyPayload> pending_commit;
    };

    enum class RoundPhase { idle, rollout, training };

    TaskRuntime& rt(const std::string& id) { return tasks_.at(index_.at(id)); }

    void dispatch(const SimEvent& e) {
        switch (e.kind) {
            case EventKind::TaskSubmitted: on_submitted(e.task); break;
            case EventKind::RolloutSegmentDone: on_segment_done(e.task); break;
            case EventKind::ToolCallDone: on_tool_done(e.task); break;
            case EventKind::TrainDone: on_train_done(e.task); break;
            case EventKind::PolicyCommitted: on_committed(e.task); break;
            case EventKind::AdmissionRetry: on_admission_retry(); break;
            case EventKind::RateRecompute: on_rate_recompute(); break;
            case EventKind::RoundStarted: on_round_start(); break;
            default: throw Error("unexpected queued event " + std::string(to_string(e.kind)));
        }
    }

    // ---- admission -------------------------------------------------------

    void on_submitted(const std::string& id) {
        TaskRuntime& t = rt(id);
        loop_.emit(EventKind::TaskSubmitted, id, std::int64_t{0});
        manager_.init_task(*t.spec, loop_.now());
        if (mode_.progress == ExecutionMode::Progress::sequential) {
            sequential_queue_.push_back(id);
            if (!sequential_active_) activate_next_sequential();
            return;
        }
        if (admit(id, t.footprint, admission_, budget_) == AdmissionResult::admitted) mark_admitted(id);
    }

    void mark_admitted(const std::string& id) {
        TaskRuntime& t = rt(id);
        t.admitted = true;
        admitted_order_.push_back(id);
        loop_.emit(EventKind::TaskAdmitted, id, std::nullopt, rollout_pool_, static_cast<double>(t.footprint));
        on_admitted(id);
    }

    void on_admission_retry() {
        retry_scheduled_ = false;
        loop_.emit(EventKind::AdmissionRetry);
        for (const auto& id : rescan(admission_, budget_)) mark_admitted(id);
    }

    void on_admitted(const std::string& id) {
        switch (mode_.progress) {
            case ExecutionMode::Progress::async: request_rollout(id); break;
            case ExecutionMode::Progress::sync_round:
                if (round_phase_ == RoundPhase::idle) schedule_round();
                break;
            case ExecutionMode::Progress::sequential: start_rollout(id); break;
        }
    }

    void activate_next_sequential() {
        if (sequential_queue_.empty()) return;
        const std::string id = sequential_queue_.front();
        sequential_queue_.pop_front();
        if (admit(id, rt(id).footprint, admission_, budget_) != AdmissionResult::admitted) {
            throw Error("sequential admission of '" + id + "' failed with an empty engine");
        }
        sequential_active_ = id;
        mark_admitted(id);
    }

    // ---- rollout ---------------------------------------------------------

    void request_rollout(const std::string& id) {
        if (mode_.multi_lora) {
            start_rollout(id);
            return;
        }
        rollout_waiters_.push_back(id);
        pump_serial_rollouts();
    }

    void pump_serial_rollouts() {
        if (rollout_slot_ || rollout_waiters_.empty()) return;
        rollout_slot_ = rollout_waiters_.front();
        rollout_waiters_.pop_front();
        start_rollout(*rollout_slot_);
    }

    void start_rollout(const std::string& id) {
        TaskRuntime& t = rt(id);
        auto policy = manager_.next_policy(id);
        if (!policy) throw Error("no unconsumed policy version for '" + id + "'");
        t.policy = *policy;
        t.rollout_amount = sample_latency(t.spec->rollout_model, rng_);
        const auto calls = static_cast<std::size_t>(t.spec->tool_calls_per_episode);
        t.segment_amount = t.rollout_amount / static_cast<double>(calls + 1);
        t.tool_latencies.clear();
        for (std::size_t k = 0; k < calls; ++k) t.tool_latencies.push_back(sample_latency(t.spec->tool_latency_model, rng_));
        t.segment = 0;
        loop_.emit(EventKind::RolloutStarted, id, t.policy->version, rollout_pool_, t.rollout_amount);
        begin_segment(id);
    }

    double scaled_cap(const TaskRuntime& t) const {
        return static_cast<double>(t.profile->per_batch_peak_decode_rate) / rollout_scale_;
    }

    void begin_segment(const std::string& id) {
        TaskRuntime& t = rt(id);
        if (t.spec->rollout_unit == RolloutUnit::tokens) {
            ps_.add(id, t.segment_amount, scaled_cap(t), loop_.now());
        } else {
            fixed_rollouts_[id] = scaled_cap(t);
            t.segment_event = loop_.schedule({loop_.now() + t.segment_amount * rollout_scale_, 0,
                                              EventKind::RolloutSegmentDone, id});
        }
        rates_changed();
    }

    void rates_changed() {
        if (recompute_scheduled_) return;
        recompute_scheduled_ = true;
        loop_.schedule({loop_.now(), 0, EventKind::RateRecompute});
    }

    double current_share() const {
        double rate = ps_.delivered_rate();
        for (const auto& [id, cap] : fixed_rollouts_) rate += cap;
        return std::min(1.0, rate / ps_.pool_rate());
    }

    void on_rate_recompute() {
        recompute_scheduled_ = false;
        const double now = loop_.now();
        ResourcePool& pool = pools_.at(rollout_pool_);
        pool.record_busy(share_since_, now, share_ * static_cast<double>(pool.device_count()));
        ps_.advance(now);
        share_ = current_share();
        share_since_ = now;
        pool.current_active_jobs = static_cast<int>(ps_.size() + fixed_rollouts_.size());
        for (const auto& b : ps_.batches()) {
            TaskRuntime& t = rt(b.key);
            if (t.segment_event) loop_.cancel(*t.segment_event);
            t.segment_event = loop_.schedule({ps_.completion_time(b.key), 0, EventKind::RolloutSegmentDone, b.key});
        }
        loop_.emit(EventKind::RateRecompute, {}, std::nullopt, rollout_pool_, share_);
    }

    void on_segment_done(const std::string& id) {
        TaskRuntime& t = rt(id);
        t.segment_event.reset();
        if (t.spec->rollout_unit == RolloutUnit::tokens) ps_.remove(id, loop_.now());
        else fixed_rollouts_.erase(id);
        rates_changed();
        loop_.emit(EventKind::RolloutSegmentDone, id, t.policy->version, rollout_pool_, static_cast<double>(t.segment));
        if (t.segment < t.tool_latencies.size()) {
            t.in_tool = true;
            t.tool_started = loop_.now();
            loop_.schedule({loop_.now() + t.tool_latencies[t.segment], 0, EventKind::ToolCallDone, id});
            return;
        }
        trajectory_ready(id);
    }

    void on_tool_done(const std::string& id) {
        TaskRuntime& t = rt(id);
        t.in_tool = false;
        pools_.at(PoolId::env).record_busy(t.tool_started, loop_.now(), 0.0);
        loop_.emit(EventKind::ToolCallDone, id, t.policy->version, PoolId::env, static_cast<double>(t.segment));
        ++t.segment;
        begin_segment(id);
    }

    void trajectory_ready(const std::string& id) {
        TaskRuntime& t = rt(id);
        TrajectoryBatch batch;
        batch.task_id = id;
        batch.version = t.policy->version;
        batch.token_count = t.spec->rollout_unit == RolloutUnit::tokens
                                ? t.rollout_amount
                                : t.rollout_amount * static_cast<double>(t.profile->per_batch_peak_decode_rate);
        batch.generated_at = loop_.now();
        for (std::size_t k = 0; k <= t.tool_latencies.size(); ++k) {
            batch.episode_structure.push_back(EpisodeMarker::rollout_segment);
            if (k < t.tool_latencies.size()) batch.episode_structure.push_back(EpisodeMarker::tool_call);
        }
        batch.policy_checksum = t.policy->theta.checksum;
        loop_.emit(EventKind::TrajectoryReady, id, t.policy->version);
        manager_.enqueue_trajectory(std::move(batch));

        if (!mode_.multi_lora && mode_.progress != ExecutionMode::Progress::sequential) {
            rollout_slot_.reset();
            pump_serial_rollouts();
        }
        if (mode_.progress == ExecutionMode::Progress::sync_round) {
            ++round_ready_;
            if (round_ready_ == round_members_.size()) {
                loop_.emit(EventKind::BarrierReleased, {}, std::nullopt, std::nullopt,
                           static_cast<double>(round_index_));
                round_phase_ = RoundPhase::training;
            }
        }
        try_start_training();
    }

    // ---- training --------------------------------------------------------

    void try_start_training() {
        if (train_job_) return;
        if (mode_.progress == ExecutionMode::Progress::sync_round && round_phase_ != RoundPhase::training) return;
        auto batch = manager_.pop_trajectory();
        if (!batch) return;
        const std::string id = batch->task_id;
        const double latency = sample_latency(rt(id).spec->train_step_latency_model, rng_) * train_scale_;
        train_job_ = TrainJob{*batch, loop_.now()};
        pools_.at(train_pool_).current_active_jobs = 1;
        loop_.emit(EventKind::TrainStarted, id, batch->version, train_pool_);
        loop_.schedule({loop_.now() + latency, 0, EventKind::TrainDone, id});
    }

    void on_train_done(const std::string& id) {
        ResourcePool& pool = pools_.at(train_pool_);
        pool.record_busy(train_job_->started, loop_.now(), static_cast<double>(pool.device_count()));
        pool.current_active_jobs = 0;
        const TrajectoryBatch batch = std::move(train_job_->batch);
        train_job_.reset();
        loop_.emit(EventKind::TrainDone, id, batch.version, train_pool_);
        rt(id).pending_commit = policy_update(manager_.latest(id), batch);
        loop_.schedule({loop_.now() + scenario_.cluster.weight_commit_latency, 0, EventKind::PolicyCommitted, id});
        try_start_training();
    }

    void on_committed(const std::string& id) {
        TaskRuntime& t = rt(id);
        const PolicyRecord record = manager_.commit_policy(id, *t.pending_commit, loop_.now());
        t.pending_commit.reset();
        loop_.emit(EventKind::PolicyCommitted, id, record.version, train_pool_);
        const bool done = manager_.steps_completed(id) >= t.spec->total_steps;
        if (done) {
            t.completed = true;
            loop_.emit(EventKind::TaskCompleted, id, record.version);
            release(id, admission_);
            if (!admission_.pending.empty() && !retry_scheduled_) {
                retry_scheduled_ = true;
                loop_.schedule({loop_.now(), 0, EventKind::AdmissionRetry});
            }
        }
        switch (mode_.progress) {
            case ExecutionMode::Progress::async:
                if (!done) request_rollout(id);
                break;
            case ExecutionMode::Progress::sync_round:
                if (++round_committed_ == round_members_.size()) {
                    round_phase_ = RoundPhase::idle;
                    schedule_round();
                }
                break;
            case ExecutionMode::Progress::sequential:
                if (!done) {
                    start_rollout(id);
                } else {
                    sequential_active_.reset();
                    activate_next_sequential();
                }
                break;
        }
    }

    // ---- synchronized rounds --------------------------------------------

    // Rounds open through a zero-delay event so every task admitted at the
    // same instant joins the same round.
    void schedule_round() {
        if (round_scheduled_) return;
        round_scheduled_ = true;
        loop_.schedule({loop_.now(), 0, EventKind::RoundStarted});
    }

    void on_round_start() {
        round_scheduled_ = false;
        if (round_phase_ == RoundPhase::idle) begin_round();
    }

    void begin_round() {
        round_members_.clear();
        for (const auto& id : admitted_order_) {
            if (!rt(id).completed) round_members_.push_back(id);
        }
        if (round_members_.empty()) return;
        ++round_index_;
        loop_.emit(EventKind::RoundStarted, {}, std::nullopt, std::nullopt, static_cast<double>(round_index_));
        round_ready_ = 0;
        round_committed_ = 0;
        round_phase_ = RoundPhase::rollout;
        for (const auto& id : round_members_) request_rollout(id);
    }

    // ---- bookkeeping -----------------------------------------------------

    void close_open_intervals(double end) {
        ResourcePool& rollout = pools_.at(rollout_pool_);
        if (end > share_since_) {
            rollout.record_busy(share_since_, end, share_ * static_cast<double>(rollout.device_count()));
            share_since_ = end;
        }
        if (train_job_ && end > train_job_->started) {
            ResourcePool& train = pools_.at(train_pool_);
            train.record_busy(train_job_->started, end, static_cast<double>(train.device_count()));
        }
        for (const auto& t : tasks_) {
            if (t.in_tool && end > t.tool_started) pools_.at(PoolId::env).record_busy(t.tool_started, end, 0.0);
        }
    }

    std::string diagnose() const {
        std::string out = "simulation stalled at t=" + format_number(loop_.now()) + ":";
        for (const auto& t : tasks_) {
            if (t.completed) continue;
            out += " '" + t.spec->task_id + "'";
            if (!t.admitted) out += " waiting for KV admission (needs " + std::to_string(t.footprint) + " of " +
                                   std::to_string(budget_ - admission_.current_kv_usage) + " free bytes);";
            else out += " admitted, step " + std::to_string(manager_.steps_completed(t.spec->task_id)) + ";";
        }
        if (train_job_) out += " train pool busy;";
        if (manager_.q_buffer_size() > 0) out += " q_buffer holds " + std::to_string(manager_.q_buffer_size()) + ";";
        return out;
    }

    struct TrainJob {
        TrajectoryBatch batch;
        double started = 0.0;
    };

    Scenario scenario_;
    ExecutionMode mode_;
    SeededRngState rng_;
    EventLoop loop_;
    Manager manager_;
    AdmissionState admission_;
    std::int64_t budget_ = 0;

    std::vector<TaskRuntime> tasks_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::string> admitted_order_;

    std::map<PoolId, ResourcePool> pools_;
    PoolId rollout_pool_ = PoolId::rollout;
    PoolId train_pool_ = PoolId::train;
    double rollout_scale_ = 1.0;
    double train_scale_ = 1.0;

    ProcessorSharingPool ps_;
    std::map<std::string, double> fixed_rollouts_;
    double share_ = 0.0;
    double share_since_ = 0.0;
    bool recompute_scheduled_ = false;
    bool retry_scheduled_ = false;

    std::deque<std::string> rollout_waiters_;
    std::optional<std::string> rollout_slot_;
    std::optional<TrainJob> train_job_;

    std::deque<std::string> sequential_queue_;
    std::optional<std::string> sequential_active_;

    std::vector<std::string> round_members_;
    std::size_t round_ready_ = 0;
    std::size_t round_committed_ = 0;
    std::int64_t round_index_ = 0;
    RoundPhase round_phase_ = RoundPhase::idle;
    bool round_scheduled_ = false;

    double horizon_ = 0.0;
    bool ran_ = false;
};

// Convenience: run a scenario to completion and return its trace.
inline TraceLog simulate(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run();
}

}  // namespace marlsim
