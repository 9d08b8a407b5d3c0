#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace marlsim {

// Workload shapes shipped with the library. Model sizes follow a 0.6B-class
// dense model (28 layers, 8 KV heads of dim 128, bf16 cache).

inline constexpr std::string_view kTable1Heterogeneous = R"cfg(# Three heterogeneous tenants replayed with their measured mean rollout
# latencies (seconds mode, no contention). Environment time for the search
# task is folded into its rollout latency.
name = "table1_heterogeneous"
seed = 0

[cluster]
rollout_devices = 14
train_devices = 2
rollout_pool_token_rate = 8000
kv_budget_bytes = 68719476736
weight_commit_latency = 0

[scheduler]
kind = "multi_lora_sync"

[[model]]
name = "dense-0.6b"
num_layers = 28
num_kv_heads = 8
head_dim = 128
kv_dtype_bytes = 2
per_batch_peak_decode_rate = 800

[[task]]
id = "gsm8k"
model = "dense-0.6b"
total_steps = 20
batch_size = 64
prompt_len = 256
max_gen_len = 2048
rollout_seconds = "deterministic(23.45)"
train_step_latency = "deterministic(2.0)"

[[task]]
id = "search"
model = "dense-0.6b"
total_steps = 20
batch_size = 32
prompt_len = 512
max_gen_len = 1024
rollout_seconds = "deterministic(27.98)"
train_step_latency = "deterministic(2.0)"

[[task]]
id = "amc12"
model = "dense-0.6b"
total_steps = 20
batch_size = 32
prompt_len = 256
max_gen_len = 4096
rollout_seconds = "deterministic(70.58)"
train_step_latency = "deterministic(2.0)"
)cfg";

inline constexpr std::string_view kTable2Search10 = R"cfg(# Ten replicas of a tool-using search agent: decode cost in tokens, five
# search calls per episode, rollout roughly 10x longer than a training step.
name = "table2_search10"
seed = 0

[cluster]
rollout_devices = 14
train_devices = 2
rollout_pool_token_rate = 4000
kv_budget_bytes = 68719476736
weight_commit_latency = 0

[scheduler]
kind = "marlaas"

[[model]]
name = "dense-0.6b"
num_layers = 28
num_kv_heads = 8
head_dim = 128
kv_dtype_bytes = 2
per_batch_peak_decode_rate = 800

[[task]]
id = "search"
replicas = 10
model = "dense-0.6b"
total_steps = 100
batch_size = 32
prompt_len = 512
max_gen_len = 1024
rollout_tokens = "uniform(18000, 22000)"
tool_calls_per_episode = 5
tool_latency = "lognormal(0.6931471805599453, 0.5)"
train_step_latency = "uniform(2.5, 3.5)"
)cfg";

inline constexpr std::string_view kTable4Ablation = R"cfg(# Ten replicas of a long-generation math task; rollout-bound.
name = "table4_ablation"
seed = 0

[cluster]
rollout_devices = 14
train_devices = 2
rollout_pool_token_rate = 4000
kv_budget_bytes = 274877906944
weight_commit_latency = 0

[scheduler]
kind = "marlaas"

[[model]]
name = "dense-0.6b"
num_layers = 28
num_kv_heads = 8
head_dim = 128
kv_dtype_bytes = 2
per_batch_peak_decode_rate = 800

[[task]]
id = "amc12"
replicas = 10
model = "dense-0.6b"
total_steps = 50
batch_size = 32
prompt_len = 256
max_gen_len = 4096
rollout_tokens = "deterministic(60000)"
train_step_latency = "deterministic(4.0)"
)cfg";

inline constexpr std::string_view kFig6Sweep = R"cfg(# Up to 32 identical short-answer math tenants; sweep task_count over
# 1, 2, 4, 8, 16, 32. The pool saturates at rate / per-batch cap = 4 tasks.
name = "fig6_sweep"
seed = 0

[cluster]
rollout_devices = 14
train_devices = 2
rollout_pool_token_rate = 3200
kv_budget_bytes = 824633720832
weight_commit_latency = 0

[scheduler]
kind = "marlaas"

[[model]]
name = "dense-0.6b"
num_layers = 28
num_kv_heads = 8
head_dim = 128
kv_dtype_bytes = 2
per_batch_peak_decode_rate = 800

[[task]]
id = "gsm8k"
replicas = 32
model = "dense-0.6b"
total_steps = 100
batch_size = 64
prompt_len = 256
max_gen_len = 2048
rollout_tokens = "deterministic(24000)"
train_step_latency = "deterministic(1.5)"
)cfg";

struct BundledScenario {
    std::string_view name;
    std::string_view text;
};

inline constexpr std::array<BundledScenario, 4> kBundledScenarios{{
    {"table1_heterogeneous", kTable1Heterogeneous},
    {"table2_search10", kTable2Search10},
    {"table4_ablation", kTable4Ablation},
    {"fig6_sweep", kFig6Sweep},
}};

inline std::optional<std::string_view> bundled_scenario(std::string_view name) {
    for (const auto& s : kBundledScenarios)
        if (s.name == name) return s.text;
    return std::nullopt;
}

}  // namespace marlsim
