#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace marlsim {

enum class SchedulerKind { marlaas, single_disaggregated, single_collocated, multi_lora_sync };

inline constexpr SchedulerKind kAllSchedulers[] = {SchedulerKind::single_disaggregated,
                                                   SchedulerKind::single_collocated, SchedulerKind::multi_lora_sync,
                                                   SchedulerKind::marlaas};

inline std::string_view to_string(SchedulerKind kind) {
    switch (kind) {
        case SchedulerKind::marlaas: return "marlaas";
        case SchedulerKind::single_disaggregated: return "single_disaggregated";
        case SchedulerKind::single_collocated: return "single_collocated";
        case SchedulerKind::multi_lora_sync: return "multi_lora_sync";
    }
    return "?";
}

inline std::optional<SchedulerKind> scheduler_from_string(std::string_view s) {
    for (auto k : kAllSchedulers)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

struct SchedulerChoice {
    SchedulerKind kind = SchedulerKind::marlaas;
    // Only meaningful for marlaas.
    bool disable_async = false;
    bool disable_multi_lora = false;
    std::optional<std::int64_t> kv_budget_override;

    // Short label, e.g. "marlaas" or "marlaas-no_async".
    std::string label() const {
        std::string out(to_string(kind));
        if (disable_async) out += "-no_async";
        if (disable_multi_lora) out += "-no_multi_lora";
        return out;
    }

    bool operator==(const SchedulerChoice&) const = default;
};

// Parses "marlaas", "marlaas-no_async", "marlaas-no_multi_lora", ...
inline std::optional<SchedulerChoice> parse_scheduler_label(std::string_view label) {
    SchedulerChoice choice;
    const auto dash = label.find('-');
    const auto kind = scheduler_from_string(label.substr(0, dash));
    if (!kind) return std::nullopt;
    choice.kind = *kind;
    std::string_view rest = dash == std::string_view::npos ? std::string_view{} : label.substr(dash + 1);
    while (!rest.empty()) {
        const auto d = rest.find('-');
        const auto flag = rest.substr(0, d);
        if (flag == "no_async") choice.disable_async = true;
        else if (flag == "no_multi_lora") choice.disable_multi_lora = true;
        else return std::nullopt;
        rest = d == std::string_view::npos ? std::string_view{} : rest.substr(d + 1);
    }
    if ((choice.disable_async || choice.disable_multi_lora) && choice.kind != SchedulerKind::marlaas) {
        return std::nullopt;
    }
    return choice;
}

}  // namespace marlsim
