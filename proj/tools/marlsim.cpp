#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marlsim/marlsim.hpp"

namespace {

struct Flags {
    std::string scenario;
    std::string scheduler;
    std::string schedulers;
    std::optional<std::uint64_t> seed;
    std::string sweep;
    std::string out;
    std::string timeline = "ascii";
    unsigned jobs = 1;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--scenario", f.scenario, "scenario file, or bundled:<name>")->required();
    cmd->add_option("--seed", f.seed, "override the scenario seed");
    cmd->add_option("--out", f.out, "output directory (default $MARLSIM_OUT or ./marlsim-out)");
    cmd->add_option("--timeline", f.timeline, "timeline format")->check(CLI::IsMember({"ascii", "svg"}));
    cmd->add_option("--jobs", f.jobs, "simulations to run concurrently")->check(CLI::PositiveNumber);
}

std::vector<marlsim::SchedulerChoice> parse_list(const std::string& list) {
    std::vector<marlsim::SchedulerChoice> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto choice = marlsim::parse_scheduler_label(marlsim::detail::trim(item));
        if (!choice) throw marlsim::ValidationError("unknown scheduler '" + item + "'");
        out.push_back(*choice);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator for multi-tenant asynchronous RL post-training"};
    app.require_subcommand(1);
    Flags f;

    auto* run = app.add_subcommand("run", "simulate one scenario under one scheduler");
    add_common(run, f);
    run->add_option("--scheduler", f.scheduler, "scheduler label, e.g. marlaas or marlaas-no_async");
    run->add_option("--sweep", f.sweep, "param=v1,v2,... (task_count, kv_budget_bytes, rollout_pool_token_rate, seed)");

    auto* sweep = app.add_subcommand("sweep", "simulate a scenario at several parameter values");
    add_common(sweep, f);
    sweep->add_option("--scheduler", f.scheduler, "scheduler label");
    sweep->add_option("--sweep", f.sweep, "param=v1,v2,...")->required();

    auto* compare = app.add_subcommand("compare", "run several schedulers on the same scenario and seeds");
    add_common(compare, f);
    compare->add_option("--schedulers", f.schedulers, "comma-separated scheduler labels")
        ->default_val("single_disaggregated,single_collocated,multi_lora_sync,marlaas");
    compare->add_option("--sweep", f.sweep, "param=v1,v2,...");

    app.add_subcommand("list", "print the bundled scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(marlsim::ExitCode::usage);
    }

    if (app.got_subcommand("list")) {
        for (const auto& s : marlsim::kBundledScenarios) std::cout << "bundled:" << s.name << "\n";
        return 0;
    }

    try {
        marlsim::RunRequest req;
        req.scenario_path = f.scenario;
        req.seed = f.seed;
        req.output_dir = marlsim::default_output_dir(f.out.empty() ? std::nullopt : std::optional(f.out));
        req.timeline = f.timeline == "svg" ? marlsim::TimelineFormat::svg : marlsim::TimelineFormat::ascii;
        req.jobs = f.jobs;
        if (!f.sweep.empty()) req.sweep = marlsim::parse_sweep(f.sweep);
        if (!f.scheduler.empty()) req.scheduler = f.scheduler;

        if (app.got_subcommand(compare)) {
            marlsim::compare_schedulers(req, parse_list(f.schedulers), std::cout);
        } else {
            marlsim::run_scenario(req, std::cout);
        }
        std::cout << "artifacts: " << req.output_dir.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "marlsim: " << e.what() << "\n";
        return static_cast<int>(marlsim::exit_code_for(e));
    }
    return 0;
}
