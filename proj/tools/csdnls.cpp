#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csdnls/app/commands.hpp"

int main(int argc, char** argv) {
    using namespace csdnls::app;

    CLI::App app{"Spectral simulator and integrability checks for the Calogero-Sutherland DNLS equation"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    std::string out = "out";
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    std::map<CLI::App*, Command> commands;

    auto add = [&](const char* name, const char* help, Command cmd) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", configs, "Experiment config (JSON); repeat for several")->required();
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        sub->add_option("--jobs", jobs, "Configs to run concurrently")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--seed", seed, "Override the config seed");
        commands[sub] = cmd;
    };
    add("evolve", "Propagate u0 and write trajectories plus a diagnostics report", Command::evolve);
    add("spectrum", "Write the spectrum of the Lax operator at u0", Command::spectrum);
    add("verify", "Run the operator-identity checks; exit 3 on any failure", Command::verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    BatchOptions opts;
    for (const auto& [sub, cmd] : commands) {
        if (sub->parsed()) {
            opts.command = cmd;
            if (sub->count("--seed") > 0) opts.seed = seed;
        }
    }
    for (const auto& c : configs) opts.configs.emplace_back(c);
    opts.out_dir = out;
    opts.jobs = jobs;
    return run_batch(opts, std::cerr);
}
