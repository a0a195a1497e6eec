#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "spinbus/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spinbus - spin-system simulation toolkit"};
    app.set_version_flag("--version", spinbus::kToolVersion);
    app.require_subcommand(1);

    struct Invocation {
        std::string config;
        std::string output;
        int threads = 1;
    };
    std::map<std::string, Invocation> runs;
    const char* experiments[] = {"pst", "wavepacket", "ladder", "memory"};
    const char* blurbs[] = {
        "perfect state transfer on an engineered XY chain",
        "Gaussian wavepacket transfer in a parabolic field",
        "spin-ladder-mediated effective qubit coupling",
        "magnon-based quantum memory"};
    for (int i = 0; i < 4; ++i) {
        Invocation& inv = runs[experiments[i]];
        CLI::App* sub = app.add_subcommand(experiments[i], blurbs[i]);
        sub->add_option("--config", inv.config, "JSON config file")->required();
        sub->add_option("--output", inv.output, "output directory (exact path)");
        sub->add_option("--threads", inv.threads, "worker threads for sweeps");
    }

    bool list_json = false;
    std::string list_only;
    CLI::App* list = app.add_subcommand("list", "describe available experiments");
    list->add_flag("--json", list_json, "machine-readable schemas");
    list->add_option("experiment", list_only, "restrict to one experiment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return spinbus::kExitValidation;
    }

    if (list->parsed()) return spinbus::list_experiments(list_json, list_only);
    for (const auto& [name, inv] : runs)
        if (app.get_subcommand(name)->parsed())
            return spinbus::run_experiment_file(inv.config, name, inv.output,
                                                inv.threads);
    std::cerr << "error: no subcommand\n";
    return spinbus::kExitValidation;
}
