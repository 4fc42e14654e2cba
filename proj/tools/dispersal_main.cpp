#include "dispersal/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal versus random dispersal experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;

    for (const char* name : {"simulate", "spectrum", "kpp-orbit", "converge-a", "converge-b", "converge-c"}) {
        auto* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config's output key)");
        sub->add_option("--jobs", jobs, "worker thread cap")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();
    return dispersal::run_file(subcommand, config_path, out_dir, jobs, std::cerr);
}
