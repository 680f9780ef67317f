// tclk_cli.cpp - command-line driver for scenario files

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tclk/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Open-system evolution and Kraus extraction from JSON scenarios"};
    std::string scenario;
    std::string out_dir;
    std::string only;
    bool quiet = false;
    app.add_option("--scenario", scenario, "Scenario JSON file")->required();
    app.add_option("--out", out_dir, "Output directory (overrides the scenario)");
    app.add_option("--only", only, "Comma-separated subset of the scenario runs");
    app.add_flag("--quiet", quiet, "Print failures only");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    tclk::cli::RunFlags flags;
    flags.quiet = quiet;
    if (!out_dir.empty()) flags.out_dir = out_dir;
    if (!only.empty()) {
        std::vector<std::string> runs;
        std::stringstream ss(only);
        for (std::string item; std::getline(ss, item, ',');) {
            if (!item.empty()) runs.push_back(item);
        }
        flags.only = runs;
    }
    try {
        return tclk::cli::run(scenario, flags, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
