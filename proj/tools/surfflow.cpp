// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/harness.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

using namespace surfflow;

int main(int argc, char** argv)
{
    CLI::App app{"Ideal fluid flow on triangulated surfaces"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::int64_t seed = -1;
    const std::map<std::string, std::pair<std::string, std::function<Report(const RunConfig&)>>> commands = {
        {"run", {"Euler trajectory, diagnostics CSV and VTK snapshots", run_command}},
        {"exp", {"Exp(v) flow map and area report", exp_command}},
        {"probe", {"dExp spectrum, ellipticity certificate and B~ band report", probe_command}},
        {"verify", {"invariant suite with PASS/FAIL summary", verify_command}},
        {"slopes", {"paracalculus smoothing ledger", slopes_command}},
    };
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides 'out')");
        sub->add_option("--seed", seed, "RNG seed (overrides 'seed')")->check(CLI::NonNegativeNumber);
    }
    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        RunConfig config = load_config(config_path);
        if (!out_dir.empty()) config.out = out_dir;
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        const Report report = commands.at(name).second(config);
        for (const Check& c : report.checks)
            std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
        for (const std::string& n : report.notes) std::cout << "note: " << n << "\n";
        std::cout << "wrote " << report.files.size() << " files to " << config.out.string() << "\n";
        return report.ok() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "surfflow " << name << ": config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "surfflow " << name << ": " << e.what() << "\n";
        return 3;
    }
}
