#pragma once

#include "minent/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace minent::lab {

struct RunContext {
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    long grid = 10000;
    bool plots = false;
};

/// Result of one experiment: report lines, named sweep metrics, and the
/// pass/fail roll-up (the first failing invariant is named).
struct Outcome {
    bool pass = true;
    std::string failed_invariant;
    std::vector<std::string> lines;
    std::vector<std::pair<std::string, double>> metrics;

    void note(const std::string& line) { lines.push_back(line); }
    void metric(const std::string& name, double value) { metrics.emplace_back(name, value); }
    void check(bool ok, const std::string& name);
};

/// Executes the experiment named by [experiment] kind and writes report.txt,
/// data/*.csv (and plots/*.svg when enabled) under ctx.out_dir.
Outcome run_experiment(const Config& cfg, const RunContext& ctx);

int cli_main(int argc, char** argv);

} // namespace minent::lab
