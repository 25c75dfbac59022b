#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfl/config.hpp"
#include "mfl/harness.hpp"

namespace mfl {

/// Everything an experiment produces, before anything touches the disk.
struct ExperimentOutput {
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, std::string>> files;  // (file name, contents), results.csv first
};

ExperimentOutput execute(const ExperimentConfig& config);

/// Runs the experiment, writes its files into config.out_dir, prints one
/// PASS/FAIL line per check to `log`, and returns 0 iff every
/// non-conditional check passed.
int run(const ExperimentConfig& config, std::ostream& log);

}  // namespace mfl
