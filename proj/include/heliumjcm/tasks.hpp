// tasks.hpp: task runners behind the command-line driver. Each runner writes
// its CSV artifacts plus a JSON sidecar into the output directory.

#pragma once

#include "heliumjcm/config.hpp"
#include "heliumjcm/spectroscopy.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace heliumjcm {

std::string version();

struct TaskOutcome {
    std::vector<std::string> files;
    std::vector<PointFailure> failures;  // non-empty: numerical failure, manifest written
    bool self_test_failed = false;
};

struct SelfTestCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Hydrogenic limit, closure sum rules, the B_y = 0 fan, orthonormality and trace.
std::vector<SelfTestCheck> run_self_test_checks(const RunConfig& cfg);

// Throws ConfigError for invalid configurations and heliumjcm::Error subclasses
// for failures that abort the whole run.
TaskOutcome run_task(Task task, const RunConfig& cfg, const std::string& out_dir, int threads, std::ostream& log);

} // namespace heliumjcm
