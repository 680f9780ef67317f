// runner.hpp - scenario execution, comparison report and artifacts

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tclk/operators.hpp"
#include "tclk/scenario.hpp"

namespace tclk::cli {

/// 1/2 sum |eig(rho1 - rho2)|. Throws std::invalid_argument on a dimension
/// mismatch or non-Hermitian input.
double trace_distance(const Matrix& rho1, const Matrix& rho2);

struct RunFlags {
    std::optional<std::string> out_dir;
    std::optional<std::vector<std::string>> only;
    bool quiet{false};
    bool write_artifacts{true};
};

struct RunResult {
    int exit_code{0};
    nlohmann::json report;   // deterministic, no timings
    std::string text_report; // includes wall-clock timings
    std::vector<std::string> failures;
};

/// Metric names a gate may refer to for the given run list.
std::vector<std::string> gate_metrics(const std::vector<std::string>& runs);

/// Executes the scenario. Validation problems raise ScenarioError; pipeline
/// failures and failing gates give exit code 1.
RunResult run_scenario(const Scenario& scenario, const RunFlags& flags, std::ostream& log);

/// Full command: load, run, write artifacts. Exit code 0, 1 or 2.
int run(const std::string& scenario_path, const RunFlags& flags, std::ostream& out, std::ostream& err);

} // namespace tclk::cli
