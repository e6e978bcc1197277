#pragma once

#include <string>

#include "dobkit/bounds.hpp"
#include "dobkit/sim.hpp"
#include "dobkit/verify.hpp"

namespace dobkit {

/// Command outcomes, aligned with the CLI exit-code vocabulary:
/// 0 ok, 1 configuration, 2 divergence, 3 infeasible design,
/// 4 guarantee violation, 5 numerical failure, 6 I/O failure.
struct RunStatus {
    int code = 0;
    std::string message;
    bool ok() const { return code == 0; }
};

/// Simulates the scenario, writes the trajectory CSV (when csv_path is
/// non-empty), and produces the report JSON. Divergence yields code 2 with
/// the partial trajectory written.
RunStatus run_simulate(const Scenario& scn, const std::string& csv_path,
                       std::string* report_json);

/// Runs the tau-design procedure; code 3 when infeasible (the result JSON
/// is still produced, with the binding constraint named).
RunStatus run_design(const Scenario& scn, std::string* result_json);

/// Simulates a log-spaced tau grid and writes the sweep table CSV.
RunStatus run_sweep(const Scenario& scn, double tau_min, double tau_max, int points,
                    const std::string& csv_path, std::string* report_json);

/// design + probe verification + transform cross-check.
RunStatus run_verify(const Scenario& scn, int probes, std::string* verdict_json);

// JSON serializers (shared by the commands and the acceptance suite).
std::string design_result_json(const DesignResult& dr);
std::string verify_report_json(const VerifyReport& vr, const DesignResult& dr);

void write_trajectory_csv(std::ostream& os, const Scenario& scn, const Trajectory& tr);

}  // namespace dobkit
