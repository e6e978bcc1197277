#pragma once

#include "dobkit/bounds.hpp"
#include "dobkit/sim.hpp"

namespace dobkit {

struct ProbeResult {
    double tau = 0.0;
    double sup_e = 0.0;
    double tail_sup_e = 0.0;
    double margin_transient = 0.0;  // (eps_T - sup_e) / eps_T
    double margin_steady = 0.0;     // (eps_U - tail) / eps_U
    bool pass = false;
    bool diverged = false;
};

struct VerifyReport {
    bool all_pass = false;
    std::vector<ProbeResult> probes;
    CrossCheckReport crosscheck;
    bool crosscheck_ok = false;
    double eps_T = 0.0, eps_U = 0.0;
};

/// Simulates log-spaced tau probes inside the designed interval and checks
/// the transient/steady-state targets; also reruns the transform
/// cross-check and estimate-identity residual at the recommended tau.
/// Refuses infeasible designs.
VerifyReport verify_design(const Scenario& scn, const DesignResult& dr, int n_probe);

}  // namespace dobkit
