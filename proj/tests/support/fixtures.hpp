#pragma once

#include "dobkit/scenario.hpp"

namespace dobkit::test {

/// Desk-scale benchmark: relative-degree-2 plant with one internal state,
/// a PI-type outer loop, and a third-order Q-filter with a (tau s + 1)^3
/// denominator. Satisfies every model assumption; used across the suites.
inline Scenario benchmark_scenario() {
    Scenario scn;
    scn.plant.nu = 2;
    scn.plant.n = 3;
    scn.plant.phi = {-1.0, -1.5};
    scn.plant.psi = {0.5};
    scn.plant.S = Mat(1, 1, {-2.0});
    scn.plant.G = {1.0};
    scn.plant.g = 1.1;
    scn.plant.g_lo = 0.8;
    scn.plant.g_hi = 1.2;
    scn.plant.f = StateDisturbance::sin_x1(0.1);

    scn.nominal.phi_bar = {-1.0, -2.0};
    scn.nominal.psi_bar = {0.4};
    scn.nominal.g_bar = 1.0;
    scn.nominal.S_bar = Mat(1, 1, {-2.0});
    scn.nominal.G_bar = {1.0};

    scn.ctrl.n_c = 1;
    scn.ctrl.J = Mat(1, 1, {0.0});
    scn.ctrl.K = {1.0};
    scn.ctrl.L = {2.0};
    scn.ctrl.D = 3.0;

    scn.qfilter.l = 3;
    scn.qfilter.m = 3;
    scn.qfilter.a = {1.0, 3.0, 3.0};
    scn.qfilter.c = {};
    scn.qfilter.tau = 0.05;

    scn.r = Signal::constant(1.0);
    scn.d = Signal::sine(0.5, 2.0);

    scn.sim.step = 1e-4;
    scn.sim.horizon = 20.0;
    scn.sim.seed = 1;

    scn.design.present = true;
    scn.design.eps_U = 0.05;
    scn.design.eps_T = 0.2;
    scn.design.mu = 0.0;
    scn.design.sample_budget = 20000;

    scn.finalize();
    return scn;
}

/// Same benchmark with a perfectly matched plant (no uncertainty, no state
/// disturbance); the lumped disturbance reduces to the external d alone.
inline Scenario matched_scenario() {
    Scenario scn = benchmark_scenario();
    scn.plant.phi = scn.nominal.phi_bar;
    scn.plant.psi = scn.nominal.psi_bar;
    scn.plant.g = 1.0;
    scn.plant.g_lo = 0.9;
    scn.plant.g_hi = 1.1;
    scn.plant.S = scn.nominal.S_bar;
    scn.plant.G = scn.nominal.G_bar;
    scn.plant.f = StateDisturbance::none();
    scn.finalize();
    return scn;
}

}  // namespace dobkit::test
