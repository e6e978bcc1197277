#pragma once

#include <cstdint>
#include <optional>

#include "dobkit/rng.hpp"
#include "dobkit/scenario.hpp"
#include "dobkit/transform.hpp"

namespace dobkit {

/// Deterministic bounded noise source. `sample` must be called once per
/// integration step, in time order; the value is held across the step's
/// internal stages (sample-and-hold; the bound allows discontinuous noise).
class NoiseGen {
public:
    NoiseGen(const NoiseSpec& spec, std::uint64_t seed);
    double sample(double t);

private:
    NoiseSpec spec_;
    Rng rng_;
};

struct Trajectory {
    Vec times;
    Vec e_norm;
    Vec dhat;
    Vec w_minus_yp;
    Vec noise;  // held sample per step
    std::vector<std::uint8_t> sat_active;
    std::vector<Vec> stacked;  // full integrator state per sample when recorded
    bool full_states = false;
    bool diverged = false;
    double divergence_time = 0.0;
    double step = 0.0;
    double tau = 0.0;
    double s_bar = 0.0;

    double sup_e() const;
    double tail_sup_e(double tail_fraction = 0.2) const;
    double saturation_fraction() const;
};

struct PerformanceReport {
    double tau = 0.0;
    double sup_e = 0.0;
    double tail_sup_e = 0.0;
    double saturation_fraction = 0.0;
    bool pass_transient = false;
    bool pass_steady = false;
    bool diverged = false;
};

/// Per-run adjustments on top of the scenario's sim section.
struct SimOverrides {
    std::optional<double> tau;
    std::optional<NoiseSpec> noise;
    std::optional<double> step;
    std::optional<double> horizon;
    std::optional<std::uint64_t> seed;
    bool record_full = false;
};

/// Stacked-state layout of the lock-step integration:
/// [x; z; theta; zbar; q; p; chi_n].
struct StackLayout {
    int nu = 0, nz = 0, nc = 0, l = 0, n_e = 0;
    int off_x = 0, off_z = 0, off_theta = 0, off_zbar = 0, off_q = 0, off_p = 0, off_chin = 0;
    int total = 0;

    static StackLayout of(const Scenario& scn);
    LoopState unpack(const Vec& y, double t, double v) const;
    Vec chi(const Vec& y) const;
    Vec chi_n(const Vec& y) const;
};

/// Saturation level actually in effect: the configured value, or the
/// automatic default (10x an estimated bound of the lumped disturbance).
/// The estimate is a pure function of the scenario, independent of the
/// simulation seed.
double resolved_s_bar(const Scenario& scn);

/// Classical fixed-step RK4 on the full closed loop (plant + outer
/// controller + DOB) locked to the nominal system. Divergence (state norm
/// beyond 1e9 or non-finite) aborts with the partial trajectory flagged.
Trajectory integrate(const Scenario& scn, const SimOverrides& ov = {});

/// Integrates the transformed dynamics (fast coordinates + error) directly,
/// reconstructing the unsaturated estimate from the closed-form identity.
/// Used to cross-check the transform against the physical loop.
Trajectory integrate_transformed(const Scenario& scn, const SimOverrides& ov = {});

PerformanceReport make_report(const Trajectory& tr, double eps_T, double eps_U);

/// One simulation per grid point with identical seeds, distributed over
/// worker threads (capped by DOBBENCH_THREADS) and merged in grid order.
std::vector<PerformanceReport> sweep_tau(const Scenario& scn, const Vec& tau_grid);

struct CrossCheckReport {
    double max_e_deviation = 0.0;
    double max_dhat_residual = 0.0;  // relative to 1 + |w - y_p|
    double saturation_fraction = 0.0;
};

/// Runs both integration routes and the estimate-identity residual scan
/// on the same noise sequence.
CrossCheckReport transform_crosscheck(const Scenario& scn, const SimOverrides& ov = {});

}  // namespace dobkit
