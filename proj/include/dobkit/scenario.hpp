#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dobkit/dob.hpp"
#include "dobkit/signals.hpp"
#include "dobkit/system_model.hpp"

namespace dobkit {

/// Bounded measurement noise generator. Every variant satisfies
/// |v(t)| <= mu for all t; square and uniform are intentionally
/// non-differentiable.
struct NoiseSpec {
    enum class Kind { None, Uniform, Sinusoid, Square };
    Kind kind = Kind::None;
    double mu = 0.0;
    double freq = 1.0;     // sinusoid only (rad/s)
    double period = 1e-3;  // square only (s)

    void validate() const;
};

struct SimConfig {
    double step = 1e-4;
    double horizon = 30.0;
    std::uint64_t seed = 1;
    NoiseSpec noise;
    Vec x0;
    Vec z0;
    Vec theta0;

    void validate(const PlantModel& plant, const OuterController& ctrl) const;
};

/// Targets and knobs for the tau-design procedure.
struct DesignSpec {
    double eps_U = 0.05;
    double eps_T = 0.2;
    double mu = 0.0;
    std::optional<double> c_U_override;
    std::optional<double> c_T_override;
    int sample_budget = 100000;
    int g_grid_points = 21;
    char settle_eig = 's';       // 's' or 'f': which lambda_max enters the settle-time bound
    double kappa1_scale = 1.0;   // diagnostic knob; values != 1 corrupt the constants on purpose
    bool present = false;

    void validate() const;
};

/// A fully validated scenario: models, DOB configuration, exogenous
/// signals, simulation settings, and (optionally) design targets.
struct Scenario {
    PlantModel plant;
    NominalModel nominal;
    OuterController ctrl;
    QFilterConfig qfilter;
    Signal r = Signal::constant(0.0);
    Signal d = Signal::constant(0.0);
    SimConfig sim;
    DesignSpec design;
    AugmentedNominal aug;  // assembled at load

    /// Validates every invariant (dimensions, Hurwitz checks, the fast-block
    /// stability assumption over the gain grid) and assembles `aug`.
    void finalize();
};

}  // namespace dobkit
