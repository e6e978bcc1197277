#pragma once

#include "dobkit/errors.hpp"
#include "dobkit/matrix.hpp"
#include "dobkit/signals.hpp"

namespace dobkit {

/// SISO uncertain plant in Byrnes-Isidori normal form: an output chain
/// x of length nu driven through the gain g, plus internal dynamics z.
///
///   xdot = A_nu x + B_nu (phi^T x + psi^T z + f(x,z,t) + g (u + d))
///   zdot = S z + G x1,   y = x1
struct PlantModel {
    int nu = 0;  // relative degree
    int n = 0;   // total state dimension
    Vec phi;     // length nu
    Vec psi;     // length n - nu
    Mat S;       // (n-nu) x (n-nu), Hurwitz
    Vec G;       // length n - nu
    double g = 0.0;
    double g_lo = 0.0;
    double g_hi = 0.0;
    StateDisturbance f = StateDisturbance::none();

    void validate() const;
};

/// Nominal counterpart of the plant; the DOB inverts this model.
struct NominalModel {
    Vec phi_bar;
    Vec psi_bar;
    double g_bar = 0.0;
    Mat S_bar;
    Vec G_bar;

    void validate(const PlantModel& plant) const;
};

/// Linear output-feedback outer controller:
///   thetadot = J theta + K (r - y_meas),  u = L theta + D (r - y_meas).
struct OuterController {
    int n_c = 0;
    Mat J;   // n_c x n_c
    Vec K;   // n_c
    Vec L;   // n_c (row)
    double D = 0.0;

    void validate() const;
};

/// Augmented nominal closed loop chi_dot = A_s chi + B r with the fixed
/// state ordering chi = [x; zbar; theta; z].
struct AugmentedNominal {
    Mat A_s;
    Vec B;
    int n_e = 0;
    double hurwitz_margin = 0.0;

    /// Offsets of the state blocks inside chi.
    int off_x = 0, off_zbar = 0, off_theta = 0, off_z = 0;
    int dim_x = 0, dim_zbar = 0, dim_theta = 0, dim_z = 0;
};

struct PlantDeriv {
    Vec xdot;
    Vec zdot;
    double y = 0.0;
};

struct ControllerEval {
    Vec theta_dot;
    double u = 0.0;
};

/// Right-hand side of the plant equations at (x, z) with input u and
/// external disturbance d at time t.
PlantDeriv plant_deriv(const PlantModel& plant, const Vec& x, const Vec& z, double u, double d,
                       double t);

/// Controller state derivative and output for a measured output and reference.
ControllerEval controller_eval(const OuterController& ctrl, const Vec& theta, double y_meas,
                               double r);

/// Builds A_s and B of the augmented nominal system and verifies the loop
/// is Hurwitz (i.e. the outer controller is well designed for the nominal
/// model). Throws ConfigError naming the unstable eigenvalue otherwise.
AugmentedNominal assemble_augmented(const PlantModel& plant, const NominalModel& nom,
                                    const OuterController& ctrl);

/// Lumped disturbance: everything the DOB is asked to cancel, expressed
/// in input units. Requires full knowledge of the true plant, so this is
/// an analysis-side quantity.
double lumped_disturbance(const PlantModel& plant, const NominalModel& nom, const Vec& x,
                          const Vec& z, const Vec& zbar, double u_r, double d, double t);

}  // namespace dobkit
