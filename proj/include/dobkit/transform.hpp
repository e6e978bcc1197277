#pragma once

#include "dobkit/scenario.hpp"

namespace dobkit {

/// Every block of the fast/slow decomposition at a fixed plant gain g and
/// filter time constant tau. The fast matrix A_f is tau-independent; the
/// tau dependence sits in the coupling rows and the scaling vectors.
struct BlockMatrices {
    int l = 0, nu = 0, n_e = 0;
    double g = 0.0, g_bar = 0.0, a0 = 0.0, tau = 0.0, D = 0.0;

    Mat A11, A12, A21, A22;  // l x l
    Mat A_f;                 // 2l x 2l
    Mat Cq_bold;             // 1 x l    (coupling row into the fast states)
    Mat Cbar_bold;           // 1 x n_e  (coupling row applied to xi_star)
    Mat F1, F2;              // n_e x l
    Mat F;                   // n_e x 2l
    Vec N_xi, N_zeta;        // length l     (noise input vectors)
    Vec N_e;                 // length n_e
    Vec N;                   // length n_e   (noise vector of the error dynamics)
    Vec check_e;             // length 2l    (-g e_nu + e_2l)
    Vec alpha;               // length 2l    (a0 [T1 e_l; 0])
    Vec N_eta;               // length 2l
    Mat Cq_check;            // 1 x 2l

    Mat C1, T1, T1inv, Cbar1;        // tau = 1 instances
    Mat C_tau, T_tau, T_tau_inv;     // at the given tau
    Vec Cbar_tau;                    // C_tau - e_1^T T_tau (row)
    Vec C1Anu_T1inv;                 // row C_1 A_l^nu T_1^{-1}
    Vec T1_el;                       // T_1 e_l
    Vec Delta;                       // (tau, tau^2, ..., tau^l)
};

BlockMatrices build_blocks(const PlantModel& plant, const NominalModel& nom,
                           const OuterController& ctrl, const AugmentedNominal& aug,
                           const QFilterConfig& qf, double g, double tau);

/// Checks the fast block A_f is Hurwitz for every g on a uniform grid over
/// [g_lo, g_hi]. Throws ConfigError naming the offending g on failure.
struct FastStabilityReport {
    double worst_margin = 0.0;  // largest eigenvalue real part over the grid
    double worst_g = 0.0;
};
FastStabilityReport validate_fast_stability(const PlantModel& plant, const NominalModel& nom,
                                            const OuterController& ctrl,
                                            const AugmentedNominal& aug, const QFilterConfig& qf,
                                            int grid_points);

/// Fast coordinates and the tracking error.
struct TransformedState {
    Vec xi;
    Vec zeta;
    Vec e;
};

struct TransformedDeriv {
    Vec xi_dot;
    Vec zeta_dot;
    Vec e_dot;
};

/// Instantaneous snapshot of the real closed loop (plant, controller, DOB).
struct LoopState {
    double t = 0.0;
    Vec x, z, theta;
    Vec zbar, q, p;
    double v = 0.0;  // measurement noise sample in effect
};

/// Analysis-side evaluations that require full knowledge of the true plant:
/// the lumped disturbance, the starred equilibrium offsets of the fast
/// coordinates, and their time derivatives along closed-loop trajectories.
class AnalysisContext {
public:
    explicit AnalysisContext(const Scenario& scn) : scn_(scn) {}

    Vec chi(const LoopState& s) const;  // [x; zbar; theta; z]
    double u_r(const LoopState& s) const;
    double lumped(const LoopState& s, double u_r) const;

    /// xi_star = A_s chi + B r; its nu-th entry equals
    /// phibar^T x + psibar^T zbar + gbar (u_r + D v).
    Vec xi_star(const Vec& chi, double r) const;
    double zeta_star(double u_r, double bfd, double v) const;

    struct LoopDerivs {
        Vec xdot, zdot, thetadot, zbardot;
    };
    /// Closed-loop derivatives with the estimate dhat applied (u = u_r - dhat).
    LoopDerivs loop_derivs(const LoopState& s, double dhat) const;

    struct StarDot {
        double xi_star_dot_nu = 0.0;  // e_nu^T d/dt xi_star
        double zeta_star_dot = 0.0;
    };
    /// Chain-rule derivatives of the starred offsets. Noise enters only
    /// algebraically, so these stay defined for discontinuous v.
    StarDot star_derivatives(const LoopState& s, double dhat) const;

    /// Maps a loop snapshot into the fast coordinates; e = chi - chi_n.
    TransformedState forward(const LoopState& s, const Vec& chi_n, double tau) const;

private:
    const Scenario& scn_;
};

/// Right-hand sides of the transformed dynamics. xi_star must be the
/// starred offset at the same instant; v is the noise sample.
TransformedDeriv transformed_deriv(const TransformedState& ts, const BlockMatrices& bm,
                                   const Mat& A_s, const Vec& xi_star, double xi_star_dot_nu,
                                   double zeta_star_dot, double v);

/// Closed-form value of w - y_p in the transformed coordinates; equals the
/// raw (unsaturated) disturbance estimate whenever saturation is inactive.
double dhat_from_transform(const BlockMatrices& bm, double bfd, const Vec& xi, const Vec& zeta,
                           double v, const Vec& xi_star);

}  // namespace dobkit
