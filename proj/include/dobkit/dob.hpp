#pragma once

#include <optional>

#include "dobkit/errors.hpp"
#include "dobkit/matrix.hpp"
#include "dobkit/system_model.hpp"

namespace dobkit {

/// Q-filter family Q(s) = (c_{l-m} (tau s)^{l-m} + ... + c1 tau s + a0)
///                        / ((tau s)^l + a_{l-1} (tau s)^{l-1} + ... + a0).
/// Requires l >= m > nu: the filter's relative degree must strictly exceed
/// the plant's, otherwise the inverse-model path feeds measurement noise
/// straight through to the estimate.
struct QFilterConfig {
    int l = 0;
    int m = 0;
    Vec a;  // a0..a_{l-1}, all positive
    Vec c;  // c1..c_{l-m}, nonnegative
    double tau = 0.0;
    std::optional<double> s_bar;  // saturation level; unset selects the automatic default

    void validate(int nu) const;
};

/// Internal DOB state: the inverse-model state zbar plus the two Q-filter
/// states q (output side) and p (input side).
struct DobState {
    Vec zbar;
    Vec q;
    Vec p;
};

struct DobDeriv {
    Vec zbar_dot;
    Vec q_dot;
    Vec p_dot;
};

struct SatResult {
    double value = 0.0;
    bool active = false;
};

/// Precomputed realization of the DOB at a fixed tau. All per-step
/// evaluations are dot products against these rows.
class DobRealization {
public:
    DobRealization(const PlantModel& plant, const NominalModel& nom, const QFilterConfig& cfg,
                   double tau, double s_bar);

    DobDeriv deriv(const DobState& s, double y_meas, double u) const;

    /// Inverse-model branch output w (combination of zbar and q).
    double compute_w(const Vec& zbar, const Vec& q) const;
    /// Input-filter branch output y_p.
    double compute_yp(const Vec& p) const;
    /// Saturated disturbance estimate with the activity flag.
    SatResult dhat(double w, double yp) const;

    double tau() const { return tau_; }
    double saturation_level() const { return s_bar_; }
    int l() const { return l_; }

    // Realization rows for callers that integrate against a flat state.
    const Vec& kq() const { return kq_; }
    const Vec& kp_row() const { return kp_row_; }
    const Vec& w_q_row() const { return w_q_row_; }
    const Vec& w_zbar_row() const { return w_zbar_row_; }
    const Vec& yp_row() const { return yp_row_; }

    DobState zero_state() const;

private:
    int l_ = 0;
    int nz_ = 0;
    double tau_ = 0.0;
    double s_bar_ = 0.0;
    Mat S_bar_;
    Vec G_bar_;
    Vec kq_;      // (a0/tau^l) T_tau e_l
    Vec kp_row_;  // (a0/tau^l) e_1^T T_tau
    Vec w_q_row_;
    Vec w_zbar_row_;
    Vec yp_row_;  // (a0/tau^l) C_tau
};

}  // namespace dobkit
