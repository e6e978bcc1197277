#include "dobkit/dob.hpp"

#include <cmath>

#include "dobkit/linalg.hpp"

namespace dobkit {

void QFilterConfig::validate(int nu) const {
    if (l < 1) throw ConfigError("/qfilter/l", "filter order must be >= 1");
    if (!(l >= m && m > nu))
        throw ConfigError("/qfilter/m", "need l >= m > nu (m = nu amplifies noise directly)");
    if (static_cast<int>(a.size()) != l)
        throw ConfigError("/qfilter/a", "expected l denominator coefficients");
    for (double ai : a)
        if (!(ai > 0.0))
            throw ConfigError("/qfilter/a", "denominator coefficients must be positive");
    if (static_cast<int>(c.size()) != l - m)
        throw ConfigError("/qfilter/c", "expected l - m numerator coefficients");
    for (double ci : c)
        if (ci < 0.0) throw ConfigError("/qfilter/c", "numerator coefficients must be nonnegative");
    if (!(tau > 0.0)) throw ConfigError("/qfilter/tau", "time constant must be positive");
    if (s_bar && !(*s_bar > 0.0))
        throw ConfigError("/qfilter/s_bar", "saturation level must be positive");
}

DobRealization::DobRealization(const PlantModel& plant, const NominalModel& nom,
                               const QFilterConfig& cfg, double tau, double s_bar)
    : l_(cfg.l), nz_(plant.n - plant.nu), tau_(tau), s_bar_(s_bar) {
    cfg.validate(plant.nu);
    if (!(tau > 0.0)) throw ConfigError("/qfilter/tau", "time constant must be positive");
    if (!(s_bar > 0.0)) throw ConfigError("/qfilter/s_bar", "saturation level must be positive");
    S_bar_ = nom.S_bar;
    G_bar_ = nom.G_bar;

    const double a0 = cfg.a[0];
    const Mat T = qfilter_T(cfg.a, tau);
    const Mat C = qfilter_C(a0, cfg.c, tau, cfg.l, cfg.m);
    const Mat Tinv = inverse_unit_upper(T);
    const double gain = a0 / std::pow(tau, cfg.l);

    kq_ = scaled(T * unit_vec(cfg.l, cfg.l), gain);
    kp_row_ = scaled(T.extract_row(0), gain);
    yp_row_ = scaled(C.extract_row(0), gain);

    // w = -(1/gbar)(psibar^T zbar + phibar^T M_l^nu(C_tau) T_tau^-1 q)
    //     + (1/gbar) C_tau A_l^nu T_tau^-1 q
    const Mat M = row_power_stack(C, plant.nu);
    const Mat MTinv = M * Tinv;
    Vec phiM(cfg.l, 0.0);
    for (int k = 0; k < plant.nu; ++k)
        for (int j = 0; j < cfg.l; ++j) phiM[j] += nom.phi_bar[k] * MTinv(k, j);

    Mat CA = C;  // C_tau A_l^nu
    for (int k = 0; k < plant.nu; ++k) {
        Mat shifted(1, cfg.l);
        for (int j = 1; j < cfg.l; ++j) shifted(0, j) = CA(0, j - 1);
        CA = shifted;
    }
    const Vec CATinv = (CA * Tinv).extract_row(0);

    w_q_row_.assign(cfg.l, 0.0);
    for (int j = 0; j < cfg.l; ++j) w_q_row_[j] = (CATinv[j] - phiM[j]) / nom.g_bar;
    w_zbar_row_ = scaled(nom.psi_bar, -1.0 / nom.g_bar);
}

DobDeriv DobRealization::deriv(const DobState& s, double y_meas, double u) const {
    if (static_cast<int>(s.q.size()) != l_ || static_cast<int>(s.p.size()) != l_ ||
        static_cast<int>(s.zbar.size()) != nz_)
        throw std::invalid_argument("DobRealization::deriv: state dimension mismatch");
    DobDeriv d;
    d.zbar_dot = S_bar_ * s.zbar;
    axpy(d.zbar_dot, y_meas, G_bar_);

    // qdot = A_l q - kq (q1 - y_meas)
    d.q_dot.assign(l_, 0.0);
    for (int i = 0; i + 1 < l_; ++i) d.q_dot[i] = s.q[i + 1];
    axpy(d.q_dot, -(s.q[0] - y_meas), kq_);

    // pdot = A_l p + e_l (-kp_row . p + u)
    d.p_dot.assign(l_, 0.0);
    for (int i = 0; i + 1 < l_; ++i) d.p_dot[i] = s.p[i + 1];
    d.p_dot[l_ - 1] += -dot(kp_row_, s.p) + u;
    return d;
}

double DobRealization::compute_w(const Vec& zbar, const Vec& q) const {
    return dot(w_zbar_row_, zbar) + dot(w_q_row_, q);
}

double DobRealization::compute_yp(const Vec& p) const { return dot(yp_row_, p); }

SatResult DobRealization::dhat(double w, double yp) const {
    const double raw = w - yp;
    if (std::abs(raw) > s_bar_) return {raw > 0.0 ? s_bar_ : -s_bar_, true};
    return {raw, false};
}

DobState DobRealization::zero_state() const {
    return {Vec(nz_, 0.0), Vec(l_, 0.0), Vec(l_, 0.0)};
}

}  // namespace dobkit
