#include "dobkit/transform.hpp"

#include <cmath>
#include <limits>

#include "dobkit/linalg.hpp"

namespace dobkit {

namespace {

Vec shift_row_right(const Vec& row) {
    Vec out(row.size(), 0.0);
    for (size_t j = 1; j < row.size(); ++j) out[j] = row[j - 1];
    return out;
}

Mat outer(const Vec& col, const Vec& row) {
    Mat m(static_cast<int>(col.size()), static_cast<int>(row.size()));
    for (size_t i = 0; i < col.size(); ++i)
        for (size_t j = 0; j < row.size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = col[i] * row[j];
    return m;
}

}  // namespace

BlockMatrices build_blocks(const PlantModel& plant, const NominalModel& nom,
                           const OuterController& ctrl, const AugmentedNominal& aug,
                           const QFilterConfig& qf, double g, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("build_blocks: tau must be positive");
    BlockMatrices bm;
    bm.l = qf.l;
    bm.nu = plant.nu;
    bm.n_e = aug.n_e;
    bm.g = g;
    bm.g_bar = nom.g_bar;
    bm.a0 = qf.a[0];
    bm.tau = tau;
    bm.D = ctrl.D;

    const int l = qf.l;
    const int nu = plant.nu;
    const double a0 = qf.a[0];
    const double g_bar = nom.g_bar;

    bm.T1 = qfilter_T(qf.a, 1.0);
    bm.C1 = qfilter_C(a0, qf.c, 1.0, qf.l, qf.m);
    bm.T1inv = inverse_unit_upper(bm.T1);
    bm.Cbar1 = bm.C1 - Mat::row(bm.T1.extract_row(0));
    bm.T1_el = bm.T1 * unit_vec(l, l);

    const Vec c1row = bm.C1.extract_row(0);
    Vec c1anu = c1row;
    for (int k = 0; k < nu; ++k) c1anu = shift_row_right(c1anu);
    bm.C1Anu_T1inv = (Mat::row(c1anu) * bm.T1inv).extract_row(0);

    const Mat A_l = up_shift(l);
    const Vec e1 = unit_vec(l, 1);
    const Vec el = unit_vec(l, l);
    const Vec enu = unit_vec(l, nu);

    bm.A11 = A_l - a0 * outer(bm.T1_el, e1) + (g / g_bar) * outer(enu, bm.C1Anu_T1inv);
    bm.A12 = (-g * a0) * outer(enu, c1row);
    bm.A21 = (-1.0 / g_bar) * outer(el, bm.C1Anu_T1inv);
    bm.A22 = A_l + a0 * outer(el, bm.Cbar1.extract_row(0));

    bm.A_f = Mat(2 * l, 2 * l);
    bm.A_f.set_block(0, 0, bm.A11);
    bm.A_f.set_block(0, l, bm.A12);
    bm.A_f.set_block(l, 0, bm.A21);
    bm.A_f.set_block(l, l, bm.A22);

    // Coupling row into the fast states:
    // (1/gbar) phibar^T diag(tau^{nu-1},...,1) M_l^nu(C_1) T_1^{-1}.
    const Mat Mstack1 = row_power_stack(bm.C1, nu) * bm.T1inv;
    bm.Cq_bold = Mat(1, l);
    for (int k = 0; k < nu; ++k) {
        const double w = nom.phi_bar[k] * std::pow(tau, nu - 1 - k) / g_bar;
        for (int j = 0; j < l; ++j) bm.Cq_bold(0, j) += w * Mstack1(k, j);
    }

    bm.T_tau = qfilter_T(qf.a, tau);
    bm.C_tau = qfilter_C(a0, qf.c, tau, qf.l, qf.m);
    bm.T_tau_inv = inverse_unit_upper(bm.T_tau);
    {
        const Vec t0 = bm.T_tau.extract_row(0);
        Vec cb = bm.C_tau.extract_row(0);
        for (int j = 0; j < l; ++j) cb[j] -= t0[j];
        bm.Cbar_tau = cb;
    }

    // Coupling row applied to xi_star:
    // (1/gbar) phibar^T M_l^nu(tau^{-1} Cbar_tau) T_tau^{-1} [e_2 ... e_{nu+1} 0].
    {
        const Mat Mbar =
            row_power_stack(Mat::row(scaled(bm.Cbar_tau, 1.0 / tau)), nu) * bm.T_tau_inv;
        Vec phiM(l, 0.0);
        for (int k = 0; k < nu; ++k)
            for (int j = 0; j < l; ++j) phiM[j] += nom.phi_bar[k] * Mbar(k, j) / g_bar;
        bm.Cbar_bold = Mat(1, aug.n_e);
        // Column j of the selector is e_{j+1} for j = 1..nu, zero afterwards.
        for (int j = 0; j < nu; ++j) bm.Cbar_bold(0, j) = phiM[j + 1];
    }

    const Vec Enu = unit_vec(aug.n_e, nu);
    bm.F1 = (-g / g_bar) * outer(Enu, bm.C1Anu_T1inv);
    bm.F2 = (g * a0) * outer(Enu, c1row);
    bm.F = Mat(aug.n_e, 2 * l);
    bm.F.set_block(0, 0, bm.F1);
    bm.F.set_block(0, l, bm.F2);

    // Noise vector of the error dynamics: N = [gbar D B_nu; -Gbar; K; 0].
    bm.N.assign(aug.n_e, 0.0);
    bm.N[aug.off_x + nu - 1] = g_bar * ctrl.D;
    for (int i = 0; i < aug.dim_zbar; ++i) bm.N[aug.off_zbar + i] = -nom.G_bar[i];
    for (int i = 0; i < aug.dim_theta; ++i) bm.N[aug.off_theta + i] = ctrl.K[i];

    bm.N_xi = scaled(enu, g * ctrl.D);
    bm.N_zeta = scaled(el, -ctrl.D);
    bm.N_e = scaled(Enu, (g_bar - g) * ctrl.D);
    axpy(bm.N_e, -1.0, bm.N);

    bm.check_e.assign(2 * l, 0.0);
    bm.check_e[nu - 1] = -g;
    bm.check_e[2 * l - 1] = 1.0;

    bm.alpha.assign(2 * l, 0.0);
    for (int i = 0; i < l; ++i) bm.alpha[i] = a0 * bm.T1_el[i];

    bm.N_eta = concat(bm.N_xi, bm.N_zeta);

    bm.Cq_check = Mat(1, 2 * l);
    for (int j = 0; j < l; ++j) bm.Cq_check(0, j) = bm.Cq_bold(0, j);

    bm.Delta.resize(l);
    double tp = 1.0;
    for (int i = 0; i < l; ++i) {
        tp *= tau;
        bm.Delta[i] = tp;
    }
    return bm;
}

FastStabilityReport validate_fast_stability(const PlantModel& plant, const NominalModel& nom,
                                            const OuterController& ctrl,
                                            const AugmentedNominal& aug, const QFilterConfig& qf,
                                            int grid_points) {
    FastStabilityReport rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    const int pts = std::max(2, grid_points);
    for (int i = 0; i < pts; ++i) {
        const double g =
            plant.g_lo + (plant.g_hi - plant.g_lo) * static_cast<double>(i) / (pts - 1);
        const BlockMatrices bm = build_blocks(plant, nom, ctrl, aug, qf, g, 1.0);
        const HurwitzResult h = is_hurwitz(bm.A_f);
        if (h.margin > rep.worst_margin) {
            rep.worst_margin = h.margin;
            rep.worst_g = g;
        }
        if (!h.hurwitz)
            throw ConfigError("/qfilter/a", "fast block A_f is not Hurwitz at gain g = " +
                                                std::to_string(g) + " (eigenvalue real part " +
                                                std::to_string(h.margin) + ")");
    }
    return rep;
}

Vec AnalysisContext::chi(const LoopState& s) const {
    Vec out = concat(concat(s.x, s.zbar), concat(s.theta, s.z));
    return out;
}

double AnalysisContext::u_r(const LoopState& s) const {
    const double y_meas = s.x[0] + s.v;
    return dot(scn_.ctrl.L, s.theta) + scn_.ctrl.D * (scn_.r.value(s.t) - y_meas);
}

double AnalysisContext::lumped(const LoopState& s, double ur) const {
    return lumped_disturbance(scn_.plant, scn_.nominal, s.x, s.z, s.zbar, ur,
                              scn_.d.value(s.t), s.t);
}

Vec AnalysisContext::xi_star(const Vec& chi_vec, double r) const {
    Vec out = scn_.aug.A_s * chi_vec;
    axpy(out, r, scn_.aug.B);
    return out;
}

double AnalysisContext::zeta_star(double ur, double bfd, double v) const {
    const double g = scn_.plant.g;
    return (ur - bfd + scn_.nominal.g_bar * scn_.ctrl.D * v / g) / scn_.qfilter.a[0];
}

AnalysisContext::LoopDerivs AnalysisContext::loop_derivs(const LoopState& s, double dhat) const {
    LoopDerivs out;
    const double y_meas = s.x[0] + s.v;
    const double r = scn_.r.value(s.t);
    const ControllerEval ce = controller_eval(scn_.ctrl, s.theta, y_meas, r);
    const double u = ce.u - dhat;
    const PlantDeriv pd = plant_deriv(scn_.plant, s.x, s.z, u, scn_.d.value(s.t), s.t);
    out.xdot = pd.xdot;
    out.zdot = pd.zdot;
    out.thetadot = ce.theta_dot;
    out.zbardot = scn_.nominal.S_bar * s.zbar;
    axpy(out.zbardot, y_meas, scn_.nominal.G_bar);
    return out;
}

AnalysisContext::StarDot AnalysisContext::star_derivatives(const LoopState& s,
                                                           double dhat) const {
    const LoopDerivs d = loop_derivs(s, dhat);
    const Vec chi_dot = concat(concat(d.xdot, d.zbardot), concat(d.thetadot, d.zdot));
    StarDot out;
    // d/dt (A_s chi + B r), row nu.
    const int nu = scn_.plant.nu;
    double acc = 0.0;
    for (int j = 0; j < scn_.aug.n_e; ++j) acc += scn_.aug.A_s(nu - 1, j) * chi_dot[j];
    acc += scn_.aug.B[nu - 1] * scn_.r.derivative(s.t);
    out.xi_star_dot_nu = acc;

    // d/dt zeta_star via the noise-free algebraic form
    // (gbar (L theta + D (r - x1)) - (phi-phibar)^T x - psi^T z + psibar^T zbar
    //  - f - g d) / (a0 g); the v terms cancel identically.
    const PlantModel& pl = scn_.plant;
    const NominalModel& nm = scn_.nominal;
    double acc2 = nm.g_bar * (dot(scn_.ctrl.L, d.thetadot) +
                              scn_.ctrl.D * (scn_.r.derivative(s.t) - d.xdot[0]));
    for (size_t i = 0; i < s.x.size(); ++i) acc2 -= (pl.phi[i] - nm.phi_bar[i]) * d.xdot[i];
    acc2 -= dot(pl.psi, d.zdot);
    acc2 += dot(nm.psi_bar, d.zbardot);
    acc2 -= pl.f.total_derivative(s.x, s.z, s.t, d.xdot, d.zdot);
    acc2 -= pl.g * scn_.d.derivative(s.t);
    out.zeta_star_dot = acc2 / (scn_.qfilter.a[0] * pl.g);
    return out;
}

TransformedState AnalysisContext::forward(const LoopState& s, const Vec& chi_n,
                                          double tau) const {
    if (!(tau > 0.0)) throw std::invalid_argument("forward: tau must be positive");
    const int l = scn_.qfilter.l;
    const int nu = scn_.plant.nu;
    const Vec chi_vec = chi(s);
    const double r = scn_.r.value(s.t);
    const Vec xs = xi_star(chi_vec, r);
    const double ur = u_r(s);
    const double bfd = lumped(s, ur);
    const double zs = zeta_star(ur, bfd, s.v);

    TransformedState ts;
    ts.xi.assign(l, 0.0);
    ts.zeta.assign(l, 0.0);
    double tp = 1.0;
    const double scale_xi = std::pow(tau, -nu - 1);
    const double scale_zeta = std::pow(tau, -l - 1);
    for (int i = 0; i < l; ++i) {
        tp *= tau;
        const double qi = s.q[i] - (i < nu ? s.x[i] : 0.0);
        ts.xi[i] = scale_xi * tp * qi;
        ts.zeta[i] = scale_zeta * tp * s.p[i];
    }
    ts.xi[nu] -= xs[nu - 1];
    ts.zeta[0] -= zs;

    if (static_cast<int>(chi_n.size()) != scn_.aug.n_e)
        throw std::invalid_argument("forward: chi_n dimension mismatch");
    ts.e.assign(scn_.aug.n_e, 0.0);
    for (int i = 0; i < scn_.aug.n_e; ++i) ts.e[i] = chi_vec[i] - chi_n[i];
    return ts;
}

TransformedDeriv transformed_deriv(const TransformedState& ts, const BlockMatrices& bm,
                                   const Mat& A_s, const Vec& xi_star, double xi_star_dot_nu,
                                   double zeta_star_dot, double v) {
    const int l = bm.l;
    const int nu = bm.nu;
    const double tau = bm.tau;

    double coupling = 0.0;
    for (int j = 0; j < l; ++j) coupling += bm.Cq_bold(0, j) * ts.xi[j];
    for (int j = 0; j < bm.n_e; ++j) coupling += bm.Cbar_bold(0, j) * xi_star[j];

    Vec tau_xi_dot = bm.A11 * ts.xi;
    axpy(tau_xi_dot, 1.0, bm.A12 * ts.zeta);
    tau_xi_dot[nu - 1] += -tau * bm.g * coupling;
    tau_xi_dot[nu] += -tau * xi_star_dot_nu;
    const double noise_gain = bm.a0 / std::pow(tau, nu);
    for (int i = 0; i < l; ++i) tau_xi_dot[i] += noise_gain * bm.T1_el[i] * v;
    axpy(tau_xi_dot, v, bm.N_xi);

    Vec tau_zeta_dot = bm.A21 * ts.xi;
    axpy(tau_zeta_dot, 1.0, bm.A22 * ts.zeta);
    tau_zeta_dot[l - 1] += tau * coupling;
    tau_zeta_dot[0] += -tau * zeta_star_dot;
    axpy(tau_zeta_dot, v, bm.N_zeta);

    TransformedDeriv out;
    out.e_dot = A_s * ts.e;
    axpy(out.e_dot, 1.0, bm.F1 * ts.xi);
    axpy(out.e_dot, 1.0, bm.F2 * ts.zeta);
    out.e_dot[nu - 1] += tau * bm.g * coupling;
    axpy(out.e_dot, v, bm.N_e);

    out.xi_dot = scaled(std::move(tau_xi_dot), 1.0 / tau);
    out.zeta_dot = scaled(std::move(tau_zeta_dot), 1.0 / tau);
    return out;
}

double dhat_from_transform(const BlockMatrices& bm, double bfd, const Vec& xi, const Vec& zeta,
                           double v, const Vec& xi_star) {
    double coupling = 0.0;
    for (int j = 0; j < bm.l; ++j) coupling += bm.Cq_bold(0, j) * xi[j];
    for (int j = 0; j < bm.n_e; ++j) coupling += bm.Cbar_bold(0, j) * xi_star[j];
    double out = bfd;
    out += dot(bm.C1Anu_T1inv, xi) / bm.g_bar;
    double c1zeta = 0.0;
    for (int j = 0; j < bm.l; ++j) c1zeta += bm.C1(0, j) * zeta[j];
    out -= bm.a0 * c1zeta;
    out += (bm.g - bm.g_bar) / bm.g * bm.D * v;
    out -= bm.tau * coupling;
    return out;
}

}  // namespace dobkit
