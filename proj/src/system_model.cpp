#include "dobkit/system_model.hpp"

#include <cmath>

#include "dobkit/linalg.hpp"

namespace dobkit {

void PlantModel::validate() const {
    if (nu < 1) throw ConfigError("/plant/nu", "relative degree must be >= 1");
    if (n <= nu) throw ConfigError("/plant/n", "state dimension must exceed relative degree");
    const int nz = n - nu;
    if (static_cast<int>(phi.size()) != nu) throw ConfigError("/plant/phi", "expected length nu");
    if (static_cast<int>(psi.size()) != nz)
        throw ConfigError("/plant/psi", "expected length n - nu");
    if (S.rows() != nz || S.cols() != nz)
        throw ConfigError("/plant/S", "expected (n-nu) x (n-nu)");
    if (static_cast<int>(G.size()) != nz) throw ConfigError("/plant/G", "expected length n - nu");
    const HurwitzResult hs = is_hurwitz(S);
    if (!hs.hurwitz)
        throw ConfigError("/plant/S", "internal dynamics must be Hurwitz (margin " +
                                          std::to_string(hs.margin) + ")");
    if (g_lo == 0.0 || g_hi == 0.0 || (g_lo < 0.0) != (g_hi < 0.0))
        throw ConfigError("/plant/g_lo", "gain bounds must be nonzero with equal sign");
    if (g_lo > g_hi) throw ConfigError("/plant/g_lo", "gain bounds out of order");
    if (g < std::min(g_lo, g_hi) || g > std::max(g_lo, g_hi))
        throw ConfigError("/plant/g", "true gain must lie inside the declared bounds");
}

void NominalModel::validate(const PlantModel& plant) const {
    const int nz = plant.n - plant.nu;
    if (static_cast<int>(phi_bar.size()) != plant.nu)
        throw ConfigError("/nominal/phi", "expected length nu");
    if (static_cast<int>(psi_bar.size()) != nz)
        throw ConfigError("/nominal/psi", "expected length n - nu");
    if (S_bar.rows() != nz || S_bar.cols() != nz)
        throw ConfigError("/nominal/S", "expected (n-nu) x (n-nu)");
    if (static_cast<int>(G_bar.size()) != nz)
        throw ConfigError("/nominal/G", "expected length n - nu");
    if (g_bar == 0.0) throw ConfigError("/nominal/g", "nominal gain must be nonzero");
    const HurwitzResult hs = is_hurwitz(S_bar);
    if (!hs.hurwitz)
        throw ConfigError("/nominal/S", "nominal internal dynamics must be Hurwitz (margin " +
                                            std::to_string(hs.margin) + ")");
}

void OuterController::validate() const {
    if (n_c < 0) throw ConfigError("/controller", "state dimension must be nonnegative");
    if (J.rows() != n_c || J.cols() != n_c)
        throw ConfigError("/controller/J", "expected n_c x n_c");
    if (static_cast<int>(K.size()) != n_c) throw ConfigError("/controller/K", "expected length n_c");
    if (static_cast<int>(L.size()) != n_c) throw ConfigError("/controller/L", "expected length n_c");
}

PlantDeriv plant_deriv(const PlantModel& plant, const Vec& x, const Vec& z, double u, double d,
                       double t) {
    if (static_cast<int>(x.size()) != plant.nu || static_cast<int>(z.size()) != plant.n - plant.nu)
        throw std::invalid_argument("plant_deriv: state dimension mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("plant_deriv: non-finite state");
    if (!std::isfinite(u)) throw std::invalid_argument("plant_deriv: non-finite input");

    PlantDeriv out;
    out.xdot.resize(x.size());
    const int nu = plant.nu;
    for (int i = 0; i + 1 < nu; ++i) out.xdot[i] = x[i + 1];
    const double drive =
        dot(plant.phi, x) + dot(plant.psi, z) + plant.f.value(x, z, t) + plant.g * (u + d);
    out.xdot[nu - 1] = drive;
    out.zdot = plant.S * z;
    axpy(out.zdot, x[0], plant.G);
    out.y = x[0];
    return out;
}

ControllerEval controller_eval(const OuterController& ctrl, const Vec& theta, double y_meas,
                               double r) {
    if (static_cast<int>(theta.size()) != ctrl.n_c)
        throw std::invalid_argument("controller_eval: state dimension mismatch");
    ControllerEval out;
    const double err = r - y_meas;
    out.theta_dot = ctrl.J * theta;
    axpy(out.theta_dot, err, ctrl.K);
    out.u = dot(ctrl.L, theta) + ctrl.D * err;
    return out;
}

AugmentedNominal assemble_augmented(const PlantModel& plant, const NominalModel& nom,
                                    const OuterController& ctrl) {
    const int nu = plant.nu;
    const int nz = plant.n - plant.nu;
    const int nc = ctrl.n_c;
    AugmentedNominal aug;
    aug.dim_x = nu;
    aug.dim_zbar = nz;
    aug.dim_theta = nc;
    aug.dim_z = nz;
    aug.off_x = 0;
    aug.off_zbar = nu;
    aug.off_theta = nu + nz;
    aug.off_z = nu + nz + nc;
    aug.n_e = nu + nz + nc + nz;

    Mat A(aug.n_e, aug.n_e);
    Vec B(aug.n_e, 0.0);

    // Output chain: xdot_i = x_{i+1}, last row collects the feedback terms
    // with u_n = L theta + D (r - x1).
    for (int i = 0; i + 1 < nu; ++i) A(i, i + 1) = 1.0;
    const int rx = nu - 1;
    for (int j = 0; j < nu; ++j) A(rx, j) += nom.phi_bar[j];
    for (int j = 0; j < nz; ++j) A(rx, aug.off_zbar + j) += nom.psi_bar[j];
    for (int j = 0; j < nc; ++j) A(rx, aug.off_theta + j) += nom.g_bar * ctrl.L[j];
    A(rx, 0) -= nom.g_bar * ctrl.D;
    B[rx] = nom.g_bar * ctrl.D;

    // Nominal internal dynamics driven by y_n = x1.
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < nz; ++j) A(aug.off_zbar + i, aug.off_zbar + j) = nom.S_bar(i, j);
        A(aug.off_zbar + i, 0) += nom.G_bar[i];
    }

    // Controller state.
    for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nc; ++j) A(aug.off_theta + i, aug.off_theta + j) = ctrl.J(i, j);
        A(aug.off_theta + i, 0) -= ctrl.K[i];
        B[aug.off_theta + i] = ctrl.K[i];
    }

    // Virtual internal dynamics of the true plant, driven by y_n.
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < nz; ++j) A(aug.off_z + i, aug.off_z + j) = plant.S(i, j);
        A(aug.off_z + i, 0) += plant.G[i];
    }

    const HurwitzResult h = is_hurwitz(A);
    if (!h.hurwitz)
        throw ConfigError("/controller",
                          "nominal closed loop is not asymptotically stable (eigenvalue real "
                          "part " +
                              std::to_string(h.margin) + "); outer controller is not well designed");
    aug.A_s = std::move(A);
    aug.B = std::move(B);
    aug.hurwitz_margin = h.margin;
    return aug;
}

double lumped_disturbance(const PlantModel& plant, const NominalModel& nom, const Vec& x,
                          const Vec& z, const Vec& zbar, double u_r, double d, double t) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += (plant.phi[i] - nom.phi_bar[i]) * x[i];
    s += dot(plant.psi, z) - dot(nom.psi_bar, zbar);
    s += plant.f.value(x, z, t) + plant.g * d + (plant.g - nom.g_bar) * u_r;
    return s / plant.g;
}

}  // namespace dobkit
