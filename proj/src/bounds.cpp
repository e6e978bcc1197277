#include "dobkit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dobkit/rng.hpp"

namespace dobkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Fixed seeds: the estimated constants are a function of the scenario
// alone, not of the simulation seed.
constexpr std::uint64_t kSamplerSeed = 0xd0bcafe01ULL;

double linspace_at(double lo, double hi, int i, int n) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

double log_at(double lo, double hi, int i, int n) {
    return lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
}

template <typename F>
double bisect(F f, double lo, double hi, double flo, int iters = 200, double rtol = 1e-10) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rtol * std::max({std::abs(lo), std::abs(hi), 1e-30})) return mid;
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Nominal closed-loop trajectory on a uniform grid (RK4).
struct NominalTable {
    double dt = 0.0;
    std::vector<Vec> chi;

    static NominalTable build(const Scenario& scn, int samples = 4000) {
        NominalTable tab;
        const int n_e = scn.aug.n_e;
        tab.dt = scn.sim.horizon / samples;
        tab.chi.reserve(samples + 1);
        Vec y(n_e, 0.0);
        const int nu = scn.plant.nu, nz = scn.plant.n - scn.plant.nu, nc = scn.ctrl.n_c;
        for (int i = 0; i < nu; ++i) y[i] = scn.sim.x0[i];
        for (int i = 0; i < nc; ++i) y[nu + nz + i] = scn.sim.theta0[i];
        for (int i = 0; i < nz; ++i) y[nu + nz + nc + i] = scn.sim.z0[i];
        auto deriv = [&](double t, const Vec& yy) {
            Vec dy = scn.aug.A_s * yy;
            axpy(dy, scn.r.value(t), scn.aug.B);
            return dy;
        };
        tab.chi.push_back(y);
        for (int k = 0; k < samples; ++k) {
            const double t = k * tab.dt;
            const Vec k1 = deriv(t, y);
            Vec tmp = y;
            axpy(tmp, 0.5 * tab.dt, k1);
            const Vec k2 = deriv(t + 0.5 * tab.dt, tmp);
            tmp = y;
            axpy(tmp, 0.5 * tab.dt, k2);
            const Vec k3 = deriv(t + 0.5 * tab.dt, tmp);
            tmp = y;
            axpy(tmp, tab.dt, k3);
            const Vec k4 = deriv(t + tab.dt, tmp);
            for (size_t i = 0; i < y.size(); ++i)
                y[i] += tab.dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
            tab.chi.push_back(y);
        }
        return tab;
    }
};

/// Uniform sample from the ellipsoid { e : e^T P_s e <= c_T }.
Vec sample_level_set(const SymEigen& ps, double c_T, Rng& rng) {
    const int n = static_cast<int>(ps.values.size());
    Vec dir(n);
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) {
        // Box-Muller; u1 in (0,1].
        const double u1 = 1.0 - rng.u01();
        const double u2 = rng.u01();
        dir[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        nrm += dir[i] * dir[i];
    }
    nrm = std::sqrt(std::max(nrm, 1e-300));
    const double radius = std::pow(rng.u01(), 1.0 / n);
    Vec e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const double w = radius * dir[j] / nrm * std::sqrt(c_T / ps.values[j]);
        for (int i = 0; i < n; ++i) e[i] += w * ps.vectors(i, j);
    }
    return e;
}

std::pair<double, double> resolve_levels(const Scenario& scn, const LyapunovData& lyap) {
    const double lmin = lyap.eig_s.lambda_min;
    const double eU = scn.design.eps_U, eT = scn.design.eps_T;
    const double c_U = scn.design.c_U_override.value_or(0.9 * lmin * eU * eU);
    const double c_T = scn.design.c_T_override.value_or(0.5 * (lmin * eU * eU + lmin * eT * eT));
    if (!(c_U < lmin * eU * eU && lmin * eU * eU < c_T && c_T < lmin * eT * eT))
        throw ConfigError("/design/c_U",
                          "level constants must satisfy c_U < lambda_min eps_U^2 < c_T < "
                          "lambda_min eps_T^2");
    return {c_U, c_T};
}

LoopState loop_state_from(const Scenario& scn, const Vec& chi, double t, double v) {
    const int nu = scn.plant.nu, nz = scn.plant.n - scn.plant.nu, nc = scn.ctrl.n_c;
    LoopState s;
    s.t = t;
    s.v = v;
    s.x.assign(chi.begin(), chi.begin() + nu);
    s.zbar.assign(chi.begin() + nu, chi.begin() + nu + nz);
    s.theta.assign(chi.begin() + nu + nz, chi.begin() + nu + nz + nc);
    s.z.assign(chi.begin() + nu + nz + nc, chi.begin() + nu + nz + nc + nz);
    s.q.assign(scn.qfilter.l, 0.0);
    s.p.assign(scn.qfilter.l, 0.0);
    return s;
}

double sup_lumped_impl(const Scenario& scn, const LyapunovData& lyap, const NominalTable& tab,
                       double c_T, double mu, int budget) {
    const AnalysisContext ctx(scn);
    Rng rng(kSamplerSeed);
    double m = 0.0;
    for (int i = 0; i < budget; ++i) {
        const size_t ti = static_cast<size_t>(rng.u01() * tab.chi.size()) % tab.chi.size();
        Vec chi = tab.chi[ti];
        const Vec e = sample_level_set(lyap.P_s_eigen, c_T, rng);
        axpy(chi, 1.0, e);
        const double v = mu > 0.0 ? rng.uniform(-mu, mu) : 0.0;
        const LoopState s = loop_state_from(scn, chi, ti * tab.dt, v);
        const double ur = ctx.u_r(s);
        m = std::max(m, std::abs(ctx.lumped(s, ur)));
    }
    return 1.2 * m;
}

}  // namespace

LyapunovData worst_case_lyapunov(const Scenario& scn) {
    LyapunovData out;
    const int pts = scn.design.present ? scn.design.g_grid_points : 21;
    out.eig_f.lambda_min = kInf;
    out.eig_f.lambda_max = -kInf;
    for (int i = 0; i < pts; ++i) {
        const double g = linspace_at(scn.plant.g_lo, scn.plant.g_hi, i, pts);
        const BlockMatrices bm =
            build_blocks(scn.plant, scn.nominal, scn.ctrl, scn.aug, scn.qfilter, g, 1.0);
        const Mat P_f = solve_lyapunov(bm.A_f);
        const SpectrumSummary s = sym_extremal_eigs(P_f);
        out.eig_f.lambda_min = std::min(out.eig_f.lambda_min, s.lambda_min);
        out.eig_f.lambda_max = std::max(out.eig_f.lambda_max, s.lambda_max);
        for (const auto& ev : general_eigenvalues(bm.A_f))
            out.rho_f = std::max(out.rho_f, std::abs(ev));
    }
    out.P_s = solve_lyapunov(scn.aug.A_s);
    out.P_s_eigen = jacobi_eigensystem(out.P_s);
    out.eig_s = {out.P_s_eigen.values.front(), out.P_s_eigen.values.back()};
    return out;
}

double cq_norm(const GainConstants& gc, double tau) {
    if (gc.cq_rows.empty()) return 0.0;
    const size_t l = gc.cq_rows.front().size();
    Vec row(l, 0.0);
    for (int k = 0; k < gc.nu; ++k)
        axpy(row, std::pow(tau, gc.nu - 1 - k), gc.cq_rows[k]);
    return norm2(row);
}

double sigma_tau(const GainConstants& gc, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("sigma_tau: tau must be positive");
    return 1.0 / (2.0 * gc.lambda_max_f * tau) -
           2.0 * std::sqrt(gc.g_check * gc.g_check + 1.0) * cq_norm(gc, tau);
}

double sigma_f(const GainConstants& gc, double mu, double tau) {
    if (mu < 0.0) throw std::invalid_argument("sigma_f: mu must be nonnegative");
    if (!(tau > 0.0)) {
        if (mu > 0.0) throw std::invalid_argument("sigma_f: tau = 0 is a pole for mu > 0");
        return 0.0;
    }
    return gc.sigma3 * std::pow(tau, -gc.nu) * mu + gc.sigma4 * mu + gc.sigma5 * tau;
}

double sigma_bar(const GainConstants& gc, double mu, double tau) {
    return gc.b1 * sigma_f(gc, mu, tau) + gc.b2 * tau + gc.b3 * mu;
}

double tau_dagger(const GainConstants& gc, double mu) {
    if (mu < 0.0) throw std::invalid_argument("tau_dagger: mu must be nonnegative");
    if (mu == 0.0) return 0.0;  // limit value
    const double denom = gc.b1 * gc.sigma5 + gc.b2;
    if (!(denom > 0.0) || !(gc.b1 * gc.sigma3 > 0.0)) return 0.0;
    return std::pow(gc.nu * gc.b1 * gc.sigma3 * mu / denom, 1.0 / (gc.nu + 1));
}

double h_of_mu(const GainConstants& gc, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("h_of_mu: mu must be positive");
    return sigma_bar(gc, mu, tau_dagger(gc, mu));
}

double h_inv(const GainConstants& gc, double k0) {
    if (!(k0 > 0.0)) throw std::invalid_argument("h_inv: k0 must be positive");
    double lo = 1e-6, hi = 1e-6;
    int guard = 0;
    while (h_of_mu(gc, lo) > k0) {
        lo *= 0.5;
        if (++guard > 200) throw NumericError("h_inv: bracket expansion failed (low side)");
    }
    guard = 0;
    while (h_of_mu(gc, hi) < k0) {
        hi *= 2.0;
        if (++guard > 200) throw NumericError("h_inv: bracket expansion failed (high side)");
    }
    return bisect([&](double mu) { return h_of_mu(gc, mu) - k0; }, lo, hi,
                  h_of_mu(gc, lo) - k0);
}

double mu_tilde(const GainConstants& gc, double k0, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("mu_tilde: tau must be positive");
    const double tn = std::pow(tau, gc.nu);
    return (k0 - gc.b2 * tau - gc.b1 * gc.sigma5 * tau) * tn /
           (gc.b1 * gc.sigma3 + (gc.b3 + gc.b1 * gc.sigma4) * tn);
}

double settle_time(const GainConstants& gc, double tau) {
    const double st = sigma_tau(gc, tau);
    if (!(st > 0.0))
        throw std::invalid_argument("settle_time: sigma_tau must be positive (tau < tau_bar1)");
    const double lambda = (gc.settle_eig == 'f') ? gc.lambda_max_f : gc.lambda_max_s;
    const double arg = lambda * gc.k_f / (gc.sigma5 * gc.sigma5 * std::pow(tau, 2 * (gc.l + 1)));
    if (!(arg > 0.0)) return -kInf;  // fast energy already below the target level
    return std::log(arg) / st;
}

double escape_time(const GainConstants& gc, double mu) {
    const double Bbar = 2.0 * gc.lambda_max_s / std::sqrt(gc.lambda_min_s) *
                        (gc.g_check * (gc.sup_lumped + gc.s_bar) + gc.kappa5 * mu);
    const double target = gc.b0 * std::sqrt(gc.c_T);
    if (Bbar <= target) return kInf;
    return -2.0 / gc.b0 * std::log(1.0 - target / Bbar);
}

double estimate_sup_lumped(const Scenario& scn) {
    const LyapunovData lyap = worst_case_lyapunov(scn);
    const auto [c_U, c_T] = resolve_levels(scn, lyap);
    (void)c_U;
    const NominalTable tab = NominalTable::build(scn);
    return sup_lumped_impl(scn, lyap, tab, c_T, scn.design.mu, scn.design.sample_budget);
}

GainConstants estimate_constants(const Scenario& scn, const LyapunovData& lyap, double mu) {
    GainConstants gc;
    gc.nu = scn.plant.nu;
    gc.l = scn.qfilter.l;
    gc.mu_sampled = mu;
    gc.settle_eig = scn.design.settle_eig;
    gc.lambda_max_f = lyap.eig_f.lambda_max;
    gc.lambda_min_f = lyap.eig_f.lambda_min;
    gc.lambda_max_s = lyap.eig_s.lambda_max;
    gc.lambda_min_s = lyap.eig_s.lambda_min;
    gc.g_check = std::max(std::abs(scn.plant.g_lo), std::abs(scn.plant.g_hi));

    const auto [c_U, c_T] = resolve_levels(scn, lyap);
    gc.c_U = c_U;
    gc.c_T = c_T;
    gc.b0 = 1.0 / gc.lambda_max_s;
    gc.k0 = std::sqrt(gc.c_U) / gc.lambda_max_s;

    // Structure norms from the block matrices. F depends on g; take the
    // worst case over the gain grid. The coupling row is g-independent.
    const int pts = scn.design.present ? scn.design.g_grid_points : 21;
    gc.F_norm = 0.0;
    for (int i = 0; i < pts; ++i) {
        const double g = linspace_at(scn.plant.g_lo, scn.plant.g_hi, i, pts);
        const BlockMatrices bm =
            build_blocks(scn.plant, scn.nominal, scn.ctrl, scn.aug, scn.qfilter, g, 1.0);
        gc.F_norm = std::max(gc.F_norm, spectral_norm(bm.F));
        for (const auto& ev : general_eigenvalues(bm.A_f))
            gc.rho_f = std::max(gc.rho_f, std::abs(ev));
    }
    const BlockMatrices bm0 = build_blocks(scn.plant, scn.nominal, scn.ctrl, scn.aug,
                                           scn.qfilter, scn.plant.g, 1.0);
    gc.alpha_norm = norm2(bm0.alpha);
    gc.N_norm = norm2(bm0.N);

    // tau-power expansion of the coupling row C_tau.
    const Mat Mstack1 = row_power_stack(bm0.C1, gc.nu) * bm0.T1inv;
    gc.cq_rows.assign(gc.nu, Vec(gc.l, 0.0));
    for (int k = 0; k < gc.nu; ++k)
        for (int j = 0; j < gc.l; ++j)
            gc.cq_rows[k][j] = scn.nominal.phi_bar[k] * Mstack1(k, j) / scn.nominal.g_bar;

    // Smallest tau where sigma_tau reaches zero (geometric scan + bisection);
    // +inf sentinel when the coupling row vanishes identically.
    {
        auto G = [&](double tau) {
            return 4.0 * tau * gc.lambda_max_f * std::sqrt(gc.g_check * gc.g_check + 1.0) *
                       cq_norm(gc, tau) -
                   1.0;
        };
        gc.tau_bar1 = kInf;
        double lo = 1e-6;
        double flo = G(lo);
        if (flo >= 0.0) {
            // Already violated at the smallest probe; push the bracket down.
            double lo2 = lo;
            while (G(lo2) >= 0.0 && lo2 > 1e-300) lo2 *= 0.5;
            gc.tau_bar1 = bisect(G, lo2, lo, G(lo2));
        } else {
            double hi = lo;
            while (hi < 1e3) {
                hi *= 1.2;
                const double fhi = G(hi);
                if (fhi >= 0.0) {
                    gc.tau_bar1 = bisect(G, lo, hi, flo);
                    break;
                }
                lo = hi;
                flo = fhi;
            }
        }
    }

    // kappa3 and max ||C_tau|| over a log grid of tau below tau_bar1.
    {
        const double hi = std::min(gc.tau_bar1, 1e3);
        const int n = 200;
        gc.kappa3 = 0.0;
        gc.max_cq_norm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double tau = log_at(1e-6, hi, i, n);
            const BlockMatrices bm = build_blocks(scn.plant, scn.nominal, scn.ctrl, scn.aug,
                                                  scn.qfilter, scn.plant.g, tau);
            double nb = 0.0;
            for (int j = 0; j < bm.Cbar_bold.cols(); ++j)
                nb += bm.Cbar_bold(0, j) * bm.Cbar_bold(0, j);
            gc.kappa3 = std::max(gc.kappa3, std::sqrt(nb));
            gc.max_cq_norm = std::max(gc.max_cq_norm, cq_norm(gc, tau));
        }
    }

    // Monte-Carlo bounds over the transient level set and the horizon.
    const NominalTable tab = NominalTable::build(scn);
    const int budget = scn.design.sample_budget;
    gc.sup_lumped = sup_lumped_impl(scn, lyap, tab, c_T, mu, budget);
    gc.s_bar = scn.qfilter.s_bar.value_or(10.0 * gc.sup_lumped);

    const AnalysisContext ctx(scn);
    {
        Rng rng(kSamplerSeed + 1);
        double m_quarter = 0.0, m_half = 0.0, m = 0.0;
        for (int i = 0; i < budget; ++i) {
            const size_t ti = static_cast<size_t>(rng.u01() * tab.chi.size()) % tab.chi.size();
            Vec chi = tab.chi[ti];
            axpy(chi, 1.0, sample_level_set(lyap.P_s_eigen, c_T, rng));
            const double t = ti * tab.dt;
            m = std::max(m, norm2(ctx.xi_star(chi, scn.r.value(t))));
            if (i == budget / 4) m_quarter = m;
            if (i == budget / 2) m_half = m;
        }
        if (m_half > 0.0 && m > 2.0 * m_half && m_half > 2.0 * m_quarter)
            throw ConfigError("/design/budget",
                              "kappa1 estimate keeps growing across budget doublings; the "
                              "scenario appears unbounded");
        gc.kappa1 = 1.2 * m * scn.design.kappa1_scale;
    }
    {
        Rng rng(kSamplerSeed + 2);
        double m_quarter = 0.0, m_half = 0.0, m = 0.0;
        for (int i = 0; i < budget; ++i) {
            const size_t ti = static_cast<size_t>(rng.u01() * tab.chi.size()) % tab.chi.size();
            Vec chi = tab.chi[ti];
            axpy(chi, 1.0, sample_level_set(lyap.P_s_eigen, c_T, rng));
            const double v = mu > 0.0 ? rng.uniform(-mu, mu) : 0.0;
            const double dhat = rng.uniform(-gc.s_bar, gc.s_bar);
            const LoopState s = loop_state_from(scn, chi, ti * tab.dt, v);
            const auto sd = ctx.star_derivatives(s, dhat);
            m = std::max(m, std::hypot(sd.xi_star_dot_nu, sd.zeta_star_dot));
            if (i == budget / 4) m_quarter = m;
            if (i == budget / 2) m_half = m;
        }
        if (m_half > 0.0 && m > 2.0 * m_half && m_half > 2.0 * m_quarter)
            throw ConfigError("/design/budget",
                              "kappa2 estimate keeps growing across budget doublings; the "
                              "scenario appears unbounded");
        gc.kappa2 = 1.2 * m;
    }

    gc.kappa4 = gc.F_norm + gc.g_check * gc.max_cq_norm;
    gc.kappa5 = gc.g_check * std::abs(scn.ctrl.D) +
                std::abs(scn.nominal.g_bar * scn.ctrl.D) + gc.N_norm;

    // Initial fast energy bound: with zero-initialized DOB states the scaled
    // fast state tau^l eta(t0) stays bounded over tau in (0, 1].
    {
        const int n_e = scn.aug.n_e;
        const int nu = scn.plant.nu, nz = scn.plant.n - scn.plant.nu, nc = scn.ctrl.n_c;
        Vec chi_n0(n_e, 0.0);
        for (int i = 0; i < nu; ++i) chi_n0[i] = scn.sim.x0[i];
        for (int i = 0; i < nc; ++i) chi_n0[nu + nz + i] = scn.sim.theta0[i];
        for (int i = 0; i < nz; ++i) chi_n0[nu + nz + nc + i] = scn.sim.z0[i];
        double m = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double tau = static_cast<double>(i) / 100.0;
            for (double v : {-mu, 0.0, mu}) {
                LoopState s0;
                s0.t = 0.0;
                s0.v = v;
                s0.x = scn.sim.x0;
                s0.z = scn.sim.z0;
                s0.theta = scn.sim.theta0;
                s0.zbar.assign(nz, 0.0);
                s0.q.assign(gc.l, 0.0);
                s0.p.assign(gc.l, 0.0);
                const TransformedState ts = ctx.forward(s0, chi_n0, tau);
                const double sc = std::pow(tau, gc.l);
                double en = 0.0;
                for (double xv : ts.xi) en += sc * sc * xv * xv;
                for (double zv : ts.zeta) en += sc * sc * zv * zv;
                m = std::max(m, en);
            }
        }
        gc.k_f = 1.2 * m;
    }

    gc.sigma1 = 4.0 * std::sqrt(gc.g_check * gc.g_check + 1.0) * gc.kappa1 * gc.lambda_max_f /
                std::sqrt(gc.lambda_min_f);
    gc.sigma2 = 4.0 * gc.kappa2 * gc.lambda_max_f / std::sqrt(gc.lambda_min_f);
    gc.sigma3 = 4.0 * gc.alpha_norm * gc.lambda_max_f / std::sqrt(gc.lambda_min_f);
    gc.sigma4 = 4.0 * gc.g_check * std::abs(scn.ctrl.D) * gc.lambda_max_f /
                std::sqrt(gc.lambda_min_f);
    gc.sigma5 = gc.sigma1 * gc.kappa3 + gc.sigma2;

    gc.b1 = 2.0 * gc.lambda_max_s * gc.kappa4 / std::sqrt(gc.lambda_min_s);
    gc.b2 = 2.0 * gc.lambda_max_s * gc.g_check * gc.kappa1 * gc.kappa3 /
            std::sqrt(gc.lambda_min_s);
    gc.b3 = 2.0 * gc.lambda_max_s * gc.kappa5 / std::sqrt(gc.lambda_min_s);
    return gc;
}

DesignContext prepare_design(const Scenario& scn) {
    DesignContext ctx;
    ctx.lyap = worst_case_lyapunov(scn);
    ctx.gc = estimate_constants(scn, ctx.lyap, scn.design.mu);
    return ctx;
}

DesignResult design_tau_with(const Scenario& scn, const DesignContext& ctx, double mu) {
    if (mu < 0.0) throw std::invalid_argument("design_tau_with: mu must be nonnegative");
    const GainConstants& gc = ctx.gc;
    DesignResult dr;
    dr.mu = mu;
    dr.gc = gc;
    dr.eps_U = scn.design.eps_U;
    dr.eps_T = scn.design.eps_T;
    dr.c_U = gc.c_U;
    dr.c_T = gc.c_T;
    dr.k0 = gc.k0;
    dr.tau_bar1 = gc.tau_bar1;
    dr.t_star = escape_time(gc, mu);

    // Settle-time cap: largest tau below tau_bar1 with settle < escape time.
    if (std::isinf(dr.t_star)) {
        dr.tau_bar2 = kInf;
    } else {
        const double cap = std::min(gc.tau_bar1, 1e3) * (1.0 - 1e-9);
        const int n = 400;
        const double lo0 = std::min(1e-8, cap / 10.0);
        double prev = lo0;
        double prev_val = settle_time(gc, prev) - dr.t_star;
        dr.tau_bar2 = kInf;
        if (prev_val >= 0.0) {
            dr.tau_bar2 = prev;  // essentially no admissible tau
        } else {
            bool found = false;
            for (int i = 1; i < n; ++i) {
                const double tau = log_at(lo0, cap, i, n);
                const double val = settle_time(gc, tau) - dr.t_star;
                if (val >= 0.0) {
                    dr.tau_bar2 = bisect(
                        [&](double tt) { return settle_time(gc, tt) - dr.t_star; }, prev, tau,
                        prev_val);
                    found = true;
                    break;
                }
                prev = tau;
                prev_val = val;
            }
            if (!found) dr.tau_bar2 = std::isinf(gc.tau_bar1) ? kInf : gc.tau_bar1;
        }
    }

    const double tau_cap = std::min(dr.tau_bar1, dr.tau_bar2);

    dr.mu_star_1 = h_inv(gc, gc.k0);
    dr.mu_star_2 = std::isinf(tau_cap) ? dr.mu_star_1 : mu_tilde(gc, gc.k0, tau_cap);
    const double tau_dagger_at_mu1 = tau_dagger(gc, dr.mu_star_1);
    dr.mu_star = (tau_cap >= tau_dagger_at_mu1) ? dr.mu_star_1 : dr.mu_star_2;

    dr.tau_dagger = tau_dagger(gc, mu);

    // Sublevel roots of Sigma_bar(mu, .) = k0.
    bool sublevel_empty = false;
    if (mu == 0.0) {
        dr.tau_lo3 = 0.0;
        const double slope = gc.b1 * gc.sigma5 + gc.b2;
        double hi = 1.0;
        while (sigma_bar(gc, 0.0, hi) < gc.k0 && hi < 1e12) hi *= 2.0;
        dr.tau_hi3 = (slope > 0.0)
                         ? bisect([&](double tt) { return sigma_bar(gc, 0.0, tt) - gc.k0; },
                                  1e-300, hi, -gc.k0)
                         : kInf;
    } else if (h_of_mu(gc, mu) < gc.k0) {
        const double td = dr.tau_dagger;
        double lo = td;
        int guard = 0;
        while (sigma_bar(gc, mu, lo) < gc.k0 && ++guard < 600) lo *= 0.5;
        dr.tau_lo3 = bisect([&](double tt) { return sigma_bar(gc, mu, tt) - gc.k0; }, lo, td,
                            sigma_bar(gc, mu, lo) - gc.k0);
        double hi = td;
        guard = 0;
        while (sigma_bar(gc, mu, hi) < gc.k0 && ++guard < 600) hi *= 2.0;
        dr.tau_hi3 = bisect([&](double tt) { return sigma_bar(gc, mu, tt) - gc.k0; }, td, hi,
                            sigma_bar(gc, mu, td) - gc.k0);
    } else {
        sublevel_empty = true;
        dr.tau_lo3 = dr.tau_hi3 = dr.tau_dagger;
    }

    dr.tau_lower = dr.tau_lo3;
    dr.tau_upper = std::min({dr.tau_bar1, dr.tau_bar2, dr.tau_hi3});
    dr.feasible = !sublevel_empty && mu < dr.mu_star && dr.tau_lower < dr.tau_upper;

    if (!dr.feasible) {
        if (sublevel_empty)
            dr.binding = "sigma_bar_minimum_exceeds_k0";
        else if (mu >= dr.mu_star)
            dr.binding = "mu_at_or_above_mu_star";
        else
            dr.binding = "empty_interval";
    } else {
        if (dr.tau_upper == dr.tau_hi3)
            dr.binding = "tau_bar3";
        else if (dr.tau_upper == dr.tau_bar2)
            dr.binding = "tau_bar2";
        else
            dr.binding = "tau_bar1";
    }

    if (dr.feasible) {
        if (dr.tau_dagger > dr.tau_lower && dr.tau_dagger < dr.tau_upper)
            dr.recommended_tau = dr.tau_dagger;
        else if (dr.tau_lower > 0.0)
            dr.recommended_tau = std::sqrt(dr.tau_lower * dr.tau_upper);
        else
            dr.recommended_tau = 0.5 * dr.tau_upper;
    }
    return dr;
}

DesignResult design_tau(const Scenario& scn) {
    if (!scn.design.present)
        throw ConfigError("/design", "design section required for the tau-design procedure");
    const DesignContext ctx = prepare_design(scn);
    return design_tau_with(scn, ctx, scn.design.mu);
}

}  // namespace dobkit
