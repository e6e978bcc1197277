#pragma once

#include <string>

#include "dobkit/linalg.hpp"
#include "dobkit/scenario.hpp"
#include "dobkit/transform.hpp"

namespace dobkit {

/// Lyapunov certificates for the fast and slow blocks, worst-cased over
/// the uncertain-gain grid: lambda_max is the max over the grid, lambda_min
/// the min. The slow block is solved at the scenario's true parameters.
struct LyapunovData {
    Mat P_s;
    SpectrumSummary eig_f;
    SpectrumSummary eig_s;
    SymEigen P_s_eigen;  // eigensystem of P_s, used to sample its sublevel sets
    double rho_f = 1.0;  // spectral radius bound of A_f over the grid
};

LyapunovData worst_case_lyapunov(const Scenario& scn);

/// Every scalar constant of the performance-bound chain. The kappas are
/// Monte-Carlo estimates (max over samples, inflated by 1.2); the sigmas
/// and b's follow from them and the Lyapunov eigenvalue extrema.
struct GainConstants {
    int nu = 0;
    int l = 0;
    double mu_sampled = 0.0;  // noise level assumed during sampling
    double g_check = 0.0;
    double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0, kappa4 = 0.0, kappa5 = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0, sigma3 = 0.0, sigma4 = 0.0, sigma5 = 0.0;
    double b0 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0;
    double k_f = 0.0;
    double c_U = 0.0, c_T = 0.0, k0 = 0.0;
    double sup_lumped = 0.0;
    double s_bar = 0.0;
    double alpha_norm = 0.0, F_norm = 0.0, N_norm = 0.0;
    double max_cq_norm = 0.0;
    double tau_bar1 = 0.0;  // +infinity when the coupling row vanishes
    double rho_f = 1.0;     // spectral radius of A_f over the gain grid
    char settle_eig = 's';
    double lambda_max_f = 0.0, lambda_min_f = 0.0;
    double lambda_max_s = 0.0, lambda_min_s = 0.0;
    std::vector<Vec> cq_rows;  // tau-power expansion of the coupling row
};

/// ||C_tau row|| at an arbitrary tau, from the stored power expansion.
double cq_norm(const GainConstants& gc, double tau);

/// sigma_tau = 1/(2 lambda_max_f tau) - 2 sqrt(g_check^2+1) ||C_tau||;
/// positive for tau < tau_bar1.
double sigma_tau(const GainConstants& gc, double tau);

/// Fast-state ultimate bound Sigma_f(mu, tau) = sigma3 tau^-nu mu
/// + sigma4 mu + sigma5 tau.
double sigma_f(const GainConstants& gc, double mu, double tau);

/// Slow-state forcing bound Sigma_bar = b1 Sigma_f + b2 tau + b3 mu.
double sigma_bar(const GainConstants& gc, double mu, double tau);

/// Minimizer of Sigma_bar over tau for fixed mu > 0; 0 (the limit) for mu = 0.
double tau_dagger(const GainConstants& gc, double mu);

/// h(mu) = Sigma_bar(mu, tau_dagger(mu)); strictly increasing in mu.
double h_of_mu(const GainConstants& gc, double mu);

/// Inverse of h by bracketing and bisection (relative tolerance 1e-10).
double h_inv(const GainConstants& gc, double k0);

/// Largest admissible mu at a fixed tau for the sublevel Sigma_bar < k0;
/// may be nonpositive, meaning no admissible mu at this tau.
double mu_tilde(const GainConstants& gc, double k0, double tau);

/// Fast-state settling-time bound; requires sigma_tau > 0. Returns -inf
/// when the initial fast energy already sits inside the target set.
double settle_time(const GainConstants& gc, double tau);

/// Escape-time bound guaranteed by the saturation: +infinity when the
/// error's comparison bound never reaches the transient level set.
double escape_time(const GainConstants& gc, double mu);

/// Estimated bound of |lumped disturbance| over the transient level set
/// and the sim horizon (Monte Carlo, inflated by 1.2). Pure function of
/// the scenario; the automatic saturation default is 10x this value.
double estimate_sup_lumped(const Scenario& scn);

GainConstants estimate_constants(const Scenario& scn, const LyapunovData& lyap, double mu);

struct DesignContext {
    LyapunovData lyap;
    GainConstants gc;
};

/// Builds the Lyapunov data and constants at the scenario's design noise level.
DesignContext prepare_design(const Scenario& scn);

struct DesignResult {
    double mu = 0.0;
    double mu_star_1 = 0.0, mu_star_2 = 0.0, mu_star = 0.0;
    double tau_bar1 = 0.0, tau_bar2 = 0.0;
    double tau_dagger = 0.0;
    double tau_lo3 = 0.0, tau_hi3 = 0.0;    // sublevel roots of Sigma_bar = k0
    double tau_lower = 0.0, tau_upper = 0.0;  // final interval
    bool feasible = false;
    double recommended_tau = 0.0;
    std::string binding;  // constraint that pins tau_upper, or the infeasibility cause
    double t_star = 0.0;
    double k0 = 0.0, c_U = 0.0, c_T = 0.0;
    double eps_U = 0.0, eps_T = 0.0;
    GainConstants gc;
};

DesignResult design_tau(const Scenario& scn);
DesignResult design_tau_with(const Scenario& scn, const DesignContext& ctx, double mu);

}  // namespace dobkit
