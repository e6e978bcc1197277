#include "dobkit/verify.hpp"

#include <cmath>

namespace dobkit {

VerifyReport verify_design(const Scenario& scn, const DesignResult& dr, int n_probe) {
    if (!dr.feasible)
        throw std::invalid_argument("verify_design: design is infeasible (" + dr.binding + ")");
    if (n_probe < 1) throw std::invalid_argument("verify_design: need at least one probe");

    VerifyReport rep;
    rep.eps_T = dr.eps_T;
    rep.eps_U = dr.eps_U;

    // Probe grid: log-spaced strictly inside the designed interval. A zero
    // lower bound (noise-free case) is probed from three decades below the
    // upper bound.
    const double hi = dr.tau_upper;
    const double lo = dr.tau_lower > 0.0 ? dr.tau_lower : hi * 1e-3;
    NoiseSpec noise = scn.sim.noise;
    noise.mu = dr.mu;
    if (dr.mu > 0.0 && noise.kind == NoiseSpec::Kind::None) noise.kind = NoiseSpec::Kind::Square;
    if (dr.mu == 0.0) noise.kind = NoiseSpec::Kind::None;

    const double rho_f = dr.gc.rho_f;

    rep.all_pass = true;
    for (int i = 1; i <= n_probe; ++i) {
        const double frac = static_cast<double>(i) / (n_probe + 1);
        const double tau = lo * std::pow(hi / lo, frac);
        SimOverrides ov;
        ov.tau = tau;
        ov.noise = noise;
        const double stable = 2.0 * tau / rho_f;
        if (stable < scn.sim.step) ov.step = stable;
        const Trajectory tr = integrate(scn, ov);
        ProbeResult pr;
        pr.tau = tau;
        pr.sup_e = tr.sup_e();
        pr.tail_sup_e = tr.tail_sup_e();
        pr.diverged = tr.diverged;
        pr.margin_transient = (dr.eps_T - pr.sup_e) / dr.eps_T;
        pr.margin_steady = (dr.eps_U - pr.tail_sup_e) / dr.eps_U;
        pr.pass = !tr.diverged && pr.sup_e < dr.eps_T && pr.tail_sup_e < dr.eps_U;
        rep.all_pass = rep.all_pass && pr.pass;
        rep.probes.push_back(pr);
    }

    // Transform cross-check at the recommended tau on a short horizon.
    SimOverrides cov;
    cov.tau = dr.recommended_tau;
    cov.noise = noise;
    cov.horizon = std::min(5.0, scn.sim.horizon);
    const double stable = 2.0 * dr.recommended_tau / rho_f;
    if (stable < scn.sim.step) cov.step = stable;
    rep.crosscheck = transform_crosscheck(scn, cov);
    rep.crosscheck_ok =
        rep.crosscheck.max_e_deviation < 1e-6 && rep.crosscheck.max_dhat_residual < 1e-8;
    rep.all_pass = rep.all_pass && rep.crosscheck_ok;
    return rep;
}

}  // namespace dobkit
