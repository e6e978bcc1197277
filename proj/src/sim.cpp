#include "dobkit/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "dobkit/bounds.hpp"
#include "dobkit/linalg.hpp"
#include "dobkit/rng.hpp"

namespace dobkit {

namespace {

constexpr double kDivergenceLimit = 1e9;

}  // namespace

NoiseGen::NoiseGen(const NoiseSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}

double NoiseGen::sample(double t) {
    switch (spec_.kind) {
        case NoiseSpec::Kind::None: return 0.0;
        case NoiseSpec::Kind::Uniform: return spec_.mu * (2.0 * rng_.u01() - 1.0);
        case NoiseSpec::Kind::Sinusoid: return spec_.mu * std::sin(spec_.freq * t);
        case NoiseSpec::Kind::Square: {
            const double phase = std::fmod(t, spec_.period);
            return (phase < 0.5 * spec_.period) ? spec_.mu : -spec_.mu;
        }
    }
    return 0.0;
}

double Trajectory::sup_e() const {
    double m = 0.0;
    for (double v : e_norm) m = std::max(m, v);
    return m;
}

double Trajectory::tail_sup_e(double tail_fraction) const {
    if (times.empty()) return 0.0;
    const double t_cut = times.back() * (1.0 - tail_fraction);
    double m = 0.0;
    for (size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_cut) m = std::max(m, e_norm[i]);
    return m;
}

double Trajectory::saturation_fraction() const {
    if (sat_active.empty()) return 0.0;
    size_t n = 0;
    for (auto f : sat_active) n += (f != 0);
    return static_cast<double>(n) / static_cast<double>(sat_active.size());
}

StackLayout StackLayout::of(const Scenario& scn) {
    StackLayout L;
    L.nu = scn.plant.nu;
    L.nz = scn.plant.n - scn.plant.nu;
    L.nc = scn.ctrl.n_c;
    L.l = scn.qfilter.l;
    L.n_e = scn.aug.n_e;
    L.off_x = 0;
    L.off_z = L.off_x + L.nu;
    L.off_theta = L.off_z + L.nz;
    L.off_zbar = L.off_theta + L.nc;
    L.off_q = L.off_zbar + L.nz;
    L.off_p = L.off_q + L.l;
    L.off_chin = L.off_p + L.l;
    L.total = L.off_chin + L.n_e;
    return L;
}

LoopState StackLayout::unpack(const Vec& y, double t, double v) const {
    LoopState s;
    s.t = t;
    s.v = v;
    s.x.assign(y.begin() + off_x, y.begin() + off_x + nu);
    s.z.assign(y.begin() + off_z, y.begin() + off_z + nz);
    s.theta.assign(y.begin() + off_theta, y.begin() + off_theta + nc);
    s.zbar.assign(y.begin() + off_zbar, y.begin() + off_zbar + nz);
    s.q.assign(y.begin() + off_q, y.begin() + off_q + l);
    s.p.assign(y.begin() + off_p, y.begin() + off_p + l);
    return s;
}

Vec StackLayout::chi(const Vec& y) const {
    Vec c(static_cast<size_t>(nu + nz + nc + nz));
    int k = 0;
    for (int i = 0; i < nu; ++i) c[k++] = y[off_x + i];
    for (int i = 0; i < nz; ++i) c[k++] = y[off_zbar + i];
    for (int i = 0; i < nc; ++i) c[k++] = y[off_theta + i];
    for (int i = 0; i < nz; ++i) c[k++] = y[off_z + i];
    return c;
}

Vec StackLayout::chi_n(const Vec& y) const {
    return Vec(y.begin() + off_chin, y.begin() + off_chin + n_e);
}

double resolved_s_bar(const Scenario& scn) {
    if (scn.qfilter.s_bar) return *scn.qfilter.s_bar;
    return 10.0 * estimate_sup_lumped(scn);
}

namespace {

/// Right-hand side of the physical closed loop locked to the nominal system.
class LoopDynamics {
public:
    LoopDynamics(const Scenario& scn, const StackLayout& L, double tau, double s_bar)
        : scn_(scn), L_(L), dob_(scn.plant, scn.nominal, scn.qfilter, tau, s_bar) {}

    const DobRealization& dob() const { return dob_; }

    struct Outputs {
        double w = 0.0, yp = 0.0, dhat = 0.0;
        bool sat = false;
    };

    Outputs outputs(const Vec& y) const {
        Outputs o;
        o.w = 0.0;
        const Vec& wz = dob_.w_zbar_row();
        const Vec& wq = dob_.w_q_row();
        const Vec& ypr = dob_.yp_row();
        for (int i = 0; i < L_.nz; ++i) o.w += wz[i] * y[L_.off_zbar + i];
        for (int i = 0; i < L_.l; ++i) o.w += wq[i] * y[L_.off_q + i];
        for (int i = 0; i < L_.l; ++i) o.yp += ypr[i] * y[L_.off_p + i];
        const SatResult sr = dob_.dhat(o.w, o.yp);
        o.dhat = sr.value;
        o.sat = sr.active;
        return o;
    }

    void deriv(double t, const Vec& y, double v, Vec& dy) const {
        const PlantModel& pl = scn_.plant;
        const NominalModel& nm = scn_.nominal;
        const OuterController& ct = scn_.ctrl;
        const double y_meas = y[L_.off_x] + v;
        const double r = scn_.r.value(t);
        const double dist = scn_.d.value(t);

        const Outputs o = outputs(y);
        double u_r = ct.D * (r - y_meas);
        for (int i = 0; i < L_.nc; ++i) u_r += ct.L[i] * y[L_.off_theta + i];
        const double u = u_r - o.dhat;

        // Plant output chain and internal dynamics.
        for (int i = 0; i + 1 < L_.nu; ++i) dy[L_.off_x + i] = y[L_.off_x + i + 1];
        {
            Vec xv(y.begin() + L_.off_x, y.begin() + L_.off_x + L_.nu);
            Vec zv(y.begin() + L_.off_z, y.begin() + L_.off_z + L_.nz);
            double drive = pl.f.value(xv, zv, t) + pl.g * (u + dist);
            for (int i = 0; i < L_.nu; ++i) drive += pl.phi[i] * y[L_.off_x + i];
            for (int i = 0; i < L_.nz; ++i) drive += pl.psi[i] * y[L_.off_z + i];
            dy[L_.off_x + L_.nu - 1] = drive;
        }
        for (int i = 0; i < L_.nz; ++i) {
            double s = pl.G[i] * y[L_.off_x];
            for (int j = 0; j < L_.nz; ++j) s += pl.S(i, j) * y[L_.off_z + j];
            dy[L_.off_z + i] = s;
        }

        // Outer controller.
        for (int i = 0; i < L_.nc; ++i) {
            double s = ct.K[i] * (r - y_meas);
            for (int j = 0; j < L_.nc; ++j) s += ct.J(i, j) * y[L_.off_theta + j];
            dy[L_.off_theta + i] = s;
        }

        // DOB internal model and Q-filters.
        for (int i = 0; i < L_.nz; ++i) {
            double s = nm.G_bar[i] * y_meas;
            for (int j = 0; j < L_.nz; ++j) s += nm.S_bar(i, j) * y[L_.off_zbar + j];
            dy[L_.off_zbar + i] = s;
        }
        {
            const Vec& kq = dob_.kq();
            const double innov = y[L_.off_q] - y_meas;
            for (int i = 0; i < L_.l; ++i) {
                double s = (i + 1 < L_.l) ? y[L_.off_q + i + 1] : 0.0;
                dy[L_.off_q + i] = s - kq[i] * innov;
            }
            const Vec& kp = dob_.kp_row();
            double pfb = 0.0;
            for (int i = 0; i < L_.l; ++i) pfb += kp[i] * y[L_.off_p + i];
            for (int i = 0; i + 1 < L_.l; ++i) dy[L_.off_p + i] = y[L_.off_p + i + 1];
            dy[L_.off_p + L_.l - 1] = -pfb + u;
        }

        // Nominal closed loop.
        for (int i = 0; i < L_.n_e; ++i) {
            double s = scn_.aug.B[i] * r;
            for (int j = 0; j < L_.n_e; ++j) s += scn_.aug.A_s(i, j) * y[L_.off_chin + j];
            dy[L_.off_chin + i] = s;
        }
    }

private:
    const Scenario& scn_;
    const StackLayout& L_;
    DobRealization dob_;
};

struct ResolvedRun {
    double tau;
    double step;
    double horizon;
    std::uint64_t seed;
    NoiseSpec noise;
    long nsteps;
};

ResolvedRun resolve_run(const Scenario& scn, const SimOverrides& ov) {
    ResolvedRun r;
    r.tau = ov.tau.value_or(scn.qfilter.tau);
    if (!(r.tau > 0.0)) throw ConfigError("/qfilter/tau", "time constant must be positive");
    r.step = ov.step.value_or(scn.sim.step);
    r.horizon = ov.horizon.value_or(scn.sim.horizon);
    r.seed = ov.seed.value_or(scn.sim.seed);
    r.noise = ov.noise.value_or(scn.sim.noise);
    if (!(r.step > 0.0) || !(r.horizon > 0.0))
        throw ConfigError("/sim/step", "step and horizon must be positive");
    r.nsteps = std::lround(std::ceil(r.horizon / r.step - 1e-9));
    if (r.nsteps < 1) r.nsteps = 1;
    r.step = r.horizon / static_cast<double>(r.nsteps);
    return r;
}

bool state_ok(const Vec& y) {
    for (double v : y) {
        if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit) return false;
    }
    return true;
}

template <typename Deriv>
void rk4_step(const Deriv& f, double t, double h, Vec& y, Vec& k1, Vec& k2, Vec& k3, Vec& k4,
              Vec& tmp) {
    f(t, y, k1);
    for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    f(t + h, tmp, k4);
    const double w = h / 6.0;
    for (size_t i = 0; i < y.size(); ++i) y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

}  // namespace

Trajectory integrate(const Scenario& scn, const SimOverrides& ov) {
    const ResolvedRun run = resolve_run(scn, ov);
    const StackLayout L = StackLayout::of(scn);
    const double s_bar = resolved_s_bar(scn);
    LoopDynamics dyn(scn, L, run.tau, s_bar);
    NoiseGen gen(run.noise, run.seed);

    Vec y(L.total, 0.0);
    for (int i = 0; i < L.nu; ++i) y[L.off_x + i] = scn.sim.x0[i];
    for (int i = 0; i < L.nz; ++i) y[L.off_z + i] = scn.sim.z0[i];
    for (int i = 0; i < L.nc; ++i) y[L.off_theta + i] = scn.sim.theta0[i];
    // DOB states start at zero; the nominal copies match the real initial
    // conditions so e(t0) = 0 exactly.
    for (int i = 0; i < L.nu; ++i) y[L.off_chin + i] = scn.sim.x0[i];
    for (int i = 0; i < L.nc; ++i) y[L.off_chin + L.nu + L.nz + i] = scn.sim.theta0[i];
    for (int i = 0; i < L.nz; ++i) y[L.off_chin + L.nu + L.nz + L.nc + i] = scn.sim.z0[i];

    Trajectory tr;
    tr.step = run.step;
    tr.tau = run.tau;
    tr.s_bar = s_bar;
    tr.full_states = ov.record_full;
    const size_t cap = static_cast<size_t>(run.nsteps) + 1;
    tr.times.reserve(cap);
    tr.e_norm.reserve(cap);
    tr.dhat.reserve(cap);
    tr.w_minus_yp.reserve(cap);
    tr.noise.reserve(cap);
    tr.sat_active.reserve(cap);
    if (ov.record_full) tr.stacked.reserve(cap);

    Vec k1(L.total), k2(L.total), k3(L.total), k4(L.total), tmp(L.total);
    double v = 0.0;
    for (long k = 0; k <= run.nsteps; ++k) {
        const double t = static_cast<double>(k) * run.step;
        if (k < run.nsteps) v = gen.sample(t);

        const auto o = dyn.outputs(y);
        tr.times.push_back(t);
        Vec chi = L.chi(y);
        const Vec chin = L.chi_n(y);
        for (int i = 0; i < L.n_e; ++i) chi[i] -= chin[i];
        tr.e_norm.push_back(norm2(chi));
        tr.dhat.push_back(o.dhat);
        tr.w_minus_yp.push_back(o.w - o.yp);
        tr.sat_active.push_back(o.sat ? 1 : 0);
        tr.noise.push_back(v);
        if (ov.record_full) tr.stacked.push_back(y);

        if (!state_ok(y)) {
            tr.diverged = true;
            tr.divergence_time = t;
            break;
        }
        if (k == run.nsteps) break;

        rk4_step([&](double tt, const Vec& yy, Vec& dy) { dyn.deriv(tt, yy, v, dy); }, t,
                 run.step, y, k1, k2, k3, k4, tmp);
    }
    return tr;
}

Trajectory integrate_transformed(const Scenario& scn, const SimOverrides& ov) {
    const ResolvedRun run = resolve_run(scn, ov);
    const double s_bar = resolved_s_bar(scn);
    const AnalysisContext ctx(scn);
    const BlockMatrices bm = build_blocks(scn.plant, scn.nominal, scn.ctrl, scn.aug, scn.qfilter,
                                          scn.plant.g, run.tau);
    const int l = scn.qfilter.l;
    const int n_e = scn.aug.n_e;
    const int nu = scn.plant.nu;
    const int nz = scn.plant.n - scn.plant.nu;
    const int nc = scn.ctrl.n_c;

    // State: [xi; zeta; e; chi_n].
    const int off_xi = 0, off_zeta = l, off_e = 2 * l, off_chin = 2 * l + n_e;
    const int total = 2 * l + 2 * n_e;

    NoiseGen gen(run.noise, run.seed);
    const double v0 = gen.sample(0.0);

    Vec chi_n0(n_e, 0.0);
    for (int i = 0; i < nu; ++i) chi_n0[i] = scn.sim.x0[i];
    for (int i = 0; i < nc; ++i) chi_n0[nu + nz + i] = scn.sim.theta0[i];
    for (int i = 0; i < nz; ++i) chi_n0[nu + nz + nc + i] = scn.sim.z0[i];

    LoopState s0;
    s0.t = 0.0;
    s0.v = v0;
    s0.x = scn.sim.x0;
    s0.z = scn.sim.z0;
    s0.theta = scn.sim.theta0;
    s0.zbar.assign(nz, 0.0);
    s0.q.assign(l, 0.0);
    s0.p.assign(l, 0.0);
    const TransformedState ts0 = ctx.forward(s0, chi_n0, run.tau);

    Vec y(total, 0.0);
    for (int i = 0; i < l; ++i) y[off_xi + i] = ts0.xi[i];
    for (int i = 0; i < l; ++i) y[off_zeta + i] = ts0.zeta[i];
    for (int i = 0; i < n_e; ++i) y[off_e + i] = ts0.e[i];
    for (int i = 0; i < n_e; ++i) y[off_chin + i] = chi_n0[i];

    // Reconstructs the loop quantities from (xi, zeta, e, chi_n) and evaluates
    // the transformed right-hand side, recovering dhat from the closed-form
    // identity (valid while saturation is inactive).
    struct Reconstructed {
        LoopState s;
        double dhat_raw = 0.0;
        bool sat = false;
    };
    auto reconstruct = [&](double t, const Vec& yy, double v) {
        Reconstructed rec;
        rec.s.t = t;
        rec.s.v = v;
        rec.s.x.assign(nu, 0.0);
        rec.s.z.assign(nz, 0.0);
        rec.s.theta.assign(nc, 0.0);
        rec.s.zbar.assign(nz, 0.0);
        rec.s.q.assign(l, 0.0);
        rec.s.p.assign(l, 0.0);
        for (int i = 0; i < nu; ++i) rec.s.x[i] = yy[off_e + i] + yy[off_chin + i];
        for (int i = 0; i < nz; ++i)
            rec.s.zbar[i] = yy[off_e + nu + i] + yy[off_chin + nu + i];
        for (int i = 0; i < nc; ++i)
            rec.s.theta[i] = yy[off_e + nu + nz + i] + yy[off_chin + nu + nz + i];
        for (int i = 0; i < nz; ++i)
            rec.s.z[i] = yy[off_e + nu + nz + nc + i] + yy[off_chin + nu + nz + nc + i];

        const double ur = ctx.u_r(rec.s);
        const double bfd = ctx.lumped(rec.s, ur);
        Vec chi = ctx.chi(rec.s);
        const Vec xs = ctx.xi_star(chi, scn.r.value(t));
        Vec xi(yy.begin() + off_xi, yy.begin() + off_xi + l);
        Vec zeta(yy.begin() + off_zeta, yy.begin() + off_zeta + l);
        rec.dhat_raw = dhat_from_transform(bm, bfd, xi, zeta, v, xs);
        rec.sat = std::abs(rec.dhat_raw) > s_bar;
        return rec;
    };

    auto deriv = [&](double t, const Vec& yy, double v, Vec& dy) {
        const Reconstructed rec = reconstruct(t, yy, v);
        const double dhat =
            rec.sat ? (rec.dhat_raw > 0 ? s_bar : -s_bar) : rec.dhat_raw;
        const Vec chi = ctx.chi(rec.s);
        const double r = scn.r.value(t);
        const Vec xs = ctx.xi_star(chi, r);
        const auto sd = ctx.star_derivatives(rec.s, dhat);

        TransformedState ts;
        ts.xi.assign(yy.begin() + off_xi, yy.begin() + off_xi + l);
        ts.zeta.assign(yy.begin() + off_zeta, yy.begin() + off_zeta + l);
        ts.e.assign(yy.begin() + off_e, yy.begin() + off_e + n_e);
        const TransformedDeriv td =
            transformed_deriv(ts, bm, scn.aug.A_s, xs, sd.xi_star_dot_nu, sd.zeta_star_dot, v);
        for (int i = 0; i < l; ++i) dy[off_xi + i] = td.xi_dot[i];
        for (int i = 0; i < l; ++i) dy[off_zeta + i] = td.zeta_dot[i];
        for (int i = 0; i < n_e; ++i) dy[off_e + i] = td.e_dot[i];
        for (int i = 0; i < n_e; ++i) {
            double s = scn.aug.B[i] * r;
            for (int j = 0; j < n_e; ++j) s += scn.aug.A_s(i, j) * yy[off_chin + j];
            dy[off_chin + i] = s;
        }
    };

    Trajectory tr;
    tr.step = run.step;
    tr.tau = run.tau;
    tr.s_bar = s_bar;
    tr.full_states = true;
    Vec k1(total), k2(total), k3(total), k4(total), tmp(total);
    double v = v0;
    for (long k = 0; k <= run.nsteps; ++k) {
        const double t = static_cast<double>(k) * run.step;
        if (k < run.nsteps) v = (k == 0) ? v0 : gen.sample(t);

        const Reconstructed rec = reconstruct(t, y, v);
        Vec e(y.begin() + off_e, y.begin() + off_e + n_e);
        tr.times.push_back(t);
        tr.e_norm.push_back(norm2(e));
        tr.dhat.push_back(std::clamp(rec.dhat_raw, -s_bar, s_bar));
        tr.w_minus_yp.push_back(rec.dhat_raw);
        tr.sat_active.push_back(rec.sat ? 1 : 0);
        tr.noise.push_back(v);
        tr.stacked.push_back(y);

        if (!state_ok(y)) {
            tr.diverged = true;
            tr.divergence_time = t;
            break;
        }
        if (k == run.nsteps) break;
        rk4_step([&](double tt, const Vec& yy, Vec& dy) { deriv(tt, yy, v, dy); }, t, run.step,
                 y, k1, k2, k3, k4, tmp);
    }
    return tr;
}

PerformanceReport make_report(const Trajectory& tr, double eps_T, double eps_U) {
    PerformanceReport rep;
    rep.tau = tr.tau;
    rep.sup_e = tr.sup_e();
    rep.tail_sup_e = tr.tail_sup_e();
    rep.saturation_fraction = tr.saturation_fraction();
    rep.diverged = tr.diverged;
    rep.pass_transient = !tr.diverged && rep.sup_e < eps_T;
    rep.pass_steady = !tr.diverged && rep.tail_sup_e < eps_U;
    return rep;
}

std::vector<PerformanceReport> sweep_tau(const Scenario& scn, const Vec& tau_grid) {
    if (tau_grid.empty()) return {};
    for (size_t i = 0; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] > 0.0))
            throw ConfigError("/sweep", "tau grid entries must be positive");
        if (i > 0 && tau_grid[i] <= tau_grid[i - 1])
            throw ConfigError("/sweep", "tau grid must be strictly increasing");
    }

    // Fast-state spectral radius over the gain grid, used to keep the
    // fixed-step integrator inside its stability region for small tau.
    double rho_f = 1.0;
    for (int i = 0; i < 21; ++i) {
        const double g = scn.plant.g_lo +
                         (scn.plant.g_hi - scn.plant.g_lo) * static_cast<double>(i) / 20.0;
        const BlockMatrices bm =
            build_blocks(scn.plant, scn.nominal, scn.ctrl, scn.aug, scn.qfilter, g, 1.0);
        for (const auto& ev : general_eigenvalues(bm.A_f)) rho_f = std::max(rho_f, std::abs(ev));
    }

    const double eps_T = scn.design.eps_T;
    const double eps_U = scn.design.eps_U;
    std::vector<PerformanceReport> out(tau_grid.size());

    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DOBBENCH_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(tau_grid.size()));

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tau_grid.size()) return;
            SimOverrides ov;
            ov.tau = tau_grid[i];
            const double stable = 2.0 * tau_grid[i] / rho_f;
            if (stable < scn.sim.step) ov.step = stable;
            const Trajectory tr = integrate(scn, ov);
            out[i] = make_report(tr, eps_T, eps_U);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

CrossCheckReport transform_crosscheck(const Scenario& scn, const SimOverrides& ov) {
    SimOverrides o = ov;
    o.record_full = true;
    const Trajectory ta = integrate(scn, o);
    const Trajectory tb = integrate_transformed(scn, o);

    CrossCheckReport rep;
    rep.saturation_fraction = ta.saturation_fraction();

    const StackLayout L = StackLayout::of(scn);
    const size_t n = std::min(ta.stacked.size(), tb.stacked.size());
    const int n_e = scn.aug.n_e;
    for (size_t k = 0; k < n; ++k) {
        Vec ea = L.chi(ta.stacked[k]);
        const Vec chin = L.chi_n(ta.stacked[k]);
        for (int i = 0; i < n_e; ++i) ea[i] -= chin[i];
        double dev = 0.0;
        for (int i = 0; i < n_e; ++i) {
            const double d = ea[i] - tb.stacked[k][2 * scn.qfilter.l + i];
            dev += d * d;
        }
        rep.max_e_deviation = std::max(rep.max_e_deviation, std::sqrt(dev));
    }

    // Estimate-identity residual along the physical trajectory.
    const AnalysisContext ctx(scn);
    const double tau = o.tau.value_or(scn.qfilter.tau);
    const BlockMatrices bm =
        build_blocks(scn.plant, scn.nominal, scn.ctrl, scn.aug, scn.qfilter, scn.plant.g, tau);
    for (size_t k = 0; k < ta.stacked.size(); ++k) {
        if (ta.sat_active[k]) continue;  // identity holds only while unsaturated
        const LoopState s = L.unpack(ta.stacked[k], ta.times[k], ta.noise[k]);
        const double ur = ctx.u_r(s);
        const double bfd = ctx.lumped(s, ur);
        const Vec chi = ctx.chi(s);
        const Vec xs = ctx.xi_star(chi, scn.r.value(s.t));
        const Vec chin = L.chi_n(ta.stacked[k]);
        const TransformedState ts = ctx.forward(s, chin, tau);
        const double rhs = dhat_from_transform(bm, bfd, ts.xi, ts.zeta, s.v, xs);
        const double lhs = ta.w_minus_yp[k];
        const double rel = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
        rep.max_dhat_residual = std::max(rep.max_dhat_residual, rel);
    }
    return rep;
}

}  // namespace dobkit
