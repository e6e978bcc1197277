#include "dobkit/runner.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "dobkit/csv.hpp"

namespace dobkit {

namespace {

using nlohmann::json;

/// JSON has no non-finite numbers; keep them readable and round-trippable.
json jnum(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json constants_json(const GainConstants& gc) {
    json j;
    j["g_check"] = jnum(gc.g_check);
    j["kappa1"] = jnum(gc.kappa1);
    j["kappa2"] = jnum(gc.kappa2);
    j["kappa3"] = jnum(gc.kappa3);
    j["kappa4"] = jnum(gc.kappa4);
    j["kappa5"] = jnum(gc.kappa5);
    j["sigma1"] = jnum(gc.sigma1);
    j["sigma2"] = jnum(gc.sigma2);
    j["sigma3"] = jnum(gc.sigma3);
    j["sigma4"] = jnum(gc.sigma4);
    j["sigma5"] = jnum(gc.sigma5);
    j["b0"] = jnum(gc.b0);
    j["b1"] = jnum(gc.b1);
    j["b2"] = jnum(gc.b2);
    j["b3"] = jnum(gc.b3);
    j["k_f"] = jnum(gc.k_f);
    j["sup_lumped"] = jnum(gc.sup_lumped);
    j["s_bar"] = jnum(gc.s_bar);
    j["lambda_max_f"] = jnum(gc.lambda_max_f);
    j["lambda_min_f"] = jnum(gc.lambda_min_f);
    j["lambda_max_s"] = jnum(gc.lambda_max_s);
    j["lambda_min_s"] = jnum(gc.lambda_min_s);
    j["settle_eig"] = std::string(1, gc.settle_eig);
    return j;
}

json report_json_of(const Scenario& scn, const Trajectory& tr) {
    json j;
    j["tau"] = jnum(tr.tau);
    j["step"] = jnum(tr.step);
    j["horizon"] = jnum(tr.times.empty() ? 0.0 : tr.times.back());
    j["seed"] = scn.sim.seed;
    j["s_bar"] = jnum(tr.s_bar);
    j["samples"] = tr.times.size();
    j["sup_e"] = jnum(tr.sup_e());
    j["tail_sup_e"] = jnum(tr.tail_sup_e());
    j["saturation_fraction"] = jnum(tr.saturation_fraction());
    j["diverged"] = tr.diverged;
    if (tr.diverged) j["divergence_time"] = jnum(tr.divergence_time);
    return j;
}

}  // namespace

std::string design_result_json(const DesignResult& dr) {
    json j;
    j["mu"] = jnum(dr.mu);
    j["mu_star_1"] = jnum(dr.mu_star_1);
    j["mu_star_2"] = jnum(dr.mu_star_2);
    j["mu_star"] = jnum(dr.mu_star);
    j["tau_bar1"] = jnum(dr.tau_bar1);
    j["tau_bar2"] = jnum(dr.tau_bar2);
    j["tau_dagger"] = jnum(dr.tau_dagger);
    j["tau_lo3"] = jnum(dr.tau_lo3);
    j["tau_hi3"] = jnum(dr.tau_hi3);
    j["tau_lower"] = jnum(dr.tau_lower);
    j["tau_upper"] = jnum(dr.tau_upper);
    j["feasible"] = dr.feasible;
    j["recommended_tau"] = jnum(dr.recommended_tau);
    j["binding"] = dr.binding;
    j["t_star"] = jnum(dr.t_star);
    j["k0"] = jnum(dr.k0);
    j["c_U"] = jnum(dr.c_U);
    j["c_T"] = jnum(dr.c_T);
    j["eps_U"] = jnum(dr.eps_U);
    j["eps_T"] = jnum(dr.eps_T);
    j["constants"] = constants_json(dr.gc);
    return j.dump(2);
}

std::string verify_report_json(const VerifyReport& vr, const DesignResult& dr) {
    json j;
    j["all_pass"] = vr.all_pass;
    j["eps_T"] = jnum(vr.eps_T);
    j["eps_U"] = jnum(vr.eps_U);
    json probes = json::array();
    for (const auto& p : vr.probes) {
        json pj;
        pj["tau"] = jnum(p.tau);
        pj["sup_e"] = jnum(p.sup_e);
        pj["tail_sup_e"] = jnum(p.tail_sup_e);
        pj["margin_transient"] = jnum(p.margin_transient);
        pj["margin_steady"] = jnum(p.margin_steady);
        pj["pass"] = p.pass;
        pj["diverged"] = p.diverged;
        probes.push_back(pj);
    }
    j["probes"] = probes;
    json cj;
    cj["max_e_deviation"] = jnum(vr.crosscheck.max_e_deviation);
    cj["max_dhat_residual"] = jnum(vr.crosscheck.max_dhat_residual);
    cj["saturation_fraction"] = jnum(vr.crosscheck.saturation_fraction);
    cj["ok"] = vr.crosscheck_ok;
    j["crosscheck"] = cj;
    j["design"] = json::parse(design_result_json(dr));
    return j.dump(2);
}

void write_trajectory_csv(std::ostream& os, const Scenario& scn, const Trajectory& tr) {
    const StackLayout L = StackLayout::of(scn);
    CsvWriter w(os);
    std::vector<std::string> names{"time", "e_norm"};
    auto block = [&](const char* base, int n) {
        for (int i = 1; i <= n; ++i) names.push_back(std::string(base) + std::to_string(i));
    };
    block("x", L.nu);
    block("z", L.nz);
    block("theta", L.nc);
    block("zbar", L.nz);
    block("q", L.l);
    block("p", L.l);
    block("chi_n", L.n_e);
    names.push_back("dhat");
    names.push_back("w_minus_yp");
    names.push_back("sat_active");
    names.push_back("noise");
    w.header(names);

    for (size_t k = 0; k < tr.times.size(); ++k) {
        w.field(tr.times[k]);
        w.field(tr.e_norm[k]);
        if (tr.full_states && k < tr.stacked.size()) {
            for (double v : tr.stacked[k]) w.field(v);
        } else {
            for (int i = 0; i < L.total; ++i) w.field(0.0);
        }
        w.field(tr.dhat[k]);
        w.field(tr.w_minus_yp[k]);
        w.field(static_cast<long>(tr.sat_active[k]));
        w.field(tr.noise[k]);
        w.end_row();
    }
}

RunStatus run_simulate(const Scenario& scn, const std::string& csv_path,
                       std::string* report_json) {
    SimOverrides ov;
    ov.record_full = true;
    const Trajectory tr = integrate(scn, ov);
    if (!csv_path.empty()) {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) return {6, "cannot open output file '" + csv_path + "'"};
        write_trajectory_csv(os, scn, tr);
    }
    if (report_json) *report_json = report_json_of(scn, tr).dump(2);
    if (tr.diverged)
        return {2, "trajectory diverged at t = " + CsvWriter::format_double(tr.divergence_time)};
    return {0, ""};
}

RunStatus run_design(const Scenario& scn, std::string* result_json) {
    const DesignResult dr = design_tau(scn);
    if (result_json) *result_json = design_result_json(dr);
    if (!dr.feasible) return {3, "design infeasible: " + dr.binding};
    return {0, ""};
}

RunStatus run_sweep(const Scenario& scn, double tau_min, double tau_max, int points,
                    const std::string& csv_path, std::string* report_json) {
    if (!(tau_min > 0.0) || !(tau_max > tau_min) || points < 2)
        return {1, "sweep grid requires 0 < tau-min < tau-max and points >= 2"};
    Vec grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = tau_min * std::pow(tau_max / tau_min, static_cast<double>(i) / (points - 1));
    const std::vector<PerformanceReport> reports = sweep_tau(scn, grid);

    if (!csv_path.empty()) {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) return {6, "cannot open output file '" + csv_path + "'"};
        CsvWriter w(os);
        w.header({"tau", "sup_e", "tail_sup_e", "saturation_fraction", "diverged"});
        for (const auto& r : reports) {
            w.field(r.tau);
            w.field(r.sup_e);
            w.field(r.tail_sup_e);
            w.field(r.saturation_fraction);
            w.field(static_cast<long>(r.diverged ? 1 : 0));
            w.end_row();
        }
    }
    if (report_json) {
        json j;
        j["seed"] = scn.sim.seed;
        j["points"] = json::array();
        for (const auto& r : reports) {
            json pj;
            pj["tau"] = jnum(r.tau);
            pj["sup_e"] = jnum(r.sup_e);
            pj["tail_sup_e"] = jnum(r.tail_sup_e);
            pj["saturation_fraction"] = jnum(r.saturation_fraction);
            pj["diverged"] = r.diverged;
            j["points"].push_back(pj);
        }
        *report_json = j.dump(2);
    }
    return {0, ""};
}

RunStatus run_verify(const Scenario& scn, int probes, std::string* verdict_json) {
    const DesignResult dr = design_tau(scn);
    if (!dr.feasible) {
        if (verdict_json) *verdict_json = design_result_json(dr);
        return {3, "design infeasible: " + dr.binding};
    }
    const VerifyReport vr = verify_design(scn, dr, probes);
    if (verdict_json) *verdict_json = verify_report_json(vr, dr);
    if (!vr.all_pass) return {4, "guarantee violated on at least one probe"};
    return {0, ""};
}

}  // namespace dobkit
