// Command-line front end. Everything goes through the C API so the tool
// doubles as a smoke test of the shared-library surface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dobkit.h"

namespace {

struct ScenarioHandle {
    dobkit_scenario* h = nullptr;
    ~ScenarioHandle() { dobkit_scenario_free(h); }
};

struct OwnedString {
    char* s = nullptr;
    ~OwnedString() { dobkit_string_free(s); }
};

int load_scenario(const std::string& path, uint64_t seed, bool seed_set,
                  const std::string& settle_eig, ScenarioHandle& out) {
    char err[1024] = {0};
    const dobkit_status st = dobkit_scenario_load_file(path.c_str(), &out.h, err, sizeof(err));
    if (st != DOBKIT_OK) {
        std::cerr << "error: " << err << "\n";
        return static_cast<int>(st);
    }
    if (seed_set) dobkit_scenario_set_seed(out.h, seed);
    if (!settle_eig.empty()) {
        if (dobkit_scenario_set_settle_eig(out.h, settle_eig[0]) != DOBKIT_OK) {
            std::cerr << "error: --settle-eig must be 's' or 'f'\n";
            return 1;
        }
    }
    return 0;
}

bool write_text(const std::string& path, const char* text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return false;
    os << text;
    return true;
}

int finish(dobkit_status st, const char* err, const char* json, const std::string& json_path) {
    if (json) {
        if (!json_path.empty()) {
            if (!write_text(json_path, json)) {
                std::cerr << "error: cannot write '" << json_path << "'\n";
                return 6;
            }
        } else {
            std::cout << json << "\n";
        }
    }
    if (st != DOBKIT_OK && err[0]) std::cerr << "error: " << err << "\n";
    return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Q-filter DOB closed-loop simulator and tau-design tool"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, report_path, settle_eig;
    uint64_t seed = 0;
    bool seed_set = false;
    double tau_min = 0.0, tau_max = 0.0;
    int points = 0, probes = 5;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--seed", seed, "override the scenario RNG seed")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--settle-eig", settle_eig,
                        "eigenvalue extremum used in the settle-time bound (s or f)")
            ->check(CLI::IsMember({"s", "f"}));
    };

    CLI::App* sim = app.add_subcommand("simulate", "integrate the closed loop");
    add_common(sim);
    sim->add_option("--out", out_path, "trajectory CSV path")->required();
    sim->add_option("--report", report_path, "report JSON path (default: stdout)");

    CLI::App* design = app.add_subcommand("design", "run the tau-design procedure");
    add_common(design);
    design->add_option("--out", report_path, "design JSON path (default: stdout)");

    CLI::App* sweep = app.add_subcommand("sweep", "sup-norm table over a log grid of tau");
    add_common(sweep);
    sweep->add_option("--tau-min", tau_min, "smallest tau")->required();
    sweep->add_option("--tau-max", tau_max, "largest tau")->required();
    sweep->add_option("--points", points, "grid size")->required();
    sweep->add_option("--out", out_path, "sweep CSV path")->required();
    sweep->add_option("--report", report_path, "table JSON path (default: stdout)");

    CLI::App* verify = app.add_subcommand("verify", "design + probe simulations + cross-check");
    add_common(verify);
    verify->add_option("--probes", probes, "number of tau probes (default 5)");
    verify->add_option("--out", report_path, "verdict JSON path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    ScenarioHandle scn;
    if (int rc = load_scenario(scenario_path, seed, seed_set, settle_eig, scn)) return rc;

    char err[1024] = {0};
    OwnedString json;

    if (sim->parsed()) {
        const dobkit_status st =
            dobkit_simulate(scn.h, out_path.c_str(), &json.s, err, sizeof(err));
        return finish(st, err, json.s, report_path);
    }
    if (design->parsed()) {
        const dobkit_status st = dobkit_design(scn.h, &json.s, err, sizeof(err));
        return finish(st, err, json.s, report_path);
    }
    if (sweep->parsed()) {
        const dobkit_status st = dobkit_sweep(scn.h, tau_min, tau_max, points, out_path.c_str(),
                                              &json.s, err, sizeof(err));
        return finish(st, err, json.s, report_path);
    }
    const dobkit_status st = dobkit_verify(scn.h, probes, &json.s, err, sizeof(err));
    return finish(st, err, json.s, report_path);
}
