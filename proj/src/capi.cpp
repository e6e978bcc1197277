#include "dobkit.h"

#include <cstring>
#include <new>
#include <string>

#include "dobkit/runner.hpp"
#include "dobkit/scenario_json.hpp"

using namespace dobkit;

struct dobkit_scenario {
    Scenario scn;
};

namespace {

void put_err(char* err, size_t err_len, const std::string& msg) {
    if (!err || err_len == 0) return;
    const size_t n = std::min(err_len - 1, msg.size());
    std::memcpy(err, msg.data(), n);
    err[n] = '\0';
}

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (!out) return nullptr;
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

/* Maps the internal exit-code vocabulary onto the C status enum and
 * converts exceptions into statuses; no exception crosses the ABI. */
template <typename Fn>
dobkit_status guarded(char* err, size_t err_len, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        put_err(err, err_len, e.what());
        return DOBKIT_ERR_CONFIG;
    } catch (const NumericError& e) {
        put_err(err, err_len, e.what());
        return DOBKIT_ERR_NUMERIC;
    } catch (const std::invalid_argument& e) {
        put_err(err, err_len, e.what());
        return DOBKIT_ERR_CONFIG;
    } catch (const std::exception& e) {
        put_err(err, err_len, e.what());
        return DOBKIT_ERR_NUMERIC;
    }
}

dobkit_status from_run(const RunStatus& rs, char* err, size_t err_len) {
    if (!rs.ok()) put_err(err, err_len, rs.message);
    switch (rs.code) {
        case 0: return DOBKIT_OK;
        case 2: return DOBKIT_ERR_DIVERGED;
        case 3: return DOBKIT_ERR_INFEASIBLE;
        case 4: return DOBKIT_ERR_GUARANTEE;
        case 6: return DOBKIT_ERR_IO;
        default: return DOBKIT_ERR_CONFIG;
    }
}

}  // namespace

extern "C" {

const char* dobkit_version(void) { return "0.1.0"; }

dobkit_status dobkit_scenario_load_file(const char* path, dobkit_scenario** out, char* err,
                                        size_t err_len) {
    if (!path || !out) {
        put_err(err, err_len, "null argument");
        return DOBKIT_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded(err, err_len, [&] {
        auto* h = new dobkit_scenario{load_scenario_file(path)};
        *out = h;
        return DOBKIT_OK;
    });
}

dobkit_status dobkit_scenario_load_json(const char* text, dobkit_scenario** out, char* err,
                                        size_t err_len) {
    if (!text || !out) {
        put_err(err, err_len, "null argument");
        return DOBKIT_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded(err, err_len, [&] {
        auto* h = new dobkit_scenario{load_scenario_json(text)};
        *out = h;
        return DOBKIT_OK;
    });
}

void dobkit_scenario_free(dobkit_scenario* scn) { delete scn; }

void dobkit_scenario_set_seed(dobkit_scenario* scn, uint64_t seed) {
    if (scn) scn->scn.sim.seed = seed;
}

dobkit_status dobkit_scenario_set_settle_eig(dobkit_scenario* scn, char which) {
    if (!scn || (which != 's' && which != 'f')) return DOBKIT_ERR_CONFIG;
    scn->scn.design.settle_eig = which;
    return DOBKIT_OK;
}

dobkit_status dobkit_simulate(dobkit_scenario* scn, const char* csv_path, char** report_json,
                              char* err, size_t err_len) {
    if (!scn) {
        put_err(err, err_len, "null scenario");
        return DOBKIT_ERR_CONFIG;
    }
    return guarded(err, err_len, [&] {
        std::string report;
        const RunStatus rs =
            run_simulate(scn->scn, csv_path ? csv_path : "", report_json ? &report : nullptr);
        if (report_json) *report_json = dup_string(report);
        return from_run(rs, err, err_len);
    });
}

dobkit_status dobkit_design(dobkit_scenario* scn, char** result_json, char* err,
                            size_t err_len) {
    if (!scn) {
        put_err(err, err_len, "null scenario");
        return DOBKIT_ERR_CONFIG;
    }
    return guarded(err, err_len, [&] {
        std::string result;
        const RunStatus rs = run_design(scn->scn, result_json ? &result : nullptr);
        if (result_json) *result_json = dup_string(result);
        return from_run(rs, err, err_len);
    });
}

dobkit_status dobkit_sweep(dobkit_scenario* scn, double tau_min, double tau_max, int points,
                           const char* csv_path, char** table_json, char* err, size_t err_len) {
    if (!scn) {
        put_err(err, err_len, "null scenario");
        return DOBKIT_ERR_CONFIG;
    }
    return guarded(err, err_len, [&] {
        std::string table;
        const RunStatus rs = run_sweep(scn->scn, tau_min, tau_max, points,
                                       csv_path ? csv_path : "", table_json ? &table : nullptr);
        if (table_json) *table_json = dup_string(table);
        return from_run(rs, err, err_len);
    });
}

dobkit_status dobkit_verify(dobkit_scenario* scn, int probes, char** verdict_json, char* err,
                            size_t err_len) {
    if (!scn) {
        put_err(err, err_len, "null scenario");
        return DOBKIT_ERR_CONFIG;
    }
    return guarded(err, err_len, [&] {
        std::string verdict;
        const RunStatus rs = run_verify(scn->scn, probes, verdict_json ? &verdict : nullptr);
        if (verdict_json) *verdict_json = dup_string(verdict);
        return from_run(rs, err, err_len);
    });
}

void dobkit_string_free(char* s) { delete[] s; }

}  // extern "C"
