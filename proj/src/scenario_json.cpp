#include "dobkit/scenario_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dobkit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
    throw ConfigError(ptr, msg);
}

void check_keys(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(ptr, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) fail(ptr + "/" + it.key(), "unknown field");
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& ptr, const char* key) {
    const json* p = find(j, key);
    if (!p) fail(ptr + "/" + key, "missing required field");
    return *p;
}

double num(const json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<int>();
}

Vec vec(const json& j, const std::string& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array of numbers");
    Vec out;
    out.reserve(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(num(j[i], ptr + "/" + std::to_string(i)));
    return out;
}

Mat mat(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of rows");
    const size_t cols = j[0].is_array() ? j[0].size() : 0;
    Mat m(static_cast<int>(j.size()), static_cast<int>(cols));
    for (size_t r = 0; r < j.size(); ++r) {
        const std::string rptr = ptr + "/" + std::to_string(r);
        if (!j[r].is_array() || j[r].size() != cols) fail(rptr, "rows must have equal length");
        for (size_t c = 0; c < cols; ++c)
            m(static_cast<int>(r), static_cast<int>(c)) =
                num(j[r][c], rptr + "/" + std::to_string(c));
    }
    return m;
}

Signal signal(const json& j, const std::string& ptr) {
    check_keys(j, ptr, {"type", "value", "amp", "freq", "phase", "coeffs"});
    const std::string type = require(j, ptr, "type").get<std::string>();
    if (type == "constant") return Signal::constant(num(require(j, ptr, "value"), ptr + "/value"));
    if (type == "sin" || type == "cos") {
        const double amp = num(require(j, ptr, "amp"), ptr + "/amp");
        const double freq = num(require(j, ptr, "freq"), ptr + "/freq");
        double phase = 0.0;
        if (const json* p = find(j, "phase")) phase = num(*p, ptr + "/phase");
        return type == "sin" ? Signal::sine(amp, freq, phase) : Signal::cosine(amp, freq, phase);
    }
    if (type == "poly") return Signal::poly(vec(require(j, ptr, "coeffs"), ptr + "/coeffs"));
    fail(ptr + "/type", "unknown signal type '" + type + "'");
}

StateDisturbance state_disturbance(const json& j, const std::string& ptr) {
    check_keys(j, ptr, {"type", "amp"});
    const std::string type = require(j, ptr, "type").get<std::string>();
    if (type == "none") return StateDisturbance::none();
    if (type == "sin_x1")
        return StateDisturbance::sin_x1(num(require(j, ptr, "amp"), ptr + "/amp"));
    fail(ptr + "/type", "unknown state-disturbance type '" + type + "'");
}

NoiseSpec noise_spec(const json& j, const std::string& ptr) {
    check_keys(j, ptr, {"type", "mu", "freq", "period"});
    NoiseSpec ns;
    const std::string type = require(j, ptr, "type").get<std::string>();
    if (type == "none") {
        ns.kind = NoiseSpec::Kind::None;
        return ns;
    }
    ns.mu = num(require(j, ptr, "mu"), ptr + "/mu");
    if (type == "uniform") {
        ns.kind = NoiseSpec::Kind::Uniform;
    } else if (type == "sinusoid") {
        ns.kind = NoiseSpec::Kind::Sinusoid;
        ns.freq = num(require(j, ptr, "freq"), ptr + "/freq");
    } else if (type == "square") {
        ns.kind = NoiseSpec::Kind::Square;
        ns.period = num(require(j, ptr, "period"), ptr + "/period");
    } else {
        fail(ptr + "/type", "unknown noise type '" + type + "'");
    }
    return ns;
}

}  // namespace

Scenario load_scenario_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    check_keys(root, "",
               {"plant", "nominal", "controller", "qfilter", "signals", "sim", "design"});

    Scenario scn;

    {
        const json& p = require(root, "", "plant");
        check_keys(p, "/plant",
                   {"nu", "n", "phi", "psi", "S", "G", "g", "g_lo", "g_hi", "f_d"});
        scn.plant.nu = integer(require(p, "/plant", "nu"), "/plant/nu");
        scn.plant.n = integer(require(p, "/plant", "n"), "/plant/n");
        scn.plant.phi = vec(require(p, "/plant", "phi"), "/plant/phi");
        scn.plant.psi = vec(require(p, "/plant", "psi"), "/plant/psi");
        scn.plant.S = mat(require(p, "/plant", "S"), "/plant/S");
        scn.plant.G = vec(require(p, "/plant", "G"), "/plant/G");
        scn.plant.g = num(require(p, "/plant", "g"), "/plant/g");
        scn.plant.g_lo = num(require(p, "/plant", "g_lo"), "/plant/g_lo");
        scn.plant.g_hi = num(require(p, "/plant", "g_hi"), "/plant/g_hi");
        if (const json* f = find(p, "f_d")) scn.plant.f = state_disturbance(*f, "/plant/f_d");
    }
    {
        const json& n = require(root, "", "nominal");
        check_keys(n, "/nominal", {"phi", "psi", "g", "S", "G"});
        scn.nominal.phi_bar = vec(require(n, "/nominal", "phi"), "/nominal/phi");
        scn.nominal.psi_bar = vec(require(n, "/nominal", "psi"), "/nominal/psi");
        scn.nominal.g_bar = num(require(n, "/nominal", "g"), "/nominal/g");
        scn.nominal.S_bar = mat(require(n, "/nominal", "S"), "/nominal/S");
        scn.nominal.G_bar = vec(require(n, "/nominal", "G"), "/nominal/G");
    }
    {
        const json& c = require(root, "", "controller");
        check_keys(c, "/controller", {"J", "K", "L", "D"});
        scn.ctrl.K = vec(require(c, "/controller", "K"), "/controller/K");
        scn.ctrl.L = vec(require(c, "/controller", "L"), "/controller/L");
        scn.ctrl.D = num(require(c, "/controller", "D"), "/controller/D");
        scn.ctrl.n_c = static_cast<int>(scn.ctrl.K.size());
        if (scn.ctrl.n_c == 0) {
            scn.ctrl.J = Mat(0, 0);
            const json& jj = require(c, "/controller", "J");
            if (!jj.is_array() || !jj.empty()) fail("/controller/J", "expected [] for n_c = 0");
        } else {
            scn.ctrl.J = mat(require(c, "/controller", "J"), "/controller/J");
        }
    }
    {
        const json& q = require(root, "", "qfilter");
        check_keys(q, "/qfilter", {"l", "m", "a", "c", "tau", "s_bar"});
        scn.qfilter.l = integer(require(q, "/qfilter", "l"), "/qfilter/l");
        scn.qfilter.m = integer(require(q, "/qfilter", "m"), "/qfilter/m");
        scn.qfilter.a = vec(require(q, "/qfilter", "a"), "/qfilter/a");
        if (const json* c = find(q, "c")) scn.qfilter.c = vec(*c, "/qfilter/c");
        scn.qfilter.tau = num(require(q, "/qfilter", "tau"), "/qfilter/tau");
        if (const json* s = find(q, "s_bar"))
            scn.qfilter.s_bar = num(*s, "/qfilter/s_bar");
    }
    if (const json* sig = find(root, "signals")) {
        check_keys(*sig, "/signals", {"r", "d"});
        if (const json* r = find(*sig, "r")) scn.r = signal(*r, "/signals/r");
        if (const json* d = find(*sig, "d")) scn.d = signal(*d, "/signals/d");
    }
    {
        const json& s = require(root, "", "sim");
        check_keys(s, "/sim",
                   {"step", "horizon", "seed", "noise", "x0", "z0", "theta0"});
        scn.sim.step = num(require(s, "/sim", "step"), "/sim/step");
        scn.sim.horizon = num(require(s, "/sim", "horizon"), "/sim/horizon");
        if (const json* seed = find(s, "seed")) {
            if (!seed->is_number_integer()) fail("/sim/seed", "expected an integer");
            scn.sim.seed = seed->get<std::uint64_t>();
        }
        if (const json* n = find(s, "noise")) scn.sim.noise = noise_spec(*n, "/sim/noise");
        if (const json* x0 = find(s, "x0")) scn.sim.x0 = vec(*x0, "/sim/x0");
        if (const json* z0 = find(s, "z0")) scn.sim.z0 = vec(*z0, "/sim/z0");
        if (const json* t0 = find(s, "theta0")) scn.sim.theta0 = vec(*t0, "/sim/theta0");
    }
    if (const json* d = find(root, "design")) {
        check_keys(*d, "/design",
                   {"eps_U", "eps_T", "mu", "c_U", "c_T", "budget", "g_grid_points",
                    "settle_eig", "kappa1_scale"});
        scn.design.present = true;
        scn.design.eps_U = num(require(*d, "/design", "eps_U"), "/design/eps_U");
        scn.design.eps_T = num(require(*d, "/design", "eps_T"), "/design/eps_T");
        scn.design.mu = num(require(*d, "/design", "mu"), "/design/mu");
        if (const json* v = find(*d, "c_U")) scn.design.c_U_override = num(*v, "/design/c_U");
        if (const json* v = find(*d, "c_T")) scn.design.c_T_override = num(*v, "/design/c_T");
        if (const json* v = find(*d, "budget"))
            scn.design.sample_budget = integer(*v, "/design/budget");
        if (const json* v = find(*d, "g_grid_points"))
            scn.design.g_grid_points = integer(*v, "/design/g_grid_points");
        if (const json* v = find(*d, "settle_eig")) {
            const std::string s = v->is_string() ? v->get<std::string>() : "";
            if (s != "s" && s != "f") fail("/design/settle_eig", "expected \"s\" or \"f\"");
            scn.design.settle_eig = s[0];
        }
        if (const json* v = find(*d, "kappa1_scale"))
            scn.design.kappa1_scale = num(*v, "/design/kappa1_scale");
    }

    scn.finalize();
    return scn;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("/", "cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario_json(ss.str());
}

}  // namespace dobkit
