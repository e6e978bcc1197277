#include "dobkit/scenario.hpp"

#include "dobkit/transform.hpp"

namespace dobkit {

void NoiseSpec::validate() const {
    if (mu < 0.0) throw ConfigError("/sim/noise/mu", "noise bound must be nonnegative");
    if (kind == Kind::Sinusoid && !(freq > 0.0))
        throw ConfigError("/sim/noise/freq", "sinusoid frequency must be positive");
    if (kind == Kind::Square && !(period > 0.0))
        throw ConfigError("/sim/noise/period", "square-wave period must be positive");
    if (kind != Kind::None && !(mu > 0.0))
        throw ConfigError("/sim/noise/mu", "noise bound must be positive for this generator");
}

void SimConfig::validate(const PlantModel& plant, const OuterController& ctrl) const {
    if (!(step > 0.0)) throw ConfigError("/sim/step", "step must be positive");
    if (!(horizon > 0.0)) throw ConfigError("/sim/horizon", "horizon must be positive");
    if (step > horizon / 100.0)
        throw ConfigError("/sim/step", "step must not exceed horizon/100");
    noise.validate();
    if (static_cast<int>(x0.size()) != plant.nu)
        throw ConfigError("/sim/x0", "expected length nu");
    if (static_cast<int>(z0.size()) != plant.n - plant.nu)
        throw ConfigError("/sim/z0", "expected length n - nu");
    if (static_cast<int>(theta0.size()) != ctrl.n_c)
        throw ConfigError("/sim/theta0", "expected length n_c");
}

void DesignSpec::validate() const {
    if (!present) return;
    if (!(eps_U > 0.0)) throw ConfigError("/design/eps_U", "must be positive");
    if (!(eps_T > eps_U))
        throw ConfigError("/design/eps_T", "transient bound must exceed steady-state bound");
    if (mu < 0.0) throw ConfigError("/design/mu", "noise level must be nonnegative");
    if (sample_budget < 100)
        throw ConfigError("/design/budget", "sampling budget unreasonably small");
    if (g_grid_points < 2) throw ConfigError("/design/g_grid_points", "need at least 2 points");
    if (settle_eig != 's' && settle_eig != 'f')
        throw ConfigError("/design/settle_eig", "must be 's' or 'f'");
    if (!(kappa1_scale > 0.0)) throw ConfigError("/design/kappa1_scale", "must be positive");
    if (c_U_override && !(*c_U_override > 0.0))
        throw ConfigError("/design/c_U", "override must be positive");
    if (c_T_override && !(*c_T_override > 0.0))
        throw ConfigError("/design/c_T", "override must be positive");
}

void Scenario::finalize() {
    plant.validate();
    nominal.validate(plant);
    ctrl.validate();
    qfilter.validate(plant.nu);
    if (sim.x0.empty()) sim.x0.assign(plant.nu, 0.0);
    if (sim.z0.empty()) sim.z0.assign(plant.n - plant.nu, 0.0);
    if (sim.theta0.empty() && ctrl.n_c > 0) sim.theta0.assign(ctrl.n_c, 0.0);
    sim.validate(plant, ctrl);
    design.validate();
    aug = assemble_augmented(plant, nominal, ctrl);
    validate_fast_stability(plant, nominal, ctrl, aug, qfilter,
                            design.present ? design.g_grid_points : 21);
}

}  // namespace dobkit
