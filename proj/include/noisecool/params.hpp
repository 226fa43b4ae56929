#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace noisecool {

namespace constants {
// CODATA 2018 exact SI values
inline constexpr double hbar = 1.054571817e-34; // J s
inline constexpr double k_boltzmann = 1.380649e-23; // J/K
} // namespace constants

/// Physical rates of the cavity-oscillator system plus bath occupancies.
/// All rates are angular (rad/s); user-facing I/O converts to/from Hz at the
/// boundary (see io.hpp).
struct SystemParams {
    double omega_m = 0.0;            ///< mechanical angular frequency, rad/s
    double gamma = 0.0;              ///< intrinsic mechanical damping, rad/s
    double kappa = 0.0;              ///< pump-cavity total damping, rad/s
    double kappa_ext_fraction = 1.0; ///< external-coupling fraction of kappa, (0,1]
    double g0 = 0.0;                 ///< single-photon coupling, rad/s
    double n_th = 0.0;               ///< intrinsic bath occupancy
    double n_ba = 0.0;               ///< residual backaction / cavity occupancy floor
    double probe_cooperativity = 0.0; ///< C_d of the thermometry probe

    double kappa_ext() const { return kappa_ext_fraction * kappa; }
};

/// Injected box-spectrum noise drive. The box is centered at
/// omega_c - omega_m + center_detuning and spans +-sigma/2 around it.
struct NoiseDrive {
    double flux = 0.0;            ///< F0, photons/s
    double sigma = 0.0;           ///< full bandwidth, rad/s
    double center_detuning = 0.0; ///< box-center offset from the red sideband, rad/s
    std::uint64_t seed = 0;
};

/// Integrator configuration.
struct SimConfig {
    double dt = 0.0;      ///< step, s; must satisfy dt*kappa <= 0.1
    double t_total = 0.0; ///< total integration time, s
    double t_burn = 0.0;  ///< discarded transient, s
    int n_traj = 1;
    int sample_stride = 1;      ///< output decimation factor
    int noise_repeat_blocks = 1; ///< >1 tiles a shorter noise block (diagnostic)
};

enum class ViolationCode {
    rate_nonpositive,
    kappa_ext_fraction_range,
    occupancy_negative,
    cooperativity_negative,
    resolved_sideband_violated,
    flux_negative,
    sigma_nonpositive,
    blue_sideband_leak,
    dt_nonpositive,
    dt_stability_gate,
    burn_not_below_total,
    n_traj_below_one,
    stride_below_one,
};

const char* to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string field;
    std::string message;
};

/// Bose occupancy [exp(hbar w / kB T) - 1]^-1. Throws std::invalid_argument
/// on non-positive inputs.
double thermal_occupancy(double temperature_kelvin, double omega_m);

/// Folds the probe's backaction into (gamma, n_th):
/// gamma' = gamma (1 + C_d), n_th' = n_th / (1 + C_d), C_d' = 0.
/// The heat load gamma*n_th is preserved exactly.
SystemParams renormalize_for_probe(const SystemParams& params);

std::vector<Violation> validate(const SystemParams& params);
std::vector<Violation> validate(const SystemParams& params, const NoiseDrive& drive);
std::vector<Violation> validate(const SystemParams& params, const NoiseDrive& drive,
                                const SimConfig& cfg);

} // namespace noisecool
