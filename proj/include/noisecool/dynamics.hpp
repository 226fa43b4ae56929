#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "noisecool/noisegen.hpp"
#include "noisecool/params.hpp"

namespace noisecool {

/// Rotating-frame state: alpha rides the red-sideband frame (omega_c - omega_m),
/// d the cavity frame, b the mechanical frame. All slowly varying in steady state.
struct StateVector {
    std::complex<double> alpha{}; ///< classical cavity envelope, sqrt(photons)
    std::complex<double> d{};     ///< cavity fluctuation, sqrt(photons)
    std::complex<double> b{};     ///< mechanical amplitude, sqrt(phonons)
};

struct Trajectory {
    std::vector<double> times;        ///< s, uniform stride
    std::vector<StateVector> states;
    std::vector<double> occupancy_series; ///< |b|^2 - 1/2 per sample
    double dt_sample = 0.0;
};

struct EnsembleResult {
    double n_m_mean = 0.0;
    double n_m_stderr = 0.0;
    double gamma_opt_empirical = 0.0; ///< 4 g0^2 <|alpha|^2>/kappa times arctan factor
    double mean_photons = 0.0;        ///< <|alpha|^2>
    int n_traj = 0;
};

class SimulationError : public std::runtime_error {
  public:
    SimulationError(std::string message, std::size_t step)
        : std::runtime_error(std::move(message)), step_(step) {}
    std::size_t step() const { return step_; }

  private:
    std::size_t step_;
};

/// Exact exponential factors for the linear drift plus first-order input
/// weights phi1 = (1 - e^-z dt)/(z dt) and exact per-step bath variances.
struct StepCoefficients {
    std::complex<double> decay_alpha{}; ///< e^{-(i omega_m + kappa/2) dt}
    double decay_d = 0.0;               ///< e^{-kappa dt / 2}
    double decay_b = 0.0;               ///< e^{-gamma dt / 2}
    std::complex<double> drive_weight{}; ///< sqrt(kappa_ext) dt phi1(z_alpha dt)
    double coupling_weight_d = 0.0;      ///< dt phi1(kappa dt / 2)
    double coupling_weight_b = 0.0;      ///< dt phi1(gamma dt / 2)
    double cavity_noise_std = 0.0; ///< per-quadrature std of the d increment
    double mech_noise_std = 0.0;   ///< per-quadrature std of the b increment
    double g0 = 0.0;
    double dt = 0.0;
};

StepCoefficients make_step_coefficients(const SystemParams& params, double dt);

/// One integrator step. Noise increments are passed in already scaled
/// (runner draws them with the coefficients' std deviations), so the linear
/// drift can be tested in isolation with zero inputs.
struct StepInputs {
    std::complex<double> drive{};        ///< xi(t_n)
    std::complex<double> cavity_noise{}; ///< scaled complex increment for d
    std::complex<double> mech_noise{};   ///< scaled complex increment for b
};

StateVector step_exponential_euler(const StateVector& state, const StepInputs& in,
                                   const StepCoefficients& coeff);

/// Integrate one trajectory driven by box noise synthesized from `drive`
/// (envelope seed and bath seed are both derived from `seed`).
/// Throws SimulationError on divergence, std::invalid_argument when the
/// stability gate dt*kappa <= 0.1 is violated.
Trajectory run_trajectory(const SystemParams& params, const NoiseDrive& drive,
                          const SimConfig& cfg, std::uint64_t seed);

/// Same integrator with a caller-supplied envelope (e.g. a coherent tone).
Trajectory run_trajectory(const SystemParams& params, const ComplexEnvelope& envelope,
                          const SimConfig& cfg, std::uint64_t seed);

struct EnsembleRun {
    EnsembleResult result;
    std::vector<Trajectory> trajectories; ///< decimated; empty if not kept
};

/// Independent trajectories with seeds derive(drive.seed, i), reduced in index
/// order so the result is identical for any thread count.
EnsembleRun run_ensemble_full(const SystemParams& params, const NoiseDrive& drive,
                              const SimConfig& cfg, bool keep_trajectories = true,
                              unsigned n_threads = 0);
/// Shared-envelope variant (all trajectories see the same drive waveform).
EnsembleRun run_ensemble_full(const SystemParams& params, const ComplexEnvelope& envelope,
                              const SimConfig& cfg, std::uint64_t master_seed,
                              bool keep_trajectories = true, unsigned n_threads = 0);

EnsembleResult run_ensemble(const SystemParams& params, const NoiseDrive& drive,
                            const SimConfig& cfg, unsigned n_threads = 0);

} // namespace noisecool
