#include "noisecool/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "noisecool/rng.hpp"

namespace noisecool {

namespace {

constexpr std::uint64_t envelope_tag = 1;
constexpr std::uint64_t bath_tag = 2;
constexpr std::uint64_t init_tag = 3;

std::complex<double> phi1(std::complex<double> w) {
    if (std::abs(w) < 1e-6) return 1.0 - w / 2.0 + w * w / 6.0;
    return (1.0 - std::exp(-w)) / w;
}

void require_cfg(const SystemParams& params, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || cfg.dt * params.kappa > 0.1)
        throw std::invalid_argument("dynamics: stability gate dt*kappa <= 0.1 violated");
    if (!(cfg.t_burn >= 0.0) || !(cfg.t_burn < cfg.t_total))
        throw std::invalid_argument("dynamics: t_burn must lie in [0, t_total)");
    if (cfg.sample_stride < 1)
        throw std::invalid_argument("dynamics: sample_stride must be >= 1");
    if (cfg.noise_repeat_blocks < 1)
        throw std::invalid_argument("dynamics: noise_repeat_blocks must be >= 1");
}

struct TrajStats {
    double occupancy_mean = 0.0;
    double photon_mean = 0.0;
};

/// Envelope samples are consumed modulo their length, which realizes the
/// optional repeated-noise-block mode when the envelope is shorter than the run.
TrajStats integrate_one(const SystemParams& params, const ComplexEnvelope& envelope,
                        const SimConfig& cfg, std::uint64_t seed, bool keep_samples,
                        Trajectory* out) {
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_total / cfg.dt));
    const auto burn_steps = static_cast<std::size_t>(std::llround(cfg.t_burn / cfg.dt));
    const auto stride = static_cast<std::size_t>(cfg.sample_stride);
    const std::size_t env_n = envelope.samples.size();
    if (env_n == 0) throw std::invalid_argument("dynamics: empty envelope");

    const StepCoefficients coeff = make_step_coefficients(params, cfg.dt);
    const std::uint64_t bath_seed = rng::derive(seed, bath_tag);
    const std::uint64_t init_seed = rng::derive(seed, init_tag);

    StateVector s;
    {
        auto gb = rng::gauss_pair(init_seed, 0, 0);
        auto gd = rng::gauss_pair(init_seed, 1, 0);
        double b_std = std::sqrt(0.5 * (params.n_th + 0.5));
        s.b = {b_std * gb.g0, b_std * gb.g1};
        s.d = {0.5 * gd.g0, 0.5 * gd.g1};
        s.alpha = {0.0, 0.0};
    }

    if (keep_samples && out) {
        std::size_t n_stored = (n_steps > burn_steps) ? (n_steps - burn_steps + stride - 1) / stride : 0;
        out->times.reserve(n_stored);
        out->states.reserve(n_stored);
        out->occupancy_series.reserve(n_stored);
        out->dt_sample = cfg.dt * static_cast<double>(stride);
    }

    double occ_sum = 0.0, photon_sum = 0.0;
    std::size_t n_post = 0;

    for (std::size_t i = 0; i < n_steps; ++i) {
        StepInputs in;
        in.drive = envelope.samples[i % env_n];
        auto gc = rng::gauss_pair(bath_seed, 0, i);
        auto gm = rng::gauss_pair(bath_seed, 1, i);
        in.cavity_noise = {coeff.cavity_noise_std * gc.g0, coeff.cavity_noise_std * gc.g1};
        in.mech_noise = {coeff.mech_noise_std * gm.g0, coeff.mech_noise_std * gm.g1};
        s = step_exponential_euler(s, in, coeff);

        if (i >= burn_steps) {
            double nb = std::norm(s.b);
            occ_sum += nb;
            photon_sum += std::norm(s.alpha);
            ++n_post;
            if ((i - burn_steps) % stride == 0) {
                if (!std::isfinite(nb) || !std::isfinite(std::norm(s.alpha)) ||
                    !std::isfinite(std::norm(s.d))) {
                    std::ostringstream os;
                    os << "DIVERGED at step " << i;
                    throw SimulationError(os.str(), i);
                }
                if (keep_samples && out) {
                    out->times.push_back(static_cast<double>(i) * cfg.dt);
                    out->states.push_back(s);
                    out->occupancy_series.push_back(nb - 0.5);
                }
            }
        }
    }
    if (n_post == 0) throw std::invalid_argument("dynamics: no post-burn samples");
    if (!std::isfinite(occ_sum)) throw SimulationError("DIVERGED at step " + std::to_string(n_steps), n_steps);

    TrajStats stats;
    stats.occupancy_mean = occ_sum / static_cast<double>(n_post) - 0.5;
    stats.photon_mean = photon_sum / static_cast<double>(n_post);
    return stats;
}

ComplexEnvelope make_drive_envelope(const NoiseDrive& drive, const SimConfig& cfg,
                                    std::uint64_t traj_seed) {
    NoiseDrive per_traj = drive;
    per_traj.seed = rng::derive(traj_seed, envelope_tag);
    double block = cfg.t_total / static_cast<double>(cfg.noise_repeat_blocks);
    return synth_box_noise(per_traj, block, cfg.dt);
}

double band_factor(double sigma, double kappa) {
    if (!(sigma > 0.0)) return 1.0;
    double r = sigma / kappa;
    return std::atan(r) / r;
}

struct EnsembleAccumulator {
    std::vector<TrajStats> stats;
    std::vector<Trajectory> trajectories;
};

EnsembleResult reduce(const SystemParams& params, double arctan_factor,
                      const std::vector<TrajStats>& stats) {
    EnsembleResult r;
    r.n_traj = static_cast<int>(stats.size());
    double occ = 0.0, photons = 0.0;
    for (const auto& s : stats) {
        occ += s.occupancy_mean;
        photons += s.photon_mean;
    }
    r.n_m_mean = occ / static_cast<double>(stats.size());
    r.mean_photons = photons / static_cast<double>(stats.size());
    double var = 0.0;
    for (const auto& s : stats) {
        double d = s.occupancy_mean - r.n_m_mean;
        var += d * d;
    }
    if (stats.size() > 1)
        var /= static_cast<double>(stats.size() - 1) * static_cast<double>(stats.size());
    r.n_m_stderr = std::sqrt(var);
    r.gamma_opt_empirical =
        4.0 * params.g0 * params.g0 * r.mean_photons / params.kappa * arctan_factor;
    return r;
}

/// Runs trajectory indices {tid, tid+k, ...} per worker; slot-indexed results
/// keep the reduction independent of scheduling.
template <typename MakeEnvelope>
EnsembleAccumulator run_parallel(const SystemParams& params, const SimConfig& cfg,
                                 std::uint64_t master_seed, bool keep, unsigned n_threads,
                                 const MakeEnvelope& make_envelope) {
    const int n_traj = cfg.n_traj;
    EnsembleAccumulator acc;
    acc.stats.resize(n_traj);
    acc.trajectories.resize(keep ? n_traj : 0);

    unsigned workers = n_threads > 0 ? n_threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n_traj));

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&](unsigned worker) {
        for (int i = static_cast<int>(worker); i < n_traj; i += static_cast<int>(workers)) {
            try {
                std::uint64_t traj_seed = rng::derive(master_seed, static_cast<std::uint64_t>(i));
                Trajectory* out = keep ? &acc.trajectories[static_cast<std::size_t>(i)] : nullptr;
                acc.stats[static_cast<std::size_t>(i)] =
                    integrate_one(params, make_envelope(traj_seed), cfg, traj_seed, keep, out);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return acc;
}

} // namespace

StepCoefficients make_step_coefficients(const SystemParams& params, double dt) {
    StepCoefficients c;
    c.dt = dt;
    c.g0 = params.g0;
    std::complex<double> z_alpha(params.kappa / 2.0, params.omega_m);
    c.decay_alpha = std::exp(-z_alpha * dt);
    c.decay_d = std::exp(-params.kappa * dt / 2.0);
    c.decay_b = std::exp(-params.gamma * dt / 2.0);
    c.drive_weight = std::sqrt(params.kappa_ext()) * dt * phi1(z_alpha * dt);
    c.coupling_weight_d = dt * std::real(phi1(params.kappa * dt / 2.0));
    c.coupling_weight_b = dt * std::real(phi1(params.gamma * dt / 2.0));
    c.cavity_noise_std = std::sqrt(0.25 * -std::expm1(-params.kappa * dt));
    c.mech_noise_std = std::sqrt(0.5 * (params.n_th + 0.5) * -std::expm1(-params.gamma * dt));
    return c;
}

StateVector step_exponential_euler(const StateVector& s, const StepInputs& in,
                                   const StepCoefficients& c) {
    constexpr std::complex<double> minus_i(0.0, -1.0);
    StateVector out;
    out.alpha = c.decay_alpha * s.alpha + c.drive_weight * in.drive;
    out.d = c.decay_d * s.d + minus_i * c.g0 * s.alpha * s.b * c.coupling_weight_d +
            in.cavity_noise;
    out.b = c.decay_b * s.b + minus_i * c.g0 * std::conj(s.alpha) * s.d * c.coupling_weight_b +
            in.mech_noise;
    return out;
}

Trajectory run_trajectory(const SystemParams& params, const NoiseDrive& drive,
                          const SimConfig& cfg, std::uint64_t seed) {
    if (auto v = validate(params, drive, cfg); !v.empty())
        throw std::invalid_argument("run_trajectory: invalid inputs: " +
                                    std::string(to_string(v.front().code)));
    require_cfg(params, cfg);
    ComplexEnvelope env = make_drive_envelope(drive, cfg, seed);
    Trajectory traj;
    integrate_one(params, env, cfg, seed, true, &traj);
    return traj;
}

Trajectory run_trajectory(const SystemParams& params, const ComplexEnvelope& envelope,
                          const SimConfig& cfg, std::uint64_t seed) {
    if (auto v = validate(params); !v.empty())
        throw std::invalid_argument("run_trajectory: invalid params: " +
                                    std::string(to_string(v.front().code)));
    require_cfg(params, cfg);
    if (envelope.dt != cfg.dt)
        throw std::invalid_argument("run_trajectory: envelope dt differs from cfg.dt");
    Trajectory traj;
    integrate_one(params, envelope, cfg, seed, true, &traj);
    return traj;
}

EnsembleRun run_ensemble_full(const SystemParams& params, const NoiseDrive& drive,
                              const SimConfig& cfg, bool keep_trajectories,
                              unsigned n_threads) {
    if (auto v = validate(params, drive, cfg); !v.empty())
        throw std::invalid_argument("run_ensemble: invalid inputs: " +
                                    std::string(to_string(v.front().code)));
    require_cfg(params, cfg);
    if (cfg.n_traj < 2)
        throw std::invalid_argument("run_ensemble: n_traj must be >= 2");

    auto acc = run_parallel(params, cfg, drive.seed, keep_trajectories, n_threads,
                            [&](std::uint64_t traj_seed) {
                                return make_drive_envelope(drive, cfg, traj_seed);
                            });
    EnsembleRun run;
    run.result = reduce(params, band_factor(drive.sigma, params.kappa), acc.stats);
    run.trajectories = std::move(acc.trajectories);
    return run;
}

EnsembleRun run_ensemble_full(const SystemParams& params, const ComplexEnvelope& envelope,
                              const SimConfig& cfg, std::uint64_t master_seed,
                              bool keep_trajectories, unsigned n_threads) {
    if (auto v = validate(params); !v.empty())
        throw std::invalid_argument("run_ensemble: invalid params: " +
                                    std::string(to_string(v.front().code)));
    require_cfg(params, cfg);
    if (cfg.n_traj < 2)
        throw std::invalid_argument("run_ensemble: n_traj must be >= 2");
    if (envelope.dt != cfg.dt)
        throw std::invalid_argument("run_ensemble: envelope dt differs from cfg.dt");

    auto acc = run_parallel(params, cfg, master_seed, keep_trajectories, n_threads,
                            [&](std::uint64_t) -> const ComplexEnvelope& { return envelope; });
    EnsembleRun run;
    run.result = reduce(params, 1.0, acc.stats);
    run.trajectories = std::move(acc.trajectories);
    return run;
}

EnsembleResult run_ensemble(const SystemParams& params, const NoiseDrive& drive,
                            const SimConfig& cfg, unsigned n_threads) {
    return run_ensemble_full(params, drive, cfg, false, n_threads).result;
}

} // namespace noisecool
