#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisecool/analytics.hpp"
#include "noisecool/dynamics.hpp"
#include "noisecool/harness.hpp"
#include "noisecool/io.hpp"
#include "noisecool/noisegen.hpp"
#include "noisecool/params.hpp"
#include "noisecool/spectra.hpp"

namespace nc = noisecool;

namespace {

constexpr double two_pi = 2.0 * M_PI;

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw std::invalid_argument("grid requires 0 < min < max and points >= 2");
    std::vector<double> g(points);
    double step = (std::log(hi) - std::log(lo)) / (points - 1);
    for (int i = 0; i < points; ++i) g[i] = std::exp(std::log(lo) + step * i);
    g.back() = hi;
    return g;
}

void write_or_print(const nlohmann::json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + out);
        os << j.dump(2) << '\n';
    }
}

int report_row_errors(const std::vector<nc::SweepRow>& rows) {
    int failures = 0;
    for (const auto& r : rows)
        if (!r.error.empty()) {
            std::cerr << "row (flux=" << r.flux << ", sigma_hz=" << r.sigma / two_pi
                      << ") failed: " << r.error << '\n';
            ++failures;
        }
    return failures;
}

std::optional<std::vector<std::pair<double, double>>>
load_bath_heating(const std::string& path) {
    if (path.empty()) return std::nullopt;
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    is >> j;
    std::vector<std::pair<double, double>> knots;
    for (const auto& pair : j)
        knots.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return knots;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisecool - band-limited-noise sideband cooling simulator"};
    app.require_subcommand(1);

    std::string params_path, cfg_path, out_path, format_name = "csv";
    std::uint64_t seed = 1;
    unsigned n_threads = 0;
    double flux = 0.0, sigma_hz = 0.0, center_hz = 0.0;

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "closed-form prediction for a drive");
    predict_cmd->add_option("--params", params_path, "system parameter JSON")->required();
    predict_cmd->add_option("--flux", flux, "photon flux F0, photons/s")->required();
    predict_cmd->add_option("--sigma", sigma_hz, "noise bandwidth, Hz")->required();
    predict_cmd->add_option("--center-detuning", center_hz, "box-center offset, Hz");
    predict_cmd->add_option("--out", out_path, "output JSON path (default stdout)");
    predict_cmd->callback([&] {
        // CLI convention: parameter files describe the bare experiment, so the
        // probe backaction is folded in here (no-op at C_d = 0).
        nc::SystemParams params =
            nc::renormalize_for_probe(nc::io::load_system_params(params_path));
        nc::NoiseDrive drive{flux, two_pi * sigma_hz, two_pi * center_hz, seed};
        write_or_print(nc::io::prediction_to_json(nc::predict(params, drive)), out_path);
    });

    // gen-noise
    double duration = 0.0, dt = 0.0;
    auto* gen_cmd = app.add_subcommand("gen-noise", "synthesize box-spectrum noise");
    gen_cmd->add_option("--flux", flux)->required();
    gen_cmd->add_option("--sigma", sigma_hz, "Hz")->required();
    gen_cmd->add_option("--center-detuning", center_hz, "Hz");
    gen_cmd->add_option("--duration", duration, "s")->required();
    gen_cmd->add_option("--dt", dt, "s")->required();
    gen_cmd->add_option("--seed", seed);
    gen_cmd->add_option("--out", out_path, "envelope binary path")->required();
    gen_cmd->callback([&] {
        nc::NoiseDrive drive{flux, two_pi * sigma_hz, two_pi * center_hz, seed};
        nc::io::write_envelope(nc::synth_box_noise(drive, duration, dt), out_path);
    });

    // psd-check
    std::string env_path, window_name = "hann";
    std::size_t segment_length = 4096;
    double overlap = 0.5;
    auto* psd_cmd = app.add_subcommand("psd-check", "Welch PSD of an envelope file");
    psd_cmd->add_option("envelope", env_path, "env.bin from gen-noise")->required();
    psd_cmd->add_option("--segment", segment_length, "segment length, samples");
    psd_cmd->add_option("--overlap", overlap, "overlap fraction [0,1)");
    psd_cmd->add_option("--window", window_name)->check(CLI::IsMember({"hann", "rectangular"}));
    psd_cmd->add_option("--out", out_path, "CSV path (default stdout)");
    psd_cmd->callback([&] {
        nc::ComplexEnvelope env = nc::io::read_envelope(env_path);
        auto win = window_name == "hann" ? nc::Window::hann : nc::Window::rectangular;
        segment_length = std::min(segment_length, env.samples.size());
        nc::SpectrumEstimate est = nc::psd_welch(env, segment_length, overlap, win);
        std::ofstream file;
        std::ostream* os = &std::cout;
        if (!out_path.empty()) {
            file.open(out_path, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open " + out_path);
            os = &file;
        }
        *os << "freq_hz,psd\n";
        for (std::size_t i = 0; i < est.freqs.size(); ++i)
            *os << nc::io::format_double(est.freqs[i] / two_pi) << ','
                << nc::io::format_double(est.psd[i]) << '\n';
    });

    // simulate
    int ensemble = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "integrate the Langevin dynamics");
    sim_cmd->add_option("--params", params_path)->required();
    sim_cmd->add_option("--flux", flux)->required();
    sim_cmd->add_option("--sigma", sigma_hz, "Hz")->required();
    sim_cmd->add_option("--center-detuning", center_hz, "Hz");
    sim_cmd->add_option("--cfg", cfg_path, "SimConfig JSON")->required();
    sim_cmd->add_option("--seed", seed);
    sim_cmd->add_option("--ensemble", ensemble, "run K trajectories, emit EnsembleResult JSON");
    sim_cmd->add_option("--threads", n_threads);
    sim_cmd->add_option("--out", out_path)->required();
    sim_cmd->callback([&] {
        nc::SystemParams params =
            nc::renormalize_for_probe(nc::io::load_system_params(params_path));
        nc::SimConfig cfg = nc::io::load_sim_config(cfg_path);
        nc::NoiseDrive drive{flux, two_pi * sigma_hz, two_pi * center_hz, seed};
        if (ensemble > 0) {
            cfg.n_traj = ensemble;
            nc::EnsembleResult r = nc::run_ensemble(params, drive, cfg, n_threads);
            write_or_print(nc::io::ensemble_result_to_json(r), out_path);
        } else {
            nc::io::write_trajectory_csv(nc::run_trajectory(params, drive, cfg, seed), out_path);
        }
    });

    // sweep-power
    double grid_min = 0.0, grid_max = 0.0;
    int grid_points = 8;
    bool no_sim = false;
    std::string bath_path;
    auto* power_cmd = app.add_subcommand("sweep-power", "flux sweep at fixed bandwidth");
    power_cmd->add_option("--params", params_path)->required();
    power_cmd->add_option("--cfg", cfg_path);
    power_cmd->add_option("--sigma", sigma_hz, "Hz")->required();
    power_cmd->add_option("--flux-min", grid_min)->required();
    power_cmd->add_option("--flux-max", grid_max)->required();
    power_cmd->add_option("--points", grid_points);
    power_cmd->add_option("--seed", seed);
    power_cmd->add_option("--threads", n_threads);
    power_cmd->add_flag("--no-sim", no_sim, "analytic columns only");
    power_cmd->add_option("--bath-heating", bath_path, "JSON [[flux, n_th], ...]");
    power_cmd->add_option("--format", format_name)
        ->check(CLI::IsMember({"csv", "json", "svg-plot"}));
    power_cmd->add_option("--out", out_path)->required();

    // sweep-bandwidth
    auto* bw_cmd = app.add_subcommand("sweep-bandwidth", "bandwidth sweep at fixed flux");
    bw_cmd->add_option("--params", params_path)->required();
    bw_cmd->add_option("--cfg", cfg_path);
    bw_cmd->add_option("--flux", flux)->required();
    bw_cmd->add_option("--sigma-min", grid_min, "Hz")->required();
    bw_cmd->add_option("--sigma-max", grid_max, "Hz")->required();
    bw_cmd->add_option("--points", grid_points);
    bw_cmd->add_option("--seed", seed);
    bw_cmd->add_option("--threads", n_threads);
    bw_cmd->add_flag("--no-sim", no_sim);
    bw_cmd->add_option("--format", format_name)
        ->check(CLI::IsMember({"csv", "json", "svg-plot"}));
    bw_cmd->add_option("--out", out_path)->required();

    // fit-spectrum
    std::string spec_path;
    auto* fit_cmd = app.add_subcommand("fit-spectrum", "Lorentzian fit of a spectrum CSV");
    fit_cmd->add_option("spectrum", spec_path, "CSV (freq_hz, psd_per_hz)")->required();
    fit_cmd->add_option("--out", out_path, "output JSON path (default stdout)");
    fit_cmd->callback([&] {
        nc::SpectrumEstimate spec = nc::io::read_spectrum_csv(spec_path);
        write_or_print(nc::io::line_fit_to_json(nc::fit_lorentzian(spec)), out_path);
    });

    try {
        CLI11_PARSE(app, argc, argv);
        int failures = 0;
        if (power_cmd->parsed() || bw_cmd->parsed()) {
            nc::SystemParams params =
                nc::renormalize_for_probe(nc::io::load_system_params(params_path));
            nc::SimConfig cfg;
            if (!cfg_path.empty()) cfg = nc::io::load_sim_config(cfg_path);
            nc::SweepOptions options;
            options.with_simulation = !no_sim;
            options.n_threads = n_threads;
            options.master_seed = seed;
            if (options.with_simulation && cfg_path.empty())
                throw std::invalid_argument("--cfg is required unless --no-sim is given");
            auto format = nc::parse_emit_format(format_name);
            if (!format) throw std::invalid_argument("unknown format " + format_name);

            if (power_cmd->parsed()) {
                options.bath_heating = load_bath_heating(bath_path);
                auto grid = log_grid(grid_min, grid_max, grid_points);
                auto rows = nc::sweep_power(params, two_pi * sigma_hz, grid, cfg, options);
                nc::emit(rows, *format, out_path);
                failures = report_row_errors(rows);
            } else {
                auto grid = log_grid(two_pi * grid_min, two_pi * grid_max, grid_points);
                auto result = nc::sweep_bandwidth(params, flux, grid, cfg, options);
                nc::emit(result.rows, *format, out_path);
                std::cout << "sigma at min n_m_pred: "
                          << result.sigma_at_min_n_m_pred / two_pi << " Hz\n";
                if (std::isfinite(result.sigma_at_min_n_m_sim))
                    std::cout << "sigma at min n_m_sim: "
                              << result.sigma_at_min_n_m_sim / two_pi << " Hz\n";
                failures = report_row_errors(result.rows);
            }
        }
        return failures == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
