// Acceptance suite: runs the ten release criteria and prints one PASS/FAIL
// line each. Exit code is the number of failed criteria. `--criterion N`
// selects a single one (used by ctest).

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "noisecool/analytics.hpp"
#include "noisecool/dynamics.hpp"
#include "noisecool/harness.hpp"
#include "noisecool/io.hpp"
#include "noisecool/noisegen.hpp"
#include "noisecool/params.hpp"
#include "noisecool/spectra.hpp"

using namespace noisecool;

namespace {

constexpr double two_pi = 2.0 * M_PI;

struct Check {
    std::string label;
    double value;
    double bound;
    bool pass; // |value| <= bound unless set explicitly
};

struct CriterionResult {
    bool pass = true;
    std::vector<Check> checks;

    void require(const std::string& label, double value, double bound) {
        bool ok = std::isfinite(value) && std::abs(value) <= bound;
        checks.push_back({label, value, bound, ok});
        pass = pass && ok;
    }
    void require_true(const std::string& label, bool ok, double value = 0.0) {
        checks.push_back({label, value, 0.0, ok});
        pass = pass && ok;
    }
};

SystemParams desk_params() {
    return io::load_system_params(NOISECOOL_CONFIG_DIR "/desk_params.json");
}

SystemParams paper_params() {
    return io::load_system_params(NOISECOOL_CONFIG_DIR "/paper_params.json");
}

double flux_for_photons(const SystemParams& p, double n_bar0) {
    return n_bar0 * (p.omega_m * p.omega_m + 0.25 * p.kappa * p.kappa) / p.kappa_ext();
}

double flux_for_gamma_opt(const SystemParams& p, double sigma, double target) {
    return target / gamma_opt_box(1.0, sigma, p);
}

double spectrum_area_stderr(const SpectrumEstimate& spec) {
    double bin = spec.freqs[1] - spec.freqs[0];
    double var = 0.0;
    for (double v : spec.psd) var += v * v;
    return std::sqrt(var / std::max(1, spec.n_segments)) * bin / two_pi;
}

/// Spectrum-integrated occupancy must agree with the time-domain estimator
/// within three combined standard errors (module invariant, checked on every
/// simulated acceptance run).
void check_parseval(CriterionResult& r, const EnsembleRun& run,
                    const SpectrumEstimate& spec, const LineFit& fit) {
    double occ_spec = occupancy_from_spectrum(spec, fit);
    double combined = 3.0 * std::sqrt(run.result.n_m_stderr * run.result.n_m_stderr +
                                      spectrum_area_stderr(spec) * spectrum_area_stderr(spec));
    // allow a small normalization margin on top of the purely statistical part
    double bound = combined + 0.05 * std::abs(run.result.n_m_mean);
    r.require("parseval: spectrum-vs-time occupancy gap", occ_spec - run.result.n_m_mean,
              bound);
}

double fitted_linewidth(const SpectrumEstimate& spec) {
    LineFit fit = fit_lorentzian(spec);
    if (fit.converged) return fit.fwhm;
    return fwhm_numeric(spec);
}

// ---------------------------------------------------------------------------

CriterionResult criterion1() {
    CriterionResult r;
    SystemParams p = paper_params();
    double narrow = 4.0 * p.g0 * p.g0 / (p.omega_m * p.omega_m) * p.kappa_ext_fraction;
    auto factor = [&](double ratio) {
        return gamma_opt_box(1.0, ratio * p.kappa, p) / narrow;
    };
    r.require("(k/s)atan(s/k) at s/k=1e-3, deviation from 1", factor(1e-3) - 1.0, 1e-6);
    r.require("(k/s)atan(s/k) at s/k=1, deviation from pi/4", factor(1.0) - M_PI / 4.0,
              1e-12);
    r.require("(k/s)atan(s/k) at s/k=1e3, rel. deviation from pi k/(2s)",
              factor(1e3) / (M_PI / 2e3) - 1.0, 1e-3);
    return r;
}

CriterionResult criterion2() {
    CriterionResult r;
    SystemParams p = paper_params();
    double flux = flux_for_photons(p, 1.53e6);
    NoiseDrive drive{flux, two_pi * 2e5, 0.0, 1};

    double via_box = gamma_opt_box(flux, drive.sigma, p);
    double via_psd = gamma_opt_from_psd(cavity_filtered_box_psd(drive, p), p);
    r.require("gamma_opt (box formula) vs 8.7 kHz, rel.", via_box / (two_pi * 8700.0) - 1.0,
              0.05);
    r.require("gamma_opt (PSD quadrature) vs 8.7 kHz, rel.",
              via_psd / (two_pi * 8700.0) - 1.0, 0.05);
    r.require("two-route agreement, rel.", via_psd / via_box - 1.0, 0.01);

    SystemParams heated = p;
    heated.n_th = 60.0;
    heated = renormalize_for_probe(heated);
    double n_m = phonon_number(via_box, heated);
    r.require_true("n_m in [0.70, 0.90] (measured 0.77 +- 0.08)",
                   n_m >= 0.70 && n_m <= 0.90, n_m);
    return r;
}

CriterionResult criterion3() {
    CriterionResult r;
    SystemParams p = desk_params();
    p.g0 = 0.0;
    NoiseDrive d{0.0, 0.2 * p.kappa, 0.0, 2026};
    SimConfig cfg{1.5e-7, 0.16, 0.02, 112, 1000};
    EnsembleResult res = run_ensemble(p, d, cfg);
    r.require("thermal equilibrium: n_m/n_th - 1", res.n_m_mean / p.n_th - 1.0, 0.05);
    r.require_true("ensemble size >= 100", res.n_traj >= 100, res.n_traj);
    return r;
}

CriterionResult criterion4() {
    CriterionResult r;
    SystemParams p = desk_params();
    double gamma_opt = 50.0 * p.gamma; // cooperativity 50
    double n_bar0 = gamma_opt * p.kappa / (4.0 * p.g0 * p.g0);
    double dt = 5e-8; // well below the stability gate to suppress stepping bias
    ComplexEnvelope env = constant_envelope(flux_for_photons(p, n_bar0), 0.15, dt);
    SimConfig cfg{dt, 0.15, 0.01, 32, 96}; // wide window keeps line tails out of the baseline
    EnsembleRun run = run_ensemble_full(p, env, cfg, 404040, true);

    CoherentCooling ref = coherent_cooling(p.g0 * std::sqrt(n_bar0), p);
    r.require("coherent n_m vs gamma n_th/(gamma+Gamma_opt), rel.",
              run.result.n_m_mean / ref.n_m - 1.0, 0.05);
    // informational: the exact stationary occupancy of the integrated
    // equations carries the damping saturation Gamma_opt/(1+Gamma_opt/kappa)
    double raw = 4.0 * p.g0 * p.g0 * n_bar0 / (p.kappa + p.gamma);
    double exact = p.gamma * p.n_th / (p.gamma + raw * p.kappa / (p.kappa + raw));
    r.require("coherent n_m vs exact two-mode steady state, rel.",
              run.result.n_m_mean / exact - 1.0, 0.05);

    SpectrumEstimate spec = mechanical_spectrum(run.trajectories, 512);
    LineFit fit = fit_lorentzian(spec);
    r.require_true("lorentzian fit converged", fit.converged);
    r.require("fitted FWHM vs gamma+Gamma_opt, rel.",
              fit.fwhm / (p.gamma + ref.gamma_opt) - 1.0, 0.10);
    check_parseval(r, run, spec, fit);
    return r;
}

CriterionResult criterion5() {
    CriterionResult r;
    SystemParams p = desk_params();
    double sigma = 0.2 * p.kappa;
    double gamma_opt = 50.0 * p.gamma;
    NoiseDrive d{flux_for_gamma_opt(p, sigma, gamma_opt), sigma, 0.0, 505050};
    SimConfig cfg{1.5e-7, 0.12, 0.015, 48, 96};
    EnsembleRun run = run_ensemble_full(p, d, cfg, true);

    double expected_n = phonon_number(gamma_opt_box(d.flux, d.sigma, p), p);
    r.require("n_m vs fast-noise occupancy formula, rel. (sigma/gamma_opt = 4)",
              run.result.n_m_mean / expected_n - 1.0, 0.10);

    SpectrumEstimate spec = mechanical_spectrum(run.trajectories, 512);
    LineFit fit = fit_lorentzian(spec);
    double measured_width = fit.converged ? fit.fwhm : fwhm_numeric(spec);
    r.require("gamma_eff vs gamma + box damping, rel.",
              measured_width / (p.gamma + gamma_opt_box(d.flux, d.sigma, p)) - 1.0, 0.10);
    check_parseval(r, run, spec, fit);
    return r;
}

CriterionResult criterion6() {
    CriterionResult r;
    SystemParams p = desk_params();
    double flux = flux_for_gamma_opt(p, 0.2 * p.kappa, 8.0 * p.gamma);
    struct Plan {
        double sigma, dt, t_total;
        int n_traj, stride;
        std::size_t segment;
    };
    // the widest band has the narrowest line and the largest fit variance,
    // so it gets the longest averaging
    std::vector<Plan> plan = {{0.2 * p.kappa, 1.5e-7, 0.4, 16, 256, 2048},
                              {2.0 * p.kappa, 1.5e-7, 0.4, 16, 256, 2048},
                              {10.0 * p.kappa, 5e-8, 0.6, 24, 384, 4096}};
    std::vector<double> widths, predictions;
    for (const auto& row : plan) {
        NoiseDrive d{flux, row.sigma, 0.0, 606060};
        SimConfig cfg{row.dt, row.t_total, 0.03, row.n_traj, row.stride};
        EnsembleRun run = run_ensemble_full(p, d, cfg, true);
        SpectrumEstimate spec = mechanical_spectrum(run.trajectories, row.segment);
        widths.push_back(fitted_linewidth(spec));
        predictions.push_back(p.gamma + gamma_opt_box(flux, row.sigma, p));
    }
    for (std::size_t i = 1; i < widths.size(); ++i) {
        std::ostringstream label;
        label << "gamma_eff ratio sigma[0]/sigma[" << i << "] vs arctan factor, rel.";
        double sim_ratio = widths[0] / widths[i];
        double pred_ratio = predictions[0] / predictions[i];
        r.require(label.str(), sim_ratio / pred_ratio - 1.0, 0.10);
    }
    return r;
}

CriterionResult criterion7() {
    CriterionResult r;
    SystemParams p = desk_params();
    double gamma_opt = 50.0 * p.gamma;
    NoiseDrive d{flux_for_gamma_opt(p, p.gamma, gamma_opt), p.gamma, 0.0, 707070};
    // stride 96 keeps the Nyquist span ~350 gamma so the mixture's 1/w wings
    // stay inside the measured window instead of folding into the baseline
    SimConfig cfg{1.5e-7, 0.24, 0.03, 128, 96};
    EnsembleRun run = run_ensemble_full(p, d, cfg, true);

    AdiabaticOccupancy oracle = adiabatic_occupancy(gamma_opt, p);
    double qn = phonon_number(gamma_opt_box(d.flux, d.sigma, p), p);
    r.require("adiabatic n_m vs exponential-mixture quadrature, rel.",
              run.result.n_m_mean / oracle.exact - 1.0, 0.15);
    r.require_true("Jensen gap: n_m >= 2x fast-noise occupancy",
                   run.result.n_m_mean >= 2.0 * qn, run.result.n_m_mean / qn);

    SpectrumEstimate spec = mechanical_spectrum(run.trajectories, 4096);
    double fwhm_oracle = adiabatic_linewidth(gamma_opt, p).fwhm_numeric;
    double measured = fwhm_numeric(spec);
    r.require("measured FWHM vs mixture-lineshape oracle, rel.",
              measured / fwhm_oracle - 1.0, 0.25);
    // the mixture has no flat floor (its 1/w wings carry the occupancy), so
    // the calibration cross-check integrates against a zero baseline
    LineFit no_floor;
    no_floor.baseline = 0.0;
    check_parseval(r, run, spec, no_floor);
    return r;
}

CriterionResult criterion8() {
    CriterionResult r;
    SystemParams p = desk_params();
    auto ratio_gap = [&](double cooperativity) {
        AdiabaticOccupancy a = adiabatic_occupancy(cooperativity * p.gamma, p);
        return a.asymptote / a.exact - 1.0;
    };
    r.require("asymptote vs quadrature at gamma_opt/gamma = 1e3, rel.", ratio_gap(1e3),
              0.01);
    r.require("asymptote vs quadrature at gamma_opt/gamma = 1e5, rel.", ratio_gap(1e5),
              1e-3);
    AdiabaticLinewidth lw = adiabatic_linewidth(1e4 * p.gamma, p);
    r.require("gamma ln(gamma_opt/gamma) vs numeric mixture FWHM at 1e4, rel.",
              lw.asymptote / lw.fwhm_numeric - 1.0, 0.25);
    return r;
}

CriterionResult criterion9() {
    CriterionResult r;
    NoiseDrive d{2.5e5, two_pi * 2e5, 0.0, 909090};
    double dt = 4e-7;
    ComplexEnvelope env = synth_box_noise(d, 2.5, dt);

    double ms = 0.0;
    for (const auto& v : env.samples) ms += std::norm(v);
    ms /= static_cast<double>(env.samples.size());
    r.require("mean flux, rel.", ms / d.flux - 1.0, 0.03);

    SpectrumEstimate est = psd_welch(env, 2048, 0.5, Window::hann);
    double plateau = two_pi * d.flux / d.sigma;
    double half = d.sigma / 2.0;
    std::vector<double> sub(8, 0.0);
    std::vector<int> cnt(8, 0);
    double out_of_band = 0.0;
    for (std::size_t i = 0; i < est.freqs.size(); ++i) {
        double f = est.freqs[i];
        if (std::abs(f) > 0.6 * d.sigma) out_of_band = std::max(out_of_band, est.psd[i]);
        if (f >= -0.8 * half && f < 0.8 * half) {
            int k = std::min(7, static_cast<int>((f + 0.8 * half) / (1.6 * half / 8.0)));
            sub[static_cast<std::size_t>(k)] += est.psd[i];
            ++cnt[static_cast<std::size_t>(k)];
        }
    }
    double center = 0.0;
    for (int k = 0; k < 8; ++k) {
        sub[static_cast<std::size_t>(k)] /= cnt[static_cast<std::size_t>(k)];
        center += sub[static_cast<std::size_t>(k)] / 8.0;
    }
    double worst_flat = 0.0;
    for (double s : sub) worst_flat = std::max(worst_flat, std::abs(s / center - 1.0));
    r.require("in-band plateau vs 2pi F0/sigma, rel.", center / plateau - 1.0, 0.03);
    r.require("central-80% flatness (worst sub-band), rel.", worst_flat, 0.01);
    r.require_true("out-of-band rejection >= 60 dB",
                   out_of_band < 1e-6 * plateau,
                   out_of_band > 0.0 ? 10.0 * std::log10(plateau / out_of_band) : 300.0);

    std::vector<double> re(env.samples.size()), im(env.samples.size());
    for (std::size_t i = 0; i < env.samples.size(); ++i) {
        re[i] = env.samples[i].real();
        im[i] = env.samples[i].imag();
    }
    auto kurt = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double m2 = 0.0, m4 = 0.0;
        for (double x : v) {
            double dd = x - mean;
            m2 += dd * dd;
            m4 += dd * dd * dd * dd;
        }
        m2 /= static_cast<double>(v.size());
        m4 /= static_cast<double>(v.size());
        return m4 / (m2 * m2) - 3.0;
    };
    r.require_true("sample count >= 1e6", env.samples.size() >= 1000000,
                   static_cast<double>(env.samples.size()));
    r.require("excess kurtosis (real quadrature)", kurt(re), 0.1);
    r.require("excess kurtosis (imag quadrature)", kurt(im), 0.1);
    return r;
}

CriterionResult criterion10() {
    CriterionResult r;
    SystemParams p = desk_params();
    std::vector<double> grid = {flux_for_photons(p, 500.0), flux_for_photons(p, 2000.0)};
    SimConfig cfg{1.5e-7, 0.03, 0.006, 6, 400};
    SweepOptions options;
    options.master_seed = 101010;

    auto emit_to_string = [&](EmitFormat fmt) {
        auto rows = sweep_power(p, 0.2 * p.kappa, grid, cfg, options);
        std::filesystem::path tmp =
            std::filesystem::temp_directory_path() /
            ("noisecool_acceptance_" + std::to_string(static_cast<int>(fmt)) + ".out");
        emit(rows, fmt, tmp);
        std::ifstream is(tmp, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        std::filesystem::remove(tmp);
        return os.str();
    };
    std::string csv_a = emit_to_string(EmitFormat::csv);
    options.n_threads = 2;
    std::string csv_b = emit_to_string(EmitFormat::csv);
    r.require_true("power sweep rerun is bit-identical (csv, any thread count)",
                   csv_a == csv_b);

    auto bw = [&] {
        std::vector<double> sigmas = {0.1 * p.kappa, 0.5 * p.kappa};
        return sweep_bandwidth(p, grid[1], sigmas, cfg, options);
    };
    auto ra = bw(), rb = bw();
    bool same = ra.rows.size() == rb.rows.size() &&
                ra.sigma_at_min_n_m_pred == rb.sigma_at_min_n_m_pred &&
                ra.sigma_at_min_n_m_sim == rb.sigma_at_min_n_m_sim;
    for (std::size_t i = 0; same && i < ra.rows.size(); ++i)
        same = ra.rows[i].n_m_sim == rb.rows[i].n_m_sim &&
               ra.rows[i].gamma_eff_sim == rb.rows[i].gamma_eff_sim &&
               ra.rows[i].n_m_stderr == rb.rows[i].n_m_stderr;
    r.require_true("bandwidth sweep rerun is bit-identical", same);
    return r;
}

const char* criterion_names[] = {
    "band-factor limits",
    "canonical operating point (gamma_opt, n_m)",
    "thermal equilibrium oracle",
    "coherent-drive equivalence",
    "quantum-noise regime (sigma = 0.2 kappa, gamma_opt/gamma = 50)",
    "large-bandwidth suppression tracks arctan",
    "adiabatic regime (sigma = gamma)",
    "adiabatic asymptote vs quadrature and mixture FWHM",
    "noise synthesis quality",
    "sweep determinism",
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
            only = std::atoi(argv[i + 1]);
    }
    std::vector<std::function<CriterionResult()>> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9, criterion10};

    int failures = 0;
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
        if (only != 0 && i != only) continue;
        CriterionResult result;
        bool threw = false;
        std::string what;
        try {
            result = criteria[static_cast<std::size_t>(i - 1)]();
        } catch (const std::exception& e) {
            threw = true;
            what = e.what();
        }
        bool pass = !threw && result.pass;
        std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << i << ": "
                  << criterion_names[i - 1] << '\n';
        if (threw) {
            std::cout << "       exception: " << what << '\n';
        } else {
            for (const auto& c : result.checks)
                std::cout << "       " << (c.pass ? "ok   " : "FAIL ") << c.label << " = "
                          << c.value << (c.bound > 0.0 ? " (|.| <= " + std::to_string(c.bound) + ")" : "")
                          << '\n';
        }
        if (!pass) ++failures;
    }
    return failures;
}
