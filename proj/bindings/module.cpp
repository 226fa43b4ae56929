#include <cstring>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "noisecool/analytics.hpp"
#include "noisecool/dynamics.hpp"
#include "noisecool/harness.hpp"
#include "noisecool/io.hpp"
#include "noisecool/noisegen.hpp"
#include "noisecool/params.hpp"
#include "noisecool/spectra.hpp"

namespace py = pybind11;
using namespace noisecool;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out({static_cast<py::ssize_t>(v.size())},
                       {static_cast<py::ssize_t>(sizeof(T))});
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(T));
    return out;
}

py::array_t<std::complex<double>> state_component(const Trajectory& t,
                                                  std::complex<double> StateVector::*member) {
    std::vector<std::complex<double>> v(t.states.size());
    for (std::size_t i = 0; i < t.states.size(); ++i) v[i] = t.states[i].*member;
    return to_array(v);
}

} // namespace

PYBIND11_MODULE(_noisecool, m) {
    m.doc() = "Band-limited-noise sideband cooling: analytics, synthesis, Langevin "
              "simulation, spectral thermometry, sweeps";

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("omega_m", &SystemParams::omega_m)
        .def_readwrite("gamma", &SystemParams::gamma)
        .def_readwrite("kappa", &SystemParams::kappa)
        .def_readwrite("kappa_ext_fraction", &SystemParams::kappa_ext_fraction)
        .def_readwrite("g0", &SystemParams::g0)
        .def_readwrite("n_th", &SystemParams::n_th)
        .def_readwrite("n_ba", &SystemParams::n_ba)
        .def_readwrite("probe_cooperativity", &SystemParams::probe_cooperativity)
        .def("kappa_ext", &SystemParams::kappa_ext);

    py::class_<NoiseDrive>(m, "NoiseDrive")
        .def(py::init<>())
        .def(py::init([](double flux, double sigma, double center_detuning,
                         std::uint64_t seed) {
                 return NoiseDrive{flux, sigma, center_detuning, seed};
             }),
             py::arg("flux"), py::arg("sigma"), py::arg("center_detuning") = 0.0,
             py::arg("seed") = 0)
        .def_readwrite("flux", &NoiseDrive::flux)
        .def_readwrite("sigma", &NoiseDrive::sigma)
        .def_readwrite("center_detuning", &NoiseDrive::center_detuning)
        .def_readwrite("seed", &NoiseDrive::seed);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_total", &SimConfig::t_total)
        .def_readwrite("t_burn", &SimConfig::t_burn)
        .def_readwrite("n_traj", &SimConfig::n_traj)
        .def_readwrite("sample_stride", &SimConfig::sample_stride)
        .def_readwrite("noise_repeat_blocks", &SimConfig::noise_repeat_blocks);

    py::enum_<CoolingRegime>(m, "CoolingRegime")
        .value("QUANTUM_NOISE", CoolingRegime::quantum_noise)
        .value("CROSSOVER", CoolingRegime::crossover)
        .value("ADIABATIC", CoolingRegime::adiabatic);

    py::enum_<Window>(m, "Window")
        .value("RECTANGULAR", Window::rectangular)
        .value("HANN", Window::hann);

    m.def("thermal_occupancy", &thermal_occupancy, py::arg("temperature_kelvin"),
          py::arg("omega_m"));
    m.def("renormalize_for_probe", &renormalize_for_probe);
    m.def("validate", [](const SystemParams& p, const NoiseDrive* d, const SimConfig* c) {
        std::vector<Violation> v;
        if (d && c) v = validate(p, *d, *c);
        else if (d) v = validate(p, *d);
        else v = validate(p);
        py::list out;
        for (const auto& violation : v) {
            py::dict item;
            item["code"] = to_string(violation.code);
            item["field"] = violation.field;
            item["message"] = violation.message;
            out.append(item);
        }
        return out;
    }, py::arg("params"), py::arg("drive") = nullptr, py::arg("cfg") = nullptr);

    // analytics
    py::class_<Prediction>(m, "Prediction")
        .def_readonly("n_bar0", &Prediction::n_bar0)
        .def_readonly("gamma_opt", &Prediction::gamma_opt)
        .def_readonly("gamma_eff", &Prediction::gamma_eff)
        .def_readonly("n_m", &Prediction::n_m)
        .def_readonly("regime", &Prediction::regime)
        .def_readonly("n_m_quantum_noise", &Prediction::n_m_quantum_noise)
        .def_readonly("n_m_adiabatic", &Prediction::n_m_adiabatic)
        .def_readonly("gamma_eff_quantum_noise", &Prediction::gamma_eff_quantum_noise)
        .def_readonly("gamma_eff_adiabatic", &Prediction::gamma_eff_adiabatic);

    py::class_<AdiabaticOccupancy>(m, "AdiabaticOccupancy")
        .def_readonly("exact", &AdiabaticOccupancy::exact)
        .def_readonly("asymptote", &AdiabaticOccupancy::asymptote)
        .def_readonly("asymptote_valid", &AdiabaticOccupancy::asymptote_valid);

    py::class_<AdiabaticLinewidth>(m, "AdiabaticLinewidth")
        .def_readonly("fwhm_numeric", &AdiabaticLinewidth::fwhm_numeric)
        .def_readonly("asymptote", &AdiabaticLinewidth::asymptote)
        .def_readonly("equivalent_width", &AdiabaticLinewidth::equivalent_width)
        .def_readonly("asymptote_valid", &AdiabaticLinewidth::asymptote_valid);

    py::class_<CoherentCooling>(m, "CoherentCooling")
        .def_readonly("gamma_opt", &CoherentCooling::gamma_opt)
        .def_readonly("n_m", &CoherentCooling::n_m);

    m.def("intracavity_photons", &intracavity_photons, py::arg("flux"), py::arg("params"));
    m.def("gamma_opt_box", &gamma_opt_box, py::arg("flux"), py::arg("sigma"),
          py::arg("params"));
    m.def("gamma_opt_from_psd", &gamma_opt_from_psd, py::arg("psd"), py::arg("params"));
    m.def("cavity_filtered_box_psd", &cavity_filtered_box_psd, py::arg("drive"),
          py::arg("params"));
    m.def("phonon_number", &phonon_number, py::arg("gamma_opt"), py::arg("params"));
    m.def("adiabatic_occupancy", &adiabatic_occupancy, py::arg("gamma_opt"),
          py::arg("params"));
    m.def("adiabatic_linewidth", &adiabatic_linewidth, py::arg("gamma_opt"),
          py::arg("params"));
    m.def("coherent_cooling", &coherent_cooling, py::arg("effective_coupling"),
          py::arg("params"));
    m.def("predict", &predict, py::arg("params"), py::arg("drive"));

    // noisegen
    py::class_<ComplexEnvelope>(m, "ComplexEnvelope")
        .def_property_readonly("samples",
                               [](const ComplexEnvelope& e) { return to_array(e.samples); })
        .def_readonly("dt", &ComplexEnvelope::dt)
        .def_readonly("flux_nominal", &ComplexEnvelope::flux_nominal)
        .def_readonly("seed", &ComplexEnvelope::seed)
        .def("duration", &ComplexEnvelope::duration);

    py::class_<SpectrumEstimate>(m, "SpectrumEstimate")
        .def_property_readonly("freqs",
                               [](const SpectrumEstimate& s) { return to_array(s.freqs); })
        .def_property_readonly("psd",
                               [](const SpectrumEstimate& s) { return to_array(s.psd); })
        .def_readonly("n_segments", &SpectrumEstimate::n_segments)
        .def_readonly("resolution_bandwidth", &SpectrumEstimate::resolution_bandwidth);

    py::class_<AutocorrelationTime>(m, "AutocorrelationTime")
        .def_readonly("tau", &AutocorrelationTime::tau)
        .def_readonly("non_decaying", &AutocorrelationTime::non_decaying);

    m.def("synth_box_noise", &synth_box_noise, py::arg("drive"), py::arg("duration"),
          py::arg("dt"), py::call_guard<py::gil_scoped_release>());
    m.def("constant_envelope", &constant_envelope, py::arg("flux"), py::arg("duration"),
          py::arg("dt"));
    m.def("psd_welch",
          py::overload_cast<const ComplexEnvelope&, std::size_t, double, Window>(&psd_welch),
          py::arg("envelope"), py::arg("segment_length"), py::arg("overlap_fraction") = 0.5,
          py::arg("window") = Window::hann, py::call_guard<py::gil_scoped_release>());
    m.def("autocorrelation_time", &autocorrelation_time, py::arg("envelope"));

    // dynamics
    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times",
                               [](const Trajectory& t) { return to_array(t.times); })
        .def_property_readonly("occupancy_series",
                               [](const Trajectory& t) { return to_array(t.occupancy_series); })
        .def_property_readonly("alpha",
                               [](const Trajectory& t) { return state_component(t, &StateVector::alpha); })
        .def_property_readonly("d",
                               [](const Trajectory& t) { return state_component(t, &StateVector::d); })
        .def_property_readonly("b",
                               [](const Trajectory& t) { return state_component(t, &StateVector::b); })
        .def_readonly("dt_sample", &Trajectory::dt_sample);

    py::class_<EnsembleResult>(m, "EnsembleResult")
        .def_readonly("n_m_mean", &EnsembleResult::n_m_mean)
        .def_readonly("n_m_stderr", &EnsembleResult::n_m_stderr)
        .def_readonly("gamma_opt_empirical", &EnsembleResult::gamma_opt_empirical)
        .def_readonly("mean_photons", &EnsembleResult::mean_photons)
        .def_readonly("n_traj", &EnsembleResult::n_traj);

    py::class_<EnsembleRun>(m, "EnsembleRun")
        .def_readonly("result", &EnsembleRun::result)
        .def_readonly("trajectories", &EnsembleRun::trajectories);

    m.def("run_trajectory",
          py::overload_cast<const SystemParams&, const NoiseDrive&, const SimConfig&,
                            std::uint64_t>(&run_trajectory),
          py::arg("params"), py::arg("drive"), py::arg("cfg"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_trajectory",
          py::overload_cast<const SystemParams&, const ComplexEnvelope&, const SimConfig&,
                            std::uint64_t>(&run_trajectory),
          py::arg("params"), py::arg("envelope"), py::arg("cfg"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_ensemble", &run_ensemble, py::arg("params"), py::arg("drive"),
          py::arg("cfg"), py::arg("n_threads") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_ensemble_full",
          py::overload_cast<const SystemParams&, const NoiseDrive&, const SimConfig&, bool,
                            unsigned>(&run_ensemble_full),
          py::arg("params"), py::arg("drive"), py::arg("cfg"),
          py::arg("keep_trajectories") = true, py::arg("n_threads") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("run_ensemble_full",
          py::overload_cast<const SystemParams&, const ComplexEnvelope&, const SimConfig&,
                            std::uint64_t, bool, unsigned>(&run_ensemble_full),
          py::arg("params"), py::arg("envelope"), py::arg("cfg"), py::arg("master_seed"),
          py::arg("keep_trajectories") = true, py::arg("n_threads") = 0,
          py::call_guard<py::gil_scoped_release>());

    // spectra
    py::class_<LineFit>(m, "LineFit")
        .def(py::init<>())
        .def_readwrite("center", &LineFit::center)
        .def_readwrite("fwhm", &LineFit::fwhm)
        .def_readwrite("area", &LineFit::area)
        .def_readwrite("baseline", &LineFit::baseline)
        .def_readwrite("residual_norm", &LineFit::residual_norm)
        .def_readwrite("converged", &LineFit::converged);

    m.def("mechanical_spectrum",
          [](const std::vector<Trajectory>& trajectories, std::size_t segment_length,
             Window window) {
              return mechanical_spectrum(trajectories, segment_length, window);
          },
          py::arg("trajectories"), py::arg("segment_length") = 0,
          py::arg("window") = Window::hann);
    m.def("fit_lorentzian", &fit_lorentzian, py::arg("spectrum"),
          py::arg("init") = std::nullopt);
    m.def("fwhm_numeric", &fwhm_numeric, py::arg("spectrum"));
    m.def("occupancy_from_spectrum", &occupancy_from_spectrum, py::arg("spectrum"),
          py::arg("fit"));

    // harness
    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("flux", &SweepRow::flux)
        .def_readonly("n_bar0", &SweepRow::n_bar0)
        .def_readonly("sigma", &SweepRow::sigma)
        .def_readonly("n_th_effective", &SweepRow::n_th_effective)
        .def_readonly("gamma_eff_pred", &SweepRow::gamma_eff_pred)
        .def_readonly("gamma_eff_sim", &SweepRow::gamma_eff_sim)
        .def_readonly("n_m_pred_qn", &SweepRow::n_m_pred_qn)
        .def_readonly("n_m_pred_adiabatic", &SweepRow::n_m_pred_adiabatic)
        .def_readonly("n_m_sim", &SweepRow::n_m_sim)
        .def_readonly("n_m_stderr", &SweepRow::n_m_stderr)
        .def_readonly("regime", &SweepRow::regime)
        .def_readonly("seed", &SweepRow::seed)
        .def_readonly("gamma_eff_source", &SweepRow::gamma_eff_source)
        .def_readonly("linewidth_methods_diverge", &SweepRow::linewidth_methods_diverge)
        .def_readonly("error", &SweepRow::error);

    py::enum_<EmitFormat>(m, "EmitFormat")
        .value("CSV", EmitFormat::csv)
        .value("JSON", EmitFormat::json)
        .value("SVG_PLOT", EmitFormat::svg_plot);

    auto make_options = [](bool with_simulation, unsigned n_threads,
                           std::uint64_t master_seed,
                           const std::optional<std::vector<std::pair<double, double>>>& bath) {
        SweepOptions o;
        o.with_simulation = with_simulation;
        o.n_threads = n_threads;
        o.master_seed = master_seed;
        o.bath_heating = bath;
        return o;
    };
    m.def("sweep_power",
          [make_options](const SystemParams& params, double sigma,
                         const std::vector<double>& flux_grid, const SimConfig& cfg,
                         bool with_simulation, unsigned n_threads, std::uint64_t master_seed,
                         const std::optional<std::vector<std::pair<double, double>>>& bath) {
              return sweep_power(params, sigma, flux_grid, cfg,
                                 make_options(with_simulation, n_threads, master_seed, bath));
          },
          py::arg("params"), py::arg("sigma"), py::arg("flux_grid"), py::arg("cfg"),
          py::arg("with_simulation") = true, py::arg("n_threads") = 0,
          py::arg("master_seed") = 1, py::arg("bath_heating") = std::nullopt,
          py::call_guard<py::gil_scoped_release>());

    py::class_<BandwidthSweepResult>(m, "BandwidthSweepResult")
        .def_readonly("rows", &BandwidthSweepResult::rows)
        .def_readonly("sigma_at_min_n_m_pred", &BandwidthSweepResult::sigma_at_min_n_m_pred)
        .def_readonly("sigma_at_min_n_m_sim", &BandwidthSweepResult::sigma_at_min_n_m_sim);

    m.def("sweep_bandwidth",
          [make_options](const SystemParams& params, double flux,
                         const std::vector<double>& sigma_grid, const SimConfig& cfg,
                         bool with_simulation, unsigned n_threads, std::uint64_t master_seed) {
              return sweep_bandwidth(params, flux, sigma_grid, cfg,
                                     make_options(with_simulation, n_threads, master_seed,
                                                  std::nullopt));
          },
          py::arg("params"), py::arg("flux"), py::arg("sigma_grid"), py::arg("cfg"),
          py::arg("with_simulation") = true, py::arg("n_threads") = 0,
          py::arg("master_seed") = 1, py::call_guard<py::gil_scoped_release>());

    m.def("emit",
          [](const std::vector<SweepRow>& rows, EmitFormat format,
             const std::filesystem::path& path) { emit(rows, format, path); },
          py::arg("rows"), py::arg("format"), py::arg("path"));

    // io
    m.def("load_system_params", &io::load_system_params, py::arg("path"));
    m.def("load_sim_config", &io::load_sim_config, py::arg("path"));
    m.def("write_envelope", &io::write_envelope, py::arg("envelope"), py::arg("path"));
    m.def("read_envelope", &io::read_envelope, py::arg("path"));
    m.def("write_spectrum_csv", &io::write_spectrum_csv, py::arg("spectrum"),
          py::arg("path"));
    m.def("read_spectrum_csv", &io::read_spectrum_csv, py::arg("path"));

    py::register_exception<SimulationError>(m, "SimulationError");
    py::register_exception<SpectrumError>(m, "SpectrumError");
}
