#include "noisecool/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace noisecool::io {

namespace {

constexpr double two_pi = 2.0 * M_PI;
constexpr char envelope_magic[8] = {'N', 'C', 'E', 'N', 'V', '0', '1', '\0'};

double require_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key))
        throw std::invalid_argument(std::string("missing key: ") + key);
    return j.at(key).get<double>();
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SystemParams system_params_from_json(const nlohmann::json& j) {
    SystemParams p;
    p.omega_m = two_pi * require_number(j, "omega_m_hz");
    p.gamma = two_pi * require_number(j, "gamma_hz");
    p.kappa = two_pi * require_number(j, "kappa_hz");
    p.g0 = two_pi * require_number(j, "g0_hz");
    p.kappa_ext_fraction = j.value("kappa_ext_fraction", 1.0);
    p.n_ba = j.value("n_ba", 0.0);
    p.probe_cooperativity = j.value("probe_cooperativity", 0.0);

    bool has_nth = j.contains("n_th");
    bool has_temp = j.contains("temperature_mk");
    if (has_nth && has_temp)
        throw std::invalid_argument("specify either n_th or temperature_mk, not both");
    if (has_nth)
        p.n_th = j.at("n_th").get<double>();
    else if (has_temp)
        p.n_th = thermal_occupancy(j.at("temperature_mk").get<double>() * 1e-3, p.omega_m);
    else
        throw std::invalid_argument("missing key: n_th (or temperature_mk)");
    return p;
}

nlohmann::json system_params_to_json(const SystemParams& p) {
    nlohmann::json j;
    j["omega_m_hz"] = p.omega_m / two_pi;
    j["gamma_hz"] = p.gamma / two_pi;
    j["kappa_hz"] = p.kappa / two_pi;
    j["kappa_ext_fraction"] = p.kappa_ext_fraction;
    j["g0_hz"] = p.g0 / two_pi;
    j["n_th"] = p.n_th;
    j["n_ba"] = p.n_ba;
    j["probe_cooperativity"] = p.probe_cooperativity;
    return j;
}

SystemParams load_system_params(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open parameter file " + path.string());
    nlohmann::json j;
    is >> j;
    return system_params_from_json(j);
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
    SimConfig c;
    c.dt = require_number(j, "dt_s");
    c.t_total = require_number(j, "t_total_s");
    c.t_burn = j.value("t_burn_s", 0.0);
    c.n_traj = j.value("n_traj", 1);
    c.sample_stride = j.value("sample_stride", 1);
    c.noise_repeat_blocks = j.value("noise_repeat_blocks", 1);
    return c;
}

nlohmann::json sim_config_to_json(const SimConfig& c) {
    nlohmann::json j;
    j["dt_s"] = c.dt;
    j["t_total_s"] = c.t_total;
    j["t_burn_s"] = c.t_burn;
    j["n_traj"] = c.n_traj;
    j["sample_stride"] = c.sample_stride;
    j["noise_repeat_blocks"] = c.noise_repeat_blocks;
    return j;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config file " + path.string());
    nlohmann::json j;
    is >> j;
    return sim_config_from_json(j);
}

nlohmann::json prediction_to_json(const Prediction& p) {
    nlohmann::json j;
    j["n_bar0"] = p.n_bar0;
    j["gamma_opt_hz"] = p.gamma_opt / two_pi;
    j["gamma_eff_hz"] = p.gamma_eff / two_pi;
    j["n_m"] = p.n_m;
    j["regime"] = to_string(p.regime);
    j["n_m_quantum_noise"] = p.n_m_quantum_noise;
    j["n_m_adiabatic"] = p.n_m_adiabatic;
    j["gamma_eff_quantum_noise_hz"] = p.gamma_eff_quantum_noise / two_pi;
    j["gamma_eff_adiabatic_hz"] = p.gamma_eff_adiabatic / two_pi;
    return j;
}

nlohmann::json ensemble_result_to_json(const EnsembleResult& r) {
    nlohmann::json j;
    j["n_m_mean"] = r.n_m_mean;
    j["n_m_stderr"] = r.n_m_stderr;
    j["gamma_opt_empirical_hz"] = r.gamma_opt_empirical / two_pi;
    j["mean_photons"] = r.mean_photons;
    j["n_traj"] = r.n_traj;
    return j;
}

nlohmann::json line_fit_to_json(const LineFit& f) {
    nlohmann::json j;
    j["center_hz"] = f.center / two_pi;
    j["fwhm_hz"] = f.fwhm / two_pi;
    j["area"] = f.area;
    j["baseline"] = f.baseline;
    j["residual_norm"] = f.residual_norm;
    j["converged"] = f.converged;
    return j;
}

void write_envelope(const ComplexEnvelope& env, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string());
    os.write(envelope_magic, 8);
    std::uint64_t count = env.samples.size();
    os.write(reinterpret_cast<const char*>(&env.dt), 8);
    os.write(reinterpret_cast<const char*>(&env.flux_nominal), 8);
    os.write(reinterpret_cast<const char*>(&count), 8);
    os.write(reinterpret_cast<const char*>(env.samples.data()),
             static_cast<std::streamsize>(count * sizeof(std::complex<double>)));
    if (!os.good())
        throw std::runtime_error("write failure on " + path.string());
}

ComplexEnvelope read_envelope(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is.good() || std::memcmp(magic, envelope_magic, 8) != 0)
        throw std::runtime_error("not an envelope file: " + path.string());
    ComplexEnvelope env;
    std::uint64_t count = 0;
    is.read(reinterpret_cast<char*>(&env.dt), 8);
    is.read(reinterpret_cast<char*>(&env.flux_nominal), 8);
    is.read(reinterpret_cast<char*>(&count), 8);
    env.samples.resize(count);
    is.read(reinterpret_cast<char*>(env.samples.data()),
            static_cast<std::streamsize>(count * sizeof(std::complex<double>)));
    if (!is.good())
        throw std::runtime_error("truncated envelope file: " + path.string());
    return env;
}

void write_spectrum_csv(const SpectrumEstimate& spec, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string());
    os << "freq_hz,psd_per_hz\n";
    for (std::size_t i = 0; i < spec.freqs.size(); ++i)
        os << format_double(spec.freqs[i] / two_pi) << ',' << format_double(spec.psd[i]) << '\n';
    if (!os.good())
        throw std::runtime_error("write failure on " + path.string());
}

SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    std::string line;
    SpectrumEstimate spec;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("freq_hz,", 0) == 0) continue; // header
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed spectrum CSV: " + path.string());
        spec.freqs.push_back(two_pi * std::stod(line.substr(0, comma)));
        spec.psd.push_back(std::stod(line.substr(comma + 1)));
    }
    if (spec.freqs.size() < 2)
        throw std::runtime_error("spectrum CSV has fewer than 2 rows: " + path.string());
    spec.n_segments = 1;
    spec.resolution_bandwidth = spec.freqs[1] - spec.freqs[0];
    return spec;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string());
    os << "t_s,re_alpha,im_alpha,re_d,im_d,re_b,im_b,occupancy\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        os << format_double(traj.times[i]) << ',' << format_double(s.alpha.real()) << ','
           << format_double(s.alpha.imag()) << ',' << format_double(s.d.real()) << ','
           << format_double(s.d.imag()) << ',' << format_double(s.b.real()) << ','
           << format_double(s.b.imag()) << ',' << format_double(traj.occupancy_series[i])
           << '\n';
    }
    if (!os.good())
        throw std::runtime_error("write failure on " + path.string());
}

} // namespace noisecool::io
