#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "noisecool/analytics.hpp"
#include "noisecool/dynamics.hpp"
#include "noisecool/noisegen.hpp"
#include "noisecool/params.hpp"
#include "noisecool/spectra.hpp"

// JSON/CSV/binary boundaries. Frequencies are Hz in files and converted to
// angular units here; temperature is mK; flux stays photons/s.

namespace noisecool::io {

SystemParams system_params_from_json(const nlohmann::json& j);
nlohmann::json system_params_to_json(const SystemParams& params);
SystemParams load_system_params(const std::filesystem::path& path);

SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json sim_config_to_json(const SimConfig& cfg);
SimConfig load_sim_config(const std::filesystem::path& path);

nlohmann::json prediction_to_json(const Prediction& p);
nlohmann::json ensemble_result_to_json(const EnsembleResult& r);
nlohmann::json line_fit_to_json(const LineFit& f);

/// env.bin: 32-byte header (8-byte magic "NCENV01\0", f64 dt, f64 flux,
/// u64 count), then count little-endian interleaved f64 (re, im) pairs.
void write_envelope(const ComplexEnvelope& env, const std::filesystem::path& path);
ComplexEnvelope read_envelope(const std::filesystem::path& path);

/// Spectrum CSV: header "freq_hz,psd_per_hz" (psd values are per-2pi density,
/// numerically identical per Hz). The reader also accepts "freq_hz,psd".
void write_spectrum_csv(const SpectrumEstimate& spec, const std::filesystem::path& path);
SpectrumEstimate read_spectrum_csv(const std::filesystem::path& path);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

std::string format_double(double v); ///< shortest round-trip representation

} // namespace noisecool::io
