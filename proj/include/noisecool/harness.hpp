#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noisecool/analytics.hpp"
#include "noisecool/params.hpp"

namespace noisecool {

struct SweepRow {
    double flux = 0.0;       ///< photons/s
    double n_bar0 = 0.0;
    double sigma = 0.0;      ///< rad/s
    double n_th_effective = 0.0;
    double gamma_eff_pred = 0.0; ///< rad/s
    double gamma_eff_sim = 0.0;  ///< rad/s (nan when simulation skipped)
    double n_m_pred_qn = 0.0;
    double n_m_pred_adiabatic = 0.0;
    double n_m_sim = 0.0;
    double n_m_stderr = 0.0;
    CoolingRegime regime = CoolingRegime::quantum_noise;
    std::uint64_t seed = 0;
    std::string gamma_eff_source;      ///< "fit", "fwhm", or "" (analytic only)
    bool linewidth_methods_diverge = false; ///< fit and numeric FWHM differ >10%
    std::string error;                 ///< per-row failure, empty when ok
};

struct SweepOptions {
    bool with_simulation = true;
    unsigned n_threads = 0;
    std::uint64_t master_seed = 1;
    /// Optional phenomenological bath heating: (flux, n_th) knots,
    /// interpolated linearly in log(flux).
    std::optional<std::vector<std::pair<double, double>>> bath_heating;
};

/// One row per flux at fixed bandwidth. Rows are computed independently with
/// per-row seeds derive(master_seed, index); failures are recorded in-row.
std::vector<SweepRow> sweep_power(const SystemParams& params, double sigma,
                                  std::span<const double> flux_grid, const SimConfig& cfg,
                                  const SweepOptions& options = {});

struct BandwidthSweepResult {
    std::vector<SweepRow> rows;
    double sigma_at_min_n_m_pred = 0.0;
    double sigma_at_min_n_m_sim = 0.0; ///< nan when simulation skipped
};

/// One row per bandwidth at fixed flux, plus the locations of minimal
/// predicted and simulated occupancy.
BandwidthSweepResult sweep_bandwidth(const SystemParams& params, double flux,
                                     std::span<const double> sigma_grid,
                                     const SimConfig& cfg,
                                     const SweepOptions& options = {});

enum class EmitFormat { csv, json, svg_plot };

std::optional<EmitFormat> parse_emit_format(const std::string& name);

/// csv/json are lossless (full double precision); svg_plot renders log-log
/// occupancy and linewidth panels with the predicted curves overlaid.
/// Throws std::invalid_argument on an empty table (EMPTY_TABLE) and
/// std::runtime_error with path context on I/O failure.
void emit(std::span<const SweepRow> rows, EmitFormat format,
          const std::filesystem::path& path);

std::vector<SweepRow> parse_rows_csv(const std::filesystem::path& path);

} // namespace noisecool
