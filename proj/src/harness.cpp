#include "noisecool/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "noisecool/dynamics.hpp"
#include "noisecool/io.hpp"
#include "noisecool/rng.hpp"
#include "noisecool/spectra.hpp"

namespace noisecool {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

double interpolate_bath(const std::vector<std::pair<double, double>>& knots, double flux) {
    if (knots.empty()) return nan_value;
    if (flux <= knots.front().first) return knots.front().second;
    if (flux >= knots.back().first) return knots.back().second;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (flux <= knots[i].first) {
            double x0 = std::log(knots[i - 1].first), x1 = std::log(knots[i].first);
            double t = (std::log(flux) - x0) / (x1 - x0);
            return knots[i - 1].second + t * (knots[i].second - knots[i - 1].second);
        }
    }
    return knots.back().second;
}

struct RowExtras {
    double fwhm_fit = nan_value;
    double fwhm_num = nan_value;
    double residual_norm = nan_value;
    bool simulated = false;
};

void simulate_row(const SystemParams& params, const NoiseDrive& drive, const SimConfig& cfg,
                  unsigned n_threads, SweepRow& row, RowExtras& extras) {
    EnsembleRun run = run_ensemble_full(params, drive, cfg, true, n_threads);
    row.n_m_sim = run.result.n_m_mean;
    row.n_m_stderr = run.result.n_m_stderr;
    extras.simulated = true;

    SpectrumEstimate spec = mechanical_spectrum(run.trajectories);
    LineFit fit = fit_lorentzian(spec);
    if (fit.converged) {
        extras.fwhm_fit = fit.fwhm;
        extras.residual_norm = fit.residual_norm;
    }
    try {
        extras.fwhm_num = fwhm_numeric(spec);
    } catch (const SpectrumError&) {
        // leave nan; the fit value (if any) will be used
    }
}

/// Applies the linewidth extraction rule across the finished sweep: use the
/// Lorentzian fit unless its residual exceeds twice the sweep median.
void finalize_linewidths(std::vector<SweepRow>& rows, std::vector<RowExtras>& extras) {
    std::vector<double> residuals;
    for (const auto& e : extras)
        if (e.simulated && std::isfinite(e.residual_norm)) residuals.push_back(e.residual_norm);
    double median_residual = nan_value;
    if (!residuals.empty()) {
        std::nth_element(residuals.begin(), residuals.begin() + residuals.size() / 2,
                         residuals.end());
        median_residual = residuals[residuals.size() / 2];
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        auto& e = extras[i];
        if (!e.simulated) continue;
        bool have_fit = std::isfinite(e.fwhm_fit);
        bool have_num = std::isfinite(e.fwhm_num);
        bool fit_poor = have_fit && std::isfinite(median_residual) &&
                        e.residual_norm > 2.0 * median_residual;
        if (have_fit && !fit_poor) {
            row.gamma_eff_sim = e.fwhm_fit;
            row.gamma_eff_source = "fit";
        } else if (have_num) {
            row.gamma_eff_sim = e.fwhm_num;
            row.gamma_eff_source = "fwhm";
        } else if (have_fit) {
            row.gamma_eff_sim = e.fwhm_fit;
            row.gamma_eff_source = "fit";
        } else if (row.error.empty()) {
            row.error = "LINEWIDTH_UNRESOLVED";
        }
        if (have_fit && have_num && std::abs(e.fwhm_fit - e.fwhm_num) > 0.1 * e.fwhm_num)
            row.linewidth_methods_diverge = true;
    }
}

SweepRow make_row(const SystemParams& base, double flux, double sigma,
                  const SimConfig& cfg, const SweepOptions& options, std::uint64_t row_seed,
                  RowExtras& extras) {
    SweepRow row;
    row.flux = flux;
    row.sigma = sigma;
    row.seed = row_seed;
    row.gamma_eff_sim = nan_value;
    row.n_m_sim = nan_value;
    row.n_m_stderr = nan_value;

    SystemParams params = base;
    row.n_th_effective = base.n_th;
    if (options.bath_heating) {
        row.n_th_effective = interpolate_bath(*options.bath_heating, flux);
        params.n_th = row.n_th_effective;
    }

    NoiseDrive drive;
    drive.flux = flux;
    drive.sigma = sigma;
    drive.seed = row_seed;
    try {
        Prediction p = predict(params, drive);
        row.n_bar0 = p.n_bar0;
        row.regime = p.regime;
        row.n_m_pred_qn = p.n_m_quantum_noise;
        row.n_m_pred_adiabatic = p.n_m_adiabatic;
        row.gamma_eff_pred = p.gamma_eff;
        if (options.with_simulation)
            simulate_row(params, drive, cfg, options.n_threads, row, extras);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

void require_grid(std::span<const double> grid, const char* name) {
    if (grid.empty())
        throw std::invalid_argument(std::string(name) + ": grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument(std::string(name) + ": grid must be ascending");
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

const char* csv_header =
    "flux,n_bar0,sigma,n_th_effective,gamma_eff_pred,gamma_eff_sim,n_m_pred_qn,"
    "n_m_pred_adiabatic,n_m_sim,n_m_stderr,regime,seed,gamma_eff_source,"
    "linewidth_methods_diverge,error";

void write_csv(std::span<const SweepRow> rows, std::ostream& os) {
    os << csv_header << '\n';
    for (const auto& r : rows) {
        os << io::format_double(r.flux) << ',' << io::format_double(r.n_bar0) << ','
           << io::format_double(r.sigma) << ',' << io::format_double(r.n_th_effective) << ','
           << io::format_double(r.gamma_eff_pred) << ',' << io::format_double(r.gamma_eff_sim)
           << ',' << io::format_double(r.n_m_pred_qn) << ','
           << io::format_double(r.n_m_pred_adiabatic) << ',' << io::format_double(r.n_m_sim)
           << ',' << io::format_double(r.n_m_stderr) << ',' << to_string(r.regime) << ','
           << r.seed << ',' << r.gamma_eff_source << ','
           << (r.linewidth_methods_diverge ? 1 : 0) << ',' << csv_escape(r.error) << '\n';
    }
}

nlohmann::json row_to_json(const SweepRow& r) {
    nlohmann::json j;
    j["flux"] = r.flux;
    j["n_bar0"] = r.n_bar0;
    j["sigma_hz"] = r.sigma / (2.0 * M_PI);
    j["n_th_effective"] = r.n_th_effective;
    j["gamma_eff_pred_hz"] = r.gamma_eff_pred / (2.0 * M_PI);
    j["gamma_eff_sim_hz"] = r.gamma_eff_sim / (2.0 * M_PI);
    j["n_m_pred_qn"] = r.n_m_pred_qn;
    j["n_m_pred_adiabatic"] = r.n_m_pred_adiabatic;
    j["n_m_sim"] = r.n_m_sim;
    j["n_m_stderr"] = r.n_m_stderr;
    j["regime"] = to_string(r.regime);
    j["seed"] = r.seed;
    j["gamma_eff_source"] = r.gamma_eff_source;
    j["linewidth_methods_diverge"] = r.linewidth_methods_diverge;
    j["error"] = r.error;
    return j;
}

struct AxisMap {
    double lo, hi;
    double px0, px1;
    double at(double v) const {
        double t = (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        return px0 + t * (px1 - px0);
    }
};

void svg_series_line(std::ostream& os, const char* id, const char* color,
                     const std::vector<std::pair<double, double>>& pts, const AxisMap& x,
                     const AxisMap& y) {
    os << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [px, py] : pts) os << x.at(px) << ',' << y.at(py) << ' ';
    os << "\"/>\n";
}

void write_svg(std::span<const SweepRow> rows, std::ostream& os) {
    bool sigma_varies = false;
    for (const auto& r : rows)
        if (r.sigma != rows.front().sigma) sigma_varies = true;
    auto x_of = [&](const SweepRow& r) { return sigma_varies ? r.sigma / (2.0 * M_PI) : r.flux; };

    auto collect = [&](auto getter) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows) {
            double xv = x_of(r), yv = getter(r);
            if (xv > 0.0 && yv > 0.0 && std::isfinite(yv)) pts.emplace_back(xv, yv);
        }
        return pts;
    };
    auto occ_qn = collect([](const SweepRow& r) { return r.n_m_pred_qn; });
    auto occ_ad = collect([](const SweepRow& r) { return r.n_m_pred_adiabatic; });
    auto occ_sim = collect([](const SweepRow& r) { return r.n_m_sim; });
    auto lw_pred = collect([](const SweepRow& r) { return r.gamma_eff_pred / (2.0 * M_PI); });
    auto lw_sim = collect([](const SweepRow& r) { return r.gamma_eff_sim / (2.0 * M_PI); });

    auto bounds = [](std::initializer_list<const std::vector<std::pair<double, double>>*> series,
                     bool x_axis) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto* s : series)
            for (const auto& [x, y] : *s) {
                double v = x_axis ? x : y;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        if (!(lo < hi)) { lo = 0.1; hi = 1.0; }
        return std::pair{lo / 1.3, hi * 1.3};
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"420\" "
          "viewBox=\"0 0 900 420\">\n"
       << "<style>text{font-family:sans-serif;font-size:12px}</style>\n";

    auto panel = [&](double px0, const char* title, const char* ylabel) {
        os << "<rect x=\"" << px0 << "\" y=\"40\" width=\"360\" height=\"320\" fill=\"none\" "
              "stroke=\"#333\"/>\n"
           << "<text x=\"" << px0 + 120 << "\" y=\"28\">" << title << "</text>\n"
           << "<text x=\"" << px0 - 34 << "\" y=\"200\" transform=\"rotate(-90 " << px0 - 34
           << " 200)\">" << ylabel << "</text>\n"
           << "<text x=\"" << px0 + 130 << "\" y=\"390\">"
           << (sigma_varies ? "sigma (Hz)" : "flux (photons/s)") << "</text>\n";
    };
    panel(60, "phonon occupancy", "n_m");
    panel(500, "effective linewidth", "gamma_eff (Hz)");

    {
        auto [xlo, xhi] = bounds({&occ_qn, &occ_ad, &occ_sim}, true);
        auto [ylo, yhi] = bounds({&occ_qn, &occ_ad, &occ_sim}, false);
        AxisMap xm{xlo, xhi, 60, 420}, ym{ylo, yhi, 360, 40};
        svg_series_line(os, "series-n-m-pred-qn", "#1f77b4", occ_qn, xm, ym);
        svg_series_line(os, "series-n-m-pred-adiabatic", "#ff7f0e", occ_ad, xm, ym);
        os << "<g id=\"series-n-m-sim\">\n";
        for (const auto& r : rows) {
            double xv = x_of(r);
            if (!(xv > 0.0) || !(r.n_m_sim > 0.0) || !std::isfinite(r.n_m_sim)) continue;
            double cx = xm.at(xv), cy = ym.at(r.n_m_sim);
            double lo = std::max(r.n_m_sim - r.n_m_stderr, ym.lo);
            double hi = r.n_m_sim + r.n_m_stderr;
            os << "<line class=\"errorbar\" x1=\"" << cx << "\" y1=\"" << ym.at(lo)
               << "\" x2=\"" << cx << "\" y2=\"" << ym.at(hi) << "\" stroke=\"#2ca02c\"/>\n";
            os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"3\" fill=\"#2ca02c\"/>\n";
        }
        os << "</g>\n";
    }
    {
        auto [xlo, xhi] = bounds({&lw_pred, &lw_sim}, true);
        auto [ylo, yhi] = bounds({&lw_pred, &lw_sim}, false);
        AxisMap xm{xlo, xhi, 500, 860}, ym{ylo, yhi, 360, 40};
        svg_series_line(os, "series-gamma-eff-pred", "#1f77b4", lw_pred, xm, ym);
        os << "<g id=\"series-gamma-eff-sim\">\n";
        for (const auto& [px, py] : lw_sim)
            os << "<circle cx=\"" << xm.at(px) << "\" cy=\"" << ym.at(py)
               << "\" r=\"3\" fill=\"#2ca02c\"/>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
}

} // namespace

std::optional<EmitFormat> parse_emit_format(const std::string& name) {
    if (name == "csv") return EmitFormat::csv;
    if (name == "json") return EmitFormat::json;
    if (name == "svg-plot" || name == "svg") return EmitFormat::svg_plot;
    return std::nullopt;
}

std::vector<SweepRow> sweep_power(const SystemParams& params, double sigma,
                                  std::span<const double> flux_grid, const SimConfig& cfg,
                                  const SweepOptions& options) {
    require_grid(flux_grid, "sweep_power");
    std::vector<SweepRow> rows;
    std::vector<RowExtras> extras(flux_grid.size());
    rows.reserve(flux_grid.size());
    for (std::size_t i = 0; i < flux_grid.size(); ++i)
        rows.push_back(make_row(params, flux_grid[i], sigma, cfg, options,
                                rng::derive(options.master_seed, i), extras[i]));
    finalize_linewidths(rows, extras);
    return rows;
}

BandwidthSweepResult sweep_bandwidth(const SystemParams& params, double flux,
                                     std::span<const double> sigma_grid,
                                     const SimConfig& cfg, const SweepOptions& options) {
    require_grid(sigma_grid, "sweep_bandwidth");
    BandwidthSweepResult result;
    std::vector<RowExtras> extras(sigma_grid.size());
    result.rows.reserve(sigma_grid.size());
    double best_pred = std::numeric_limits<double>::infinity();
    double best_sim = std::numeric_limits<double>::infinity();
    result.sigma_at_min_n_m_pred = nan_value;
    result.sigma_at_min_n_m_sim = nan_value;
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
        SweepRow row = make_row(params, flux, sigma_grid[i], cfg, options,
                                rng::derive(options.master_seed, i), extras[i]);
        if (row.error.empty()) {
            double pred = row.regime == CoolingRegime::adiabatic ? row.n_m_pred_adiabatic
                                                                 : row.n_m_pred_qn;
            if (pred < best_pred) {
                best_pred = pred;
                result.sigma_at_min_n_m_pred = row.sigma;
            }
            if (std::isfinite(row.n_m_sim) && row.n_m_sim < best_sim) {
                best_sim = row.n_m_sim;
                result.sigma_at_min_n_m_sim = row.sigma;
            }
        }
        result.rows.push_back(std::move(row));
    }
    finalize_linewidths(result.rows, extras);
    return result;
}

void emit(std::span<const SweepRow> rows, EmitFormat format,
          const std::filesystem::path& path) {
    if (rows.empty())
        throw std::invalid_argument("emit: EMPTY_TABLE");
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("emit: cannot open " + path.string());
    switch (format) {
    case EmitFormat::csv:
        write_csv(rows, os);
        break;
    case EmitFormat::json: {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) j.push_back(row_to_json(r));
        os << j.dump(2) << '\n';
        break;
    }
    case EmitFormat::svg_plot:
        write_svg(rows, os);
        break;
    }
    if (!os.good())
        throw std::runtime_error("emit: write failure on " + path.string());
}

std::vector<SweepRow> parse_rows_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("parse_rows_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != csv_header)
        throw std::runtime_error("parse_rows_csv: unexpected header in " + path.string());

    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        if (fields.size() != 15)
            throw std::runtime_error("parse_rows_csv: malformed row in " + path.string());
        SweepRow r;
        r.flux = std::stod(fields[0]);
        r.n_bar0 = std::stod(fields[1]);
        r.sigma = std::stod(fields[2]);
        r.n_th_effective = std::stod(fields[3]);
        r.gamma_eff_pred = std::stod(fields[4]);
        r.gamma_eff_sim = std::stod(fields[5]);
        r.n_m_pred_qn = std::stod(fields[6]);
        r.n_m_pred_adiabatic = std::stod(fields[7]);
        r.n_m_sim = std::stod(fields[8]);
        r.n_m_stderr = std::stod(fields[9]);
        if (fields[10] == "QUANTUM_NOISE") r.regime = CoolingRegime::quantum_noise;
        else if (fields[10] == "CROSSOVER") r.regime = CoolingRegime::crossover;
        else if (fields[10] == "ADIABATIC") r.regime = CoolingRegime::adiabatic;
        else throw std::runtime_error("parse_rows_csv: unknown regime " + fields[10]);
        r.seed = std::stoull(fields[11]);
        r.gamma_eff_source = fields[12];
        r.linewidth_methods_diverge = fields[13] == "1";
        r.error = fields[14];
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace noisecool
