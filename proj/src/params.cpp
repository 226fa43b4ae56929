#include "noisecool/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace noisecool {

const char* to_string(ViolationCode code) {
    switch (code) {
    case ViolationCode::rate_nonpositive: return "RATE_NONPOSITIVE";
    case ViolationCode::kappa_ext_fraction_range: return "KAPPA_EXT_FRACTION_RANGE";
    case ViolationCode::occupancy_negative: return "OCCUPANCY_NEGATIVE";
    case ViolationCode::cooperativity_negative: return "COOPERATIVITY_NEGATIVE";
    case ViolationCode::resolved_sideband_violated: return "RESOLVED_SIDEBAND_VIOLATED";
    case ViolationCode::flux_negative: return "FLUX_NEGATIVE";
    case ViolationCode::sigma_nonpositive: return "SIGMA_NONPOSITIVE";
    case ViolationCode::blue_sideband_leak: return "BLUE_SIDEBAND_LEAK";
    case ViolationCode::dt_nonpositive: return "DT_NONPOSITIVE";
    case ViolationCode::dt_stability_gate: return "DT_STABILITY_GATE";
    case ViolationCode::burn_not_below_total: return "BURN_NOT_BELOW_TOTAL";
    case ViolationCode::n_traj_below_one: return "N_TRAJ_BELOW_ONE";
    case ViolationCode::stride_below_one: return "STRIDE_BELOW_ONE";
    }
    return "UNKNOWN";
}

double thermal_occupancy(double temperature_kelvin, double omega_m) {
    if (!(temperature_kelvin > 0.0))
        throw std::invalid_argument("thermal_occupancy: temperature must be > 0 K");
    if (!(omega_m > 0.0))
        throw std::invalid_argument("thermal_occupancy: omega_m must be > 0");
    double x = constants::hbar * omega_m / (constants::k_boltzmann * temperature_kelvin);
    return 1.0 / std::expm1(x);
}

SystemParams renormalize_for_probe(const SystemParams& params) {
    SystemParams out = params;
    double scale = 1.0 + params.probe_cooperativity;
    out.gamma = params.gamma * scale;
    out.n_th = params.n_th / scale;
    out.probe_cooperativity = 0.0; // prevents double application
    return out;
}

namespace {

void add(std::vector<Violation>& v, ViolationCode code, const std::string& field,
         const std::string& message) {
    v.push_back({code, field, message});
}

void check_rate(std::vector<Violation>& v, double value, const std::string& field) {
    if (!(value > 0.0) || !std::isfinite(value))
        add(v, ViolationCode::rate_nonpositive, field, field + " must be strictly positive");
}

} // namespace

std::vector<Violation> validate(const SystemParams& p) {
    std::vector<Violation> v;
    check_rate(v, p.omega_m, "omega_m");
    check_rate(v, p.gamma, "gamma");
    check_rate(v, p.kappa, "kappa");
    if (p.g0 < 0.0 || !std::isfinite(p.g0))
        add(v, ViolationCode::rate_nonpositive, "g0", "g0 must be >= 0");
    if (!(p.kappa_ext_fraction > 0.0) || p.kappa_ext_fraction > 1.0)
        add(v, ViolationCode::kappa_ext_fraction_range, "kappa_ext_fraction",
            "kappa_ext_fraction must lie in (0, 1]");
    if (p.n_th < 0.0)
        add(v, ViolationCode::occupancy_negative, "n_th", "n_th must be >= 0");
    if (p.n_ba < 0.0)
        add(v, ViolationCode::occupancy_negative, "n_ba", "n_ba must be >= 0");
    if (p.probe_cooperativity < 0.0)
        add(v, ViolationCode::cooperativity_negative, "probe_cooperativity",
            "probe_cooperativity must be >= 0");
    if (p.omega_m > 0.0 && p.kappa > 0.0 && !(p.omega_m / p.kappa > 1.0))
        add(v, ViolationCode::resolved_sideband_violated, "omega_m",
            "resolved-sideband model requires omega_m / kappa > 1");
    return v;
}

std::vector<Violation> validate(const SystemParams& p, const NoiseDrive& d) {
    std::vector<Violation> v = validate(p);
    if (d.flux < 0.0)
        add(v, ViolationCode::flux_negative, "flux", "flux must be >= 0");
    if (!(d.sigma > 0.0))
        add(v, ViolationCode::sigma_nonpositive, "sigma", "sigma must be > 0");
    else if (std::abs(d.center_detuning) + d.sigma / 2.0 >= p.omega_m) {
        std::ostringstream os;
        os << "box must sit fully below the cavity line: |center_detuning| + sigma/2 = "
           << std::abs(d.center_detuning) + d.sigma / 2.0 << " >= omega_m = " << p.omega_m;
        add(v, ViolationCode::blue_sideband_leak, "sigma", os.str());
    }
    return v;
}

std::vector<Violation> validate(const SystemParams& p, const NoiseDrive& d,
                                const SimConfig& c) {
    std::vector<Violation> v = validate(p, d);
    if (!(c.dt > 0.0))
        add(v, ViolationCode::dt_nonpositive, "dt", "dt must be > 0");
    else if (c.dt * p.kappa > 0.1)
        add(v, ViolationCode::dt_stability_gate, "dt", "dt * kappa must be <= 0.1");
    if (!(c.t_burn < c.t_total))
        add(v, ViolationCode::burn_not_below_total, "t_burn", "t_burn must be < t_total");
    if (c.n_traj < 1)
        add(v, ViolationCode::n_traj_below_one, "n_traj", "n_traj must be >= 1");
    if (c.sample_stride < 1)
        add(v, ViolationCode::stride_below_one, "sample_stride", "sample_stride must be >= 1");
    return v;
}

} // namespace noisecool
