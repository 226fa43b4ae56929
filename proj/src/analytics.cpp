#include "noisecool/analytics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "noisecool/quadrature.hpp"

namespace noisecool {

namespace {

constexpr double euler_gamma = 0.57721566490153286060651209;

void require_valid(const std::vector<Violation>& v, const char* where) {
    if (v.empty()) return;
    std::ostringstream os;
    os << where << ": invalid inputs:";
    for (const auto& violation : v) os << ' ' << to_string(violation.code);
    throw std::invalid_argument(os.str());
}

/// Mixture lineshape S(w) = int_0^inf e^-x gamma n_th / (w^2 + (gamma+gamma_opt x)^2/4) dx.
/// For gamma_opt >~ gamma the x ~ gamma/gamma_opt scale near the origin is
/// resolved through y = ln(gamma + gamma_opt x); below that the integrand is
/// smooth in x and the substitution would only lose precision.
double mixture_lineshape(double w, double gamma, double gamma_opt, double gamma_n_th) {
    if (gamma_opt < 0.1 * gamma) {
        auto integrand = [&](double x) {
            double width = gamma + gamma_opt * x;
            return std::exp(-x) / (w * w + 0.25 * width * width);
        };
        return gamma_n_th * quadrature::integrate(integrand, 0.0, 45.0, 1e-10);
    }
    double y_lo = std::log(gamma);
    double y_hi = std::log(gamma + 45.0 * gamma_opt);
    auto integrand = [&](double y) {
        double ey = std::exp(y);
        return std::exp(-(ey - gamma) / gamma_opt) * ey / (w * w + 0.25 * ey * ey);
    };
    return gamma_n_th / gamma_opt * quadrature::integrate(integrand, y_lo, y_hi, 1e-10);
}

} // namespace

const char* to_string(CoolingRegime regime) {
    switch (regime) {
    case CoolingRegime::quantum_noise: return "QUANTUM_NOISE";
    case CoolingRegime::crossover: return "CROSSOVER";
    case CoolingRegime::adiabatic: return "ADIABATIC";
    }
    return "UNKNOWN";
}

double intracavity_photons(double flux, const SystemParams& params) {
    return flux * params.kappa_ext() / (params.omega_m * params.omega_m +
                                        0.25 * params.kappa * params.kappa);
}

double gamma_opt_box(double flux, double sigma, const SystemParams& params) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gamma_opt_box: sigma must be > 0");
    double ratio = sigma / params.kappa;
    double band_factor = std::atan(ratio) / ratio; // (kappa/sigma) arctan(sigma/kappa)
    return 4.0 * params.g0 * params.g0 * flux / (params.omega_m * params.omega_m) *
           band_factor * params.kappa_ext_fraction;
}

double gamma_opt_from_psd(const PsdFunction& psd, const SystemParams& params) {
    return params.g0 * params.g0 * (psd(params.omega_m) - psd(-params.omega_m));
}

PsdFunction cavity_filtered_box_psd(const NoiseDrive& drive, const SystemParams& params) {
    if (!(drive.sigma > 0.0))
        throw std::invalid_argument("cavity_filtered_box_psd: sigma must be > 0");
    double band_center = drive.center_detuning - params.omega_m;
    double lo = band_center - drive.sigma / 2.0;
    double hi = band_center + drive.sigma / 2.0;
    double s_in = 2.0 * M_PI * drive.flux / drive.sigma;
    double kappa = params.kappa;
    double kappa_ext = params.kappa_ext();
    return [=](double w) {
        auto integrand = [=](double d) {
            double field = kappa_ext * s_in / (d * d + 0.25 * kappa * kappa);
            double response = kappa / ((d + w) * (d + w) + 0.25 * kappa * kappa);
            return field * response;
        };
        return quadrature::integrate(integrand, lo, hi, 1e-9) / (2.0 * M_PI);
    };
}

double phonon_number(double gamma_opt, const SystemParams& params) {
    return (params.gamma * params.n_th + gamma_opt * params.n_ba) /
           (params.gamma + gamma_opt);
}

AdiabaticOccupancy adiabatic_occupancy(double gamma_opt, const SystemParams& params) {
    if (!(gamma_opt > 0.0))
        throw std::invalid_argument("adiabatic_occupancy: gamma_opt must be > 0");
    double gamma = params.gamma;
    AdiabaticOccupancy out;
    if (gamma_opt < 0.1 * gamma) {
        auto integrand = [&](double x) {
            return std::exp(-x) / (gamma + gamma_opt * x);
        };
        out.exact = gamma * params.n_th * quadrature::integrate(integrand, 0.0, 45.0, 1e-11);
    } else {
        double y_lo = std::log(gamma);
        double y_hi = std::log(gamma + 45.0 * gamma_opt);
        auto integrand = [&](double y) {
            return std::exp(-(std::exp(y) - gamma) / gamma_opt);
        };
        out.exact = gamma * params.n_th / gamma_opt *
                    quadrature::integrate(integrand, y_lo, y_hi, 1e-11);
    }
    out.asymptote_valid = gamma_opt > gamma;
    out.asymptote = gamma * params.n_th / gamma_opt *
                    (std::log(gamma_opt / gamma) - euler_gamma);
    return out;
}

AdiabaticLinewidth adiabatic_linewidth(double gamma_opt, const SystemParams& params) {
    if (!(gamma_opt > 0.0))
        throw std::invalid_argument("adiabatic_linewidth: gamma_opt must be > 0");
    double gamma = params.gamma;
    double gnth = gamma * params.n_th;
    double peak = mixture_lineshape(0.0, gamma, gamma_opt, gnth);
    auto half_gap = [&](double w) {
        return mixture_lineshape(w, gamma, gamma_opt, gnth) - 0.5 * peak;
    };
    double w_hi = 0.5 * (gamma + 45.0 * gamma_opt);
    double w_half = quadrature::bisect(half_gap, 0.0, w_hi, 1e-9 * gamma);

    AdiabaticLinewidth out;
    out.fwhm_numeric = 2.0 * w_half;
    out.asymptote_valid = gamma_opt > gamma;
    out.asymptote = gamma * std::log(gamma_opt / gamma);
    out.equivalent_width = 4.0 * adiabatic_occupancy(gamma_opt, params).exact / peak;
    return out;
}

CoherentCooling coherent_cooling(double effective_coupling, const SystemParams& params) {
    if (effective_coupling < 0.0)
        throw std::invalid_argument("coherent_cooling: coupling must be >= 0");
    CoherentCooling out;
    out.gamma_opt = 4.0 * effective_coupling * effective_coupling / params.kappa;
    out.n_m = phonon_number(out.gamma_opt, params);
    return out;
}

Prediction predict(const SystemParams& params, const NoiseDrive& drive) {
    require_valid(validate(params, drive), "predict");

    Prediction p;
    p.n_bar0 = intracavity_photons(drive.flux, params);
    p.gamma_opt = gamma_opt_box(drive.flux, drive.sigma, params);

    p.n_m_quantum_noise = phonon_number(p.gamma_opt, params);
    p.gamma_eff_quantum_noise = params.gamma + p.gamma_opt;
    if (p.gamma_opt > 0.0) {
        p.n_m_adiabatic = adiabatic_occupancy(p.gamma_opt, params).exact;
        p.gamma_eff_adiabatic = adiabatic_linewidth(p.gamma_opt, params).fwhm_numeric;
    } else {
        p.n_m_adiabatic = params.n_th;
        p.gamma_eff_adiabatic = params.gamma;
    }

    if (drive.sigma > 10.0 * p.gamma_opt)
        p.regime = CoolingRegime::quantum_noise;
    else if (drive.sigma < p.gamma_opt / 10.0)
        p.regime = CoolingRegime::adiabatic;
    else
        p.regime = CoolingRegime::crossover;

    if (p.regime == CoolingRegime::adiabatic) {
        p.n_m = p.n_m_adiabatic;
        p.gamma_eff = p.gamma_eff_adiabatic;
    } else {
        p.n_m = p.n_m_quantum_noise;
        p.gamma_eff = p.gamma_eff_quantum_noise;
    }
    return p;
}

} // namespace noisecool
