#pragma once

#include <functional>

#include "noisecool/params.hpp"

namespace noisecool {

enum class CoolingRegime { quantum_noise, crossover, adiabatic };

const char* to_string(CoolingRegime regime);

/// One-sided photon-number-fluctuation spectral density S(omega), photons^2 s,
/// with omega relative to the cavity resonance. Normalized so that
/// integral S(w) dw/2pi over the band equals the mean-square fluctuation.
using PsdFunction = std::function<double(double)>;

/// Closed-form prediction for a given drive. In the crossover regime both
/// bracketing estimates are reported; n_m/gamma_eff then carry the
/// quantum-noise values.
struct Prediction {
    double n_bar0 = 0.0;    ///< time-averaged intracavity photons
    double gamma_opt = 0.0; ///< noise-induced damping, rad/s
    double gamma_eff = 0.0; ///< total effective linewidth, rad/s
    double n_m = 0.0;       ///< predicted phonon occupancy
    CoolingRegime regime = CoolingRegime::quantum_noise;
    double n_m_quantum_noise = 0.0;
    double n_m_adiabatic = 0.0;
    double gamma_eff_quantum_noise = 0.0;
    double gamma_eff_adiabatic = 0.0;
};

/// Steady intracavity photons for flux F0 driven at the red sideband:
/// n0 = kappa_ext F0 / (omega_m^2 + kappa^2/4).
double intracavity_photons(double flux, const SystemParams& params);

/// Box-noise induced damping
/// (4 g0^2 F0 / omega_m^2) (kappa/sigma) arctan(sigma/kappa),
/// scaled by kappa_ext_fraction. Throws on sigma <= 0.
double gamma_opt_box(double flux, double sigma, const SystemParams& params);

/// Quantum-noise-approach damping g0^2 [S(omega_m) - S(-omega_m)].
/// May be negative (anti-damping).
double gamma_opt_from_psd(const PsdFunction& psd, const SystemParams& params);

/// Photon-number-fluctuation PSD of the box drive after cavity filtering,
/// evaluated by adaptive quadrature over the band:
/// S(w) = int_band [k_ext S_in(d) / (d^2 + k^2/4)] k / ((d+w)^2 + k^2/4) dd/2pi.
PsdFunction cavity_filtered_box_psd(const NoiseDrive& drive, const SystemParams& params);

/// Steady occupancy (gamma n_th + gamma_opt n_ba) / (gamma + gamma_opt).
double phonon_number(double gamma_opt, const SystemParams& params);

struct AdiabaticOccupancy {
    double exact = 0.0;      ///< exponential-mixture quadrature
    double asymptote = 0.0;  ///< (gamma n_th/gamma_opt)[ln(gamma_opt/gamma) - C]
    bool asymptote_valid = true; ///< false when gamma_opt <= gamma
};

/// Occupancy when the damping adiabatically follows the noise envelope.
/// The instantaneous damping is exponentially distributed with mean gamma_opt
/// (the cavity envelope is complex Gaussian), so
/// exact = int_0^inf e^-x gamma n_th / (gamma + gamma_opt x) dx.
AdiabaticOccupancy adiabatic_occupancy(double gamma_opt, const SystemParams& params);

struct AdiabaticLinewidth {
    double fwhm_numeric = 0.0; ///< FWHM of the mixture lineshape
    double asymptote = 0.0;    ///< gamma ln(gamma_opt/gamma)
    double equivalent_width = 0.0; ///< 4 (integral S dw/2pi) / S(0)
    bool asymptote_valid = true;
};

/// Linewidth measures of the time-averaged adiabatic mixture
/// S(w) ~ int e^-x [n(x)(gamma+gamma_opt x)] / (w^2 + ((gamma+gamma_opt x)/2)^2) dx.
/// The literal FWHM saturates near 2.33 gamma at large gamma_opt/gamma while
/// the area/peak equivalent width tracks gamma ln(gamma_opt/gamma); both are
/// returned. Requires gamma_opt > gamma for a valid asymptote.
AdiabaticLinewidth adiabatic_linewidth(double gamma_opt, const SystemParams& params);

struct CoherentCooling {
    double gamma_opt = 0.0; ///< 4 G^2 / kappa
    double n_m = 0.0;
};

/// Coherent-drive sideband-cooling reference with effective coupling G.
CoherentCooling coherent_cooling(double effective_coupling, const SystemParams& params);

/// Regime thresholds: adiabatic when sigma < gamma_opt/10, quantum-noise when
/// sigma > 10 gamma_opt, crossover otherwise.
Prediction predict(const SystemParams& params, const NoiseDrive& drive);

} // namespace noisecool
