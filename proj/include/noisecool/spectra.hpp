#pragma once

#include <optional>
#include <span>
#include <stdexcept>

#include "noisecool/dynamics.hpp"
#include "noisecool/noisegen.hpp"

namespace noisecool {

/// Fitted line parameters. area is the baseline-subtracted integral
/// S dw/2pi, i.e. occupancy + 1/2 for a mechanical spectrum.
struct LineFit {
    double center = 0.0;   ///< rad/s
    double fwhm = 0.0;     ///< rad/s
    double area = 0.0;
    double baseline = 0.0;
    double residual_norm = 0.0; ///< RMS residual / fitted peak height
    bool converged = false;
};

class SpectrumError : public std::runtime_error {
  public:
    enum class Code { under_resolved, ambiguous_peak, normalization_fault };

    SpectrumError(Code code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    Code code() const { return code_; }

  private:
    Code code_;
};

/// Ensemble-and-segment averaged PSD of b(t) over the stored (post-burn)
/// samples. Normalized so integral S dw/2pi = <|b|^2> = n_m + 1/2.
/// segment_length 0 picks min(4096, n/4). Throws std::invalid_argument when
/// segments would be degenerate.
SpectrumEstimate mechanical_spectrum(std::span<const Trajectory> trajectories,
                                     std::size_t segment_length = 0,
                                     Window window = Window::hann);

/// Least-squares baseline + Lorentzian via Levenberg-Marquardt, initialized
/// from moments when no init is given. Never throws; non-convergence (or the
/// absence of a significant peak) is reported through converged = false.
LineFit fit_lorentzian(const SpectrumEstimate& spec,
                       const std::optional<LineFit>& init = std::nullopt);

/// Half-max crossing separation after median-baseline subtraction, linear
/// interpolation between grid points. Throws SpectrumError with
/// under_resolved (peak narrower than 3 bins) or ambiguous_peak (a second
/// well-separated peak crosses half max).
double fwhm_numeric(const SpectrumEstimate& spec);

/// Baseline-subtracted integrated area minus the zero-point 1/2. Throws
/// SpectrumError::normalization_fault when the result is negative beyond
/// 3 sigma of the estimate's statistical error.
double occupancy_from_spectrum(const SpectrumEstimate& spec, const LineFit& fit);

} // namespace noisecool
