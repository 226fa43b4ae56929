#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "noisecool/params.hpp"

namespace noisecool {

/// Uniformly sampled complex baseband waveform, units sqrt(photons/s).
struct ComplexEnvelope {
    std::vector<std::complex<double>> samples;
    double dt = 0.0;
    double flux_nominal = 0.0; ///< photons/s
    std::uint64_t seed = 0;

    double duration() const { return dt * static_cast<double>(samples.size()); }
};

/// One-sided PSD over the full frequency axis of the complex envelope.
/// freqs ascending, rad/s; integral psd dw/2pi equals the mean square.
struct SpectrumEstimate {
    std::vector<double> freqs;
    std::vector<double> psd;
    int n_segments = 0;
    double resolution_bandwidth = 0.0; ///< rad/s (equivalent noise bandwidth)
};

enum class Window { rectangular, hann };

/// Frequency-domain synthesis of box-spectrum noise: every run-length DFT bin
/// inside [center - sigma/2, center + sigma/2] receives an independent
/// circular complex Gaussian amplitude with one-sided PSD 2 pi F0 / sigma;
/// all other bins are zero. Deterministic given drive.seed.
///
/// Preconditions (throws std::invalid_argument naming the failed bound):
///   dt < 2pi / (10 (|center| + sigma)),  duration*sigma/2pi >= 10.
ComplexEnvelope synth_box_noise(const NoiseDrive& drive, double duration, double dt);

/// Constant envelope sqrt(F0): the coherent-tone reference drive.
ComplexEnvelope constant_envelope(double flux, double duration, double dt);

/// Averaged-periodogram PSD estimate (Welch).
SpectrumEstimate psd_welch(std::span<const std::complex<double>> samples, double dt,
                           std::size_t segment_length, double overlap_fraction,
                           Window window);
SpectrumEstimate psd_welch(const ComplexEnvelope& env, std::size_t segment_length,
                           double overlap_fraction, Window window);

struct AutocorrelationTime {
    double tau = 0.0; ///< s
    bool non_decaying = false; ///< no 1/e crossing found; tau = duration
};

/// First lag where |<xi*(t) xi(t+tau)>| drops below 1/e of its zero-lag value,
/// located by linear interpolation. For a box spectrum this is 4.398/sigma.
AutocorrelationTime autocorrelation_time(const ComplexEnvelope& env);

} // namespace noisecool
