#include "noisecool/noisegen.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

#include "noisecool/rng.hpp"

namespace noisecool {

namespace {

std::mutex fftw_plan_mutex;

/// In-place complex DFT; FFTW planning is serialized, execution is not.
void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
    int n = static_cast<int>(data.size());
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        plan = fftw_plan_dft_1d(n, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
}

double wrapped_bin_frequency(std::size_t k, std::size_t n, double dt) {
    auto signed_k = static_cast<std::ptrdiff_t>(k);
    if (k >= (n + 1) / 2) signed_k -= static_cast<std::ptrdiff_t>(n); // Nyquist bin is negative
    return 2.0 * M_PI * static_cast<double>(signed_k) / (dt * static_cast<double>(n));
}

} // namespace

ComplexEnvelope synth_box_noise(const NoiseDrive& drive, double duration, double dt) {
    if (!(drive.sigma > 0.0))
        throw std::invalid_argument("synth_box_noise: sigma must be > 0");
    if (drive.flux < 0.0)
        throw std::invalid_argument("synth_box_noise: flux must be >= 0");
    double top_freq = std::abs(drive.center_detuning) + drive.sigma;
    if (!(dt > 0.0) || dt >= 2.0 * M_PI / (10.0 * top_freq)) {
        std::ostringstream os;
        os << "synth_box_noise: dt = " << dt << " violates dt < 2pi/(10 (|center| + sigma)) = "
           << 2.0 * M_PI / (10.0 * top_freq);
        throw std::invalid_argument(os.str());
    }
    double cells = duration * drive.sigma / (2.0 * M_PI);
    if (!(cells >= 10.0)) {
        std::ostringstream os;
        os << "synth_box_noise: duration*sigma/2pi = " << cells << " violates >= 10";
        throw std::invalid_argument(os.str());
    }

    std::size_t n = static_cast<std::size_t>(std::llround(duration / dt));
    ComplexEnvelope env;
    env.dt = dt;
    env.flux_nominal = drive.flux;
    env.seed = drive.seed;
    env.samples.assign(n, {0.0, 0.0});
    if (drive.flux == 0.0) return env;

    // One-sided PSD target per in-band bin; |X_k|^2 scales as S0 * n / dt.
    double s0 = 2.0 * M_PI * drive.flux / drive.sigma;
    double amp = std::sqrt(0.5 * s0 * static_cast<double>(n) / dt);
    double lo = drive.center_detuning - drive.sigma / 2.0;
    double hi = drive.center_detuning + drive.sigma / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        double w = wrapped_bin_frequency(k, n, dt);
        if (w < lo || w > hi) continue;
        auto g = rng::gauss_pair(drive.seed, k, 0);
        env.samples[k] = {amp * g.g0, amp * g.g1};
    }
    fft_inplace(env.samples, FFTW_BACKWARD);
    double inv_n = 1.0 / static_cast<double>(n);
    for (auto& s : env.samples) s *= inv_n;
    return env;
}

ComplexEnvelope constant_envelope(double flux, double duration, double dt) {
    if (flux < 0.0)
        throw std::invalid_argument("constant_envelope: flux must be >= 0");
    if (!(dt > 0.0) || !(duration > 0.0))
        throw std::invalid_argument("constant_envelope: duration and dt must be > 0");
    ComplexEnvelope env;
    env.dt = dt;
    env.flux_nominal = flux;
    env.samples.assign(static_cast<std::size_t>(std::llround(duration / dt)),
                       {std::sqrt(flux), 0.0});
    return env;
}

SpectrumEstimate psd_welch(std::span<const std::complex<double>> samples, double dt,
                           std::size_t segment_length, double overlap_fraction,
                           Window window) {
    std::size_t n = samples.size();
    if (segment_length < 8 || segment_length > n)
        throw std::invalid_argument("psd_welch: degenerate segmentation");
    if (!(overlap_fraction >= 0.0) || overlap_fraction >= 1.0)
        throw std::invalid_argument("psd_welch: overlap_fraction must be in [0, 1)");

    std::size_t len = segment_length;
    auto hop = static_cast<std::size_t>(
        std::max<double>(1.0, std::llround(static_cast<double>(len) * (1.0 - overlap_fraction))));

    std::vector<double> w(len, 1.0);
    if (window == Window::hann) {
        for (std::size_t i = 0; i < len; ++i)
            w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                         static_cast<double>(len)));
    }
    double w2_sum = 0.0, w_sum = 0.0;
    for (double v : w) {
        w2_sum += v * v;
        w_sum += v;
    }

    std::vector<double> acc(len, 0.0);
    std::vector<std::complex<double>> seg(len);
    int n_segments = 0;
    for (std::size_t start = 0; start + len <= n; start += hop) {
        for (std::size_t i = 0; i < len; ++i) seg[i] = w[i] * samples[start + i];
        fft_inplace(seg, FFTW_FORWARD);
        for (std::size_t i = 0; i < len; ++i) acc[i] += std::norm(seg[i]);
        ++n_segments;
    }
    if (n_segments == 0)
        throw std::invalid_argument("psd_welch: no complete segment");

    SpectrumEstimate est;
    est.n_segments = n_segments;
    double delta_w = 2.0 * M_PI / (dt * static_cast<double>(len));
    est.resolution_bandwidth =
        delta_w * static_cast<double>(len) * w2_sum / (w_sum * w_sum);
    est.freqs.resize(len);
    est.psd.resize(len);
    double scale = dt / (w2_sum * static_cast<double>(n_segments));
    // fftshift to an ascending frequency grid
    std::size_t half = (len + 1) / 2; // first negative-frequency bin
    for (std::size_t i = 0; i < len; ++i) {
        std::size_t k = (i + half) % len;
        est.freqs[i] = wrapped_bin_frequency(k, len, dt);
        est.psd[i] = acc[k] * scale;
    }
    return est;
}

SpectrumEstimate psd_welch(const ComplexEnvelope& env, std::size_t segment_length,
                           double overlap_fraction, Window window) {
    return psd_welch(std::span<const std::complex<double>>(env.samples), env.dt,
                     segment_length, overlap_fraction, window);
}

AutocorrelationTime autocorrelation_time(const ComplexEnvelope& env) {
    std::size_t n = env.samples.size();
    if (n < 4)
        throw std::invalid_argument("autocorrelation_time: envelope too short");

    // Circular autocorrelation via FFT; the synthesized waveform is periodic
    // over its duration so no zero padding is needed.
    std::vector<std::complex<double>> work(env.samples);
    fft_inplace(work, FFTW_FORWARD);
    for (auto& v : work) v = std::norm(v);
    fft_inplace(work, FFTW_BACKWARD);

    double r0 = std::abs(work[0]);
    AutocorrelationTime out;
    if (r0 == 0.0) {
        out.tau = env.duration();
        out.non_decaying = true;
        return out;
    }
    double target = r0 / M_E;
    double prev = r0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        double cur = std::abs(work[k]);
        if (cur < target) {
            double frac = (prev - target) / (prev - cur);
            out.tau = (static_cast<double>(k - 1) + frac) * env.dt;
            return out;
        }
        prev = cur;
    }
    out.tau = env.duration();
    out.non_decaying = true;
    return out;
}

} // namespace noisecool
