#include "noisecool/spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace noisecool {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

struct LorentzianModel {
    // S(w) = baseline + area * fwhm / ((w - center)^2 + (fwhm/2)^2);
    // the area parameter integrates S dw/2pi.
    double center, fwhm, area, baseline;
};

double eval_model(const LorentzianModel& m, double w) {
    double d = w - m.center;
    return m.baseline + m.area * m.fwhm / (d * d + 0.25 * m.fwhm * m.fwhm);
}

/// Solve a 4x4 linear system in place; returns false when singular.
bool solve4(std::array<std::array<double, 4>, 4>& a, std::array<double, 4>& b) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int i = 0; i < 4; ++i) b[i] /= a[i][i];
    return true;
}

double sum_squared_residual(const std::vector<double>& f, const std::vector<double>& y,
                            const LorentzianModel& m) {
    double ss = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double r = y[i] - eval_model(m, f[i]);
        ss += r * r;
    }
    return ss;
}

LorentzianModel initial_guess(const std::vector<double>& f, const std::vector<double>& y) {
    LorentzianModel m{};
    m.baseline = median(y);
    std::size_t pk = static_cast<std::size_t>(
        std::max_element(y.begin(), y.end()) - y.begin());
    m.center = f[pk];
    double height = y[pk] - m.baseline;
    double half = m.baseline + 0.5 * height;
    double left = f.front(), right = f.back();
    for (std::size_t i = pk; i-- > 0;)
        if (y[i] < half) { left = f[i + 1]; break; }
    for (std::size_t i = pk + 1; i < y.size(); ++i)
        if (y[i] < half) { right = f[i - 1]; break; }
    double width = std::max(right - left, 2.0 * (f[1] - f[0]));
    m.fwhm = width;
    m.area = std::max(height, 1e-12) * width / 4.0;
    return m;
}

} // namespace

SpectrumEstimate mechanical_spectrum(std::span<const Trajectory> trajectories,
                                     std::size_t segment_length, Window window) {
    if (trajectories.empty())
        throw std::invalid_argument("mechanical_spectrum: no trajectories");
    double dt = trajectories.front().dt_sample;
    std::size_t min_len = trajectories.front().states.size();
    for (const auto& t : trajectories) {
        if (t.dt_sample != dt)
            throw std::invalid_argument("mechanical_spectrum: mismatched sample strides");
        min_len = std::min(min_len, t.states.size());
    }
    if (segment_length == 0)
        segment_length = std::max<std::size_t>(16, std::min<std::size_t>(4096, min_len / 4));
    if (segment_length > min_len)
        throw std::invalid_argument("mechanical_spectrum: too few samples per segment");

    SpectrumEstimate pooled;
    long total_segments = 0;
    std::vector<std::complex<double>> series;
    for (const auto& t : trajectories) {
        series.resize(t.states.size());
        for (std::size_t i = 0; i < t.states.size(); ++i) series[i] = t.states[i].b;
        SpectrumEstimate est = psd_welch(series, dt, segment_length, 0.5, window);
        if (pooled.psd.empty()) {
            pooled = est;
            for (auto& v : pooled.psd) v *= static_cast<double>(est.n_segments);
        } else {
            for (std::size_t i = 0; i < pooled.psd.size(); ++i)
                pooled.psd[i] += est.psd[i] * static_cast<double>(est.n_segments);
        }
        total_segments += est.n_segments;
    }
    for (auto& v : pooled.psd) v /= static_cast<double>(total_segments);
    pooled.n_segments = static_cast<int>(total_segments);
    return pooled;
}

LineFit fit_lorentzian(const SpectrumEstimate& spec, const std::optional<LineFit>& init) {
    LineFit out;
    const std::size_t n = spec.psd.size();
    if (n < 8) return out;

    // Scale-free internal units keep the fit equivariant under psd scaling.
    double scale = *std::max_element(spec.psd.begin(), spec.psd.end());
    if (!(scale > 0.0)) scale = 1.0;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = spec.psd[i] / scale;
    const std::vector<double>& f = spec.freqs;

    LorentzianModel m{};
    if (init) {
        m.center = init->center;
        m.fwhm = init->fwhm;
        m.area = init->area / scale;
        m.baseline = init->baseline / scale;
    } else {
        m = initial_guess(f, y);
    }

    double lambda = 1e-3;
    double ss = sum_squared_residual(f, y, m);
    bool lm_converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        std::array<std::array<double, 4>, 4> jtj{};
        std::array<double, 4> jtr{};
        for (std::size_t i = 0; i < n; ++i) {
            double d = f[i] - m.center;
            double den = d * d + 0.25 * m.fwhm * m.fwhm;
            double r = y[i] - eval_model(m, f[i]);
            std::array<double, 4> j{};
            j[0] = m.area * m.fwhm * 2.0 * d / (den * den);
            j[1] = m.area / den - 0.5 * m.area * m.fwhm * m.fwhm / (den * den);
            j[2] = m.fwhm / den;
            j[3] = 1.0;
            for (int a = 0; a < 4; ++a) {
                jtr[a] += j[a] * r;
                for (int b = 0; b < 4; ++b) jtj[a][b] += j[a] * j[b];
            }
        }
        auto damped = jtj;
        for (int a = 0; a < 4; ++a) damped[a][a] *= 1.0 + lambda;
        auto delta = jtr;
        if (!solve4(damped, delta)) break;

        LorentzianModel trial{m.center + delta[0], m.fwhm + delta[1], m.area + delta[2],
                              m.baseline + delta[3]};
        if (!(trial.fwhm > 0.0) || !std::isfinite(trial.fwhm) || !std::isfinite(trial.area)) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }
        double trial_ss = sum_squared_residual(f, y, trial);
        if (trial_ss <= ss) {
            double rel = 0.0;
            rel = std::max(rel, std::abs(delta[0]) / (std::abs(m.center) + m.fwhm));
            rel = std::max(rel, std::abs(delta[1]) / std::abs(m.fwhm));
            rel = std::max(rel, std::abs(delta[2]) / (std::abs(m.area) + 1e-300));
            rel = std::max(rel, std::abs(delta[3]) / (std::abs(m.baseline) + std::abs(m.area) / m.fwhm + 1e-300));
            m = trial;
            ss = trial_ss;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-6) {
                lm_converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    double height = 4.0 * m.area / m.fwhm;
    double rms = std::sqrt(ss / static_cast<double>(n));
    out.center = m.center;
    out.fwhm = m.fwhm;
    out.area = m.area * scale;
    out.baseline = m.baseline * scale;
    out.residual_norm = height > 0.0 ? rms / height : std::numeric_limits<double>::infinity();
    out.converged = lm_converged && m.area > 0.0 && m.fwhm > 0.0 && height > 2.0 * rms;
    return out;
}

double fwhm_numeric(const SpectrumEstimate& spec) {
    const std::size_t n = spec.psd.size();
    if (n < 8)
        throw SpectrumError(SpectrumError::Code::under_resolved,
                            "UNDER_RESOLVED: spectrum too short");
    double baseline = median(spec.psd);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = spec.psd[i] - baseline;
    std::size_t pk = static_cast<std::size_t>(
        std::max_element(y.begin(), y.end()) - y.begin());
    double half = 0.5 * y[pk];
    if (!(half > 0.0))
        throw SpectrumError(SpectrumError::Code::under_resolved,
                            "UNDER_RESOLVED: no peak above baseline");

    double bin = spec.freqs[1] - spec.freqs[0];
    std::size_t left_idx = pk, right_idx = pk;
    double left = 0.0, right = 0.0;
    bool found_left = false, found_right = false;
    for (std::size_t i = pk; i-- > 0;) {
        if (y[i] < half) {
            double frac = (y[i + 1] - half) / (y[i + 1] - y[i]);
            left = spec.freqs[i + 1] - frac * bin;
            left_idx = i;
            found_left = true;
            break;
        }
    }
    for (std::size_t i = pk + 1; i < n; ++i) {
        if (y[i] < half) {
            double frac = (y[i - 1] - half) / (y[i - 1] - y[i]);
            right = spec.freqs[i - 1] + frac * bin;
            right_idx = i;
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right)
        throw SpectrumError(SpectrumError::Code::under_resolved,
                            "UNDER_RESOLVED: half-max crossing outside grid");
    double fwhm = right - left;
    if (fwhm < 3.0 * bin)
        throw SpectrumError(SpectrumError::Code::under_resolved,
                            "UNDER_RESOLVED: peak narrower than 3 bins");

    // A second run of >=2 bins above half max, separated by >=3 bins, means
    // the peak is not unambiguous.
    std::size_t gap = 0, run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool inside_main = i + 3 >= left_idx && i <= right_idx + 3;
        if (!inside_main && y[i] > half) {
            ++run;
            if (run >= 2 && gap >= 3)
                throw SpectrumError(SpectrumError::Code::ambiguous_peak,
                                    "AMBIGUOUS_PEAK: secondary peak above half max");
        } else {
            if (y[i] <= half) ++gap;
            run = 0;
        }
    }
    return fwhm;
}

double occupancy_from_spectrum(const SpectrumEstimate& spec, const LineFit& fit) {
    if (spec.psd.size() < 2)
        throw std::invalid_argument("occupancy_from_spectrum: empty spectrum");
    double bin = spec.freqs[1] - spec.freqs[0];
    double area = 0.0, var = 0.0;
    for (double v : spec.psd) {
        area += v - fit.baseline;
        var += v * v;
    }
    area *= bin / (2.0 * M_PI);
    double n_avg = std::max(1, spec.n_segments);
    double stderr_area = std::sqrt(var / n_avg) * bin / (2.0 * M_PI);
    double occupancy = area - 0.5;
    if (occupancy < -3.0 * stderr_area)
        throw SpectrumError(SpectrumError::Code::normalization_fault,
                            "NORMALIZATION_FAULT: negative occupancy beyond 3 sigma");
    return occupancy;
}

} // namespace noisecool
