#pragma once

// DFT convention: forward = negative exponent, unnormalized; inverse divides
// by N; df = 1/(N*dt). Real records transform to single-sided spectra
// (bins 0..N/2) with the original length kept in length_meta.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wavemet/fft.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

inline Spectrum forward_transform(const RealWaveform& w) {
    validate(w, "forward_transform");
    const std::size_t n = w.size();
    std::vector<cplx> in(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = cplx(w.samples[i], 0.0);
    std::vector<cplx> full = detail::fft(in);
    Spectrum s;
    s.bins.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n / 2 + 1));
    s.df = 1.0 / (static_cast<double>(n) * w.dt);
    s.f0 = 0.0;
    s.length_meta = n;
    s.sided = Sidedness::single_sided;
    s.t0 = w.t0;
    return s;
}

inline Spectrum forward_transform(const ComplexWaveform& w) {
    validate(w, "forward_transform");
    Spectrum s;
    s.bins = detail::fft(w.samples);
    s.df = 1.0 / (static_cast<double>(w.size()) * w.dt);
    s.f0 = 0.0;
    s.length_meta = w.size();
    s.sided = Sidedness::double_sided;
    s.t0 = w.t0;
    return s;
}

// Expands a single-sided spectrum to the full Hermitian bin set.
inline std::vector<cplx> full_bins(const Spectrum& s) {
    if (s.sided == Sidedness::double_sided) return s.bins;
    const std::size_t n = s.length_meta;
    std::vector<cplx> full(n);
    for (std::size_t k = 0; k < s.bins.size(); ++k) full[k] = s.bins[k];
    for (std::size_t k = s.bins.size(); k < n; ++k) full[k] = std::conj(s.bins[n - k]);
    return full;
}

inline RealWaveform inverse_transform_real(const Spectrum& s) {
    validate(s, "inverse_transform");
    if (s.sided != Sidedness::single_sided)
        throw validation_error("inverse_transform: expected a single-sided spectrum for a real record");
    const std::size_t n = s.length_meta;
    if (n == 0 || s.bins.size() != n / 2 + 1)
        throw validation_error("inverse_transform: single-sided bin count inconsistent with length_meta");
    std::vector<cplx> time = detail::ifft_unscaled(full_bins(s));
    RealWaveform w;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.samples[i] = time[i].real() / static_cast<double>(n);
    w.dt = 1.0 / (static_cast<double>(n) * s.df);
    w.t0 = s.t0;
    return w;
}

inline ComplexWaveform inverse_transform_complex(const Spectrum& s) {
    validate(s, "inverse_transform");
    if (s.sided != Sidedness::double_sided)
        throw validation_error("inverse_transform: expected a double-sided spectrum for a complex record");
    const std::size_t n = s.length_meta;
    if (s.bins.size() != n)
        throw validation_error("inverse_transform: bin count inconsistent with length_meta");
    ComplexWaveform w;
    w.samples = detail::ifft_unscaled(s.bins);
    for (cplx& v : w.samples) v /= static_cast<double>(n);
    w.dt = 1.0 / (static_cast<double>(n) * s.df);
    w.t0 = s.t0;
    return w;
}

// Signed DFT frequency of bin k for an N-point double-sided spectrum.
inline double signed_frequency(std::size_t k, std::size_t n, double df) {
    return (k <= n / 2) ? df * static_cast<double>(k)
                        : df * (static_cast<double>(k) - static_cast<double>(n));
}

namespace detail {

inline void check_delay_guard(double tau, double duration) {
    if (!(std::abs(tau) < duration / 4.0))
        throw validation_error("fractional_delay: |tau| must be < record duration / 4");
}

}  // namespace detail

// Circular delay by tau seconds: multiplies the spectrum by exp(-j*2*pi*f*tau)
// on signed frequencies. Exact for periodic records.
inline RealWaveform fractional_delay(const RealWaveform& w, double tau) {
    validate(w, "fractional_delay");
    detail::check_delay_guard(tau, w.duration());
    Spectrum s = forward_transform(w);
    for (std::size_t k = 0; k < s.bins.size(); ++k)
        s.bins[k] *= std::polar(1.0, -2.0 * std::numbers::pi * s.frequency(k) * tau);
    // Nyquist bin of an even-length record must stay real
    if (w.size() % 2 == 0) s.bins.back() = cplx(s.bins.back().real(), 0.0);
    RealWaveform out = inverse_transform_real(s);
    out.dt = w.dt;
    return out;
}

inline ComplexWaveform fractional_delay(const ComplexWaveform& w, double tau) {
    validate(w, "fractional_delay");
    detail::check_delay_guard(tau, w.duration());
    Spectrum s = forward_transform(w);
    const std::size_t n = w.size();
    for (std::size_t k = 0; k < n; ++k)
        s.bins[k] *= std::polar(1.0, -2.0 * std::numbers::pi * signed_frequency(k, n, s.df) * tau);
    ComplexWaveform out = inverse_transform_complex(s);
    out.dt = w.dt;
    return out;
}

}  // namespace wavemet
