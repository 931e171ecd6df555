#pragma once

// Synthetic balanced-photodiode response pairs. The negative arm gets a gain
// mismatch, an extra circular delay, and an optional sinusoidal magnitude
// ripple, all applied in the frequency domain so construction identities are
// exact for the tests that rely on them.

#include <cmath>
#include <numbers>
#include <utility>

#include "wavemet/fft.hpp"
#include "wavemet/transform.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

struct MismatchSpec {
    double gain = 1.0;        // relative amplitude of the negative arm
    double delay = 0.0;       // negative-arm extra delay, seconds
    double ripple_amp = 0.0;  // magnitude ripple amplitude (fraction)
    double ripple_freq = 0.0; // ripple argument scale, seconds: factor = 1 + a*sin(2*pi*|f|*ripple_freq)
};

// Critically damped two-pole impulse response, H(f) = 1/(1 + j*f/fc)^2,
// normalized to unit DC gain. fc follows from the requested 3 dB bandwidth.
inline RealWaveform photodiode_response(double bandwidth_3db_hz, double dt, std::size_t n) {
    if (!(bandwidth_3db_hz > 0.0)) throw validation_error("photodiode_response: bandwidth must be > 0");
    if (!(dt > 0.0) || n == 0) throw validation_error("photodiode_response: bad grid");
    // |H| = 1/(1 + (f/fc)^2) -> f_3dB = fc * sqrt(sqrt(2) - 1)
    const double fc = bandwidth_3db_hz / std::sqrt(std::sqrt(2.0) - 1.0);
    const double tau = 1.0 / (2.0 * std::numbers::pi * fc);
    RealWaveform h;
    h.dt = dt;
    h.samples.resize(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        h.samples[i] = t * std::exp(-t / tau);
        sum += h.samples[i];
    }
    if (sum <= 0.0) throw numerical_error("photodiode_response: degenerate response");
    for (double& v : h.samples) v /= sum;
    return h;
}

inline std::pair<RealWaveform, RealWaveform>
synth_balanced_pair(const RealWaveform& stimulus, const RealWaveform& h, const MismatchSpec& mm) {
    validate(stimulus, "synth_balanced_pair stimulus");
    validate(h, "synth_balanced_pair response");
    if (!(mm.gain > 0.0)) throw validation_error("synth_balanced_pair: gain must be > 0");
    const double dscale = std::max(stimulus.dt, h.dt);
    if (std::abs(stimulus.dt - h.dt) > 1e-12 * dscale)
        throw validation_error("synth_balanced_pair: stimulus and response dt mismatch");
    const std::size_t n = stimulus.size();
    if (h.size() > n)
        throw validation_error("synth_balanced_pair: response longer than stimulus record");

    std::vector<cplx> s_in(n), h_in(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) s_in[i] = cplx(stimulus.samples[i], 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) h_in[i] = cplx(h.samples[i], 0.0);
    const std::vector<cplx> S = detail::fft(s_in);
    const std::vector<cplx> H = detail::fft(h_in);

    const double df = 1.0 / (static_cast<double>(n) * stimulus.dt);
    std::vector<cplx> vp_f(n), vn_f(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = signed_frequency(k, n, df);
        vp_f[k] = H[k] * S[k];
        const double ripple = 1.0 + mm.ripple_amp *
            std::sin(2.0 * std::numbers::pi * std::abs(f) * mm.ripple_freq);
        vn_f[k] = mm.gain * ripple * std::polar(1.0, -2.0 * std::numbers::pi * f * mm.delay) * vp_f[k];
    }
    if (n % 2 == 0) {  // keep the Nyquist bin real
        vp_f[n / 2] = cplx(vp_f[n / 2].real(), 0.0);
        vn_f[n / 2] = cplx(vn_f[n / 2].real(), 0.0);
    }

    const std::vector<cplx> vp_t = detail::ifft_unscaled(vp_f);
    const std::vector<cplx> vn_t = detail::ifft_unscaled(vn_f);
    RealWaveform vp{std::vector<double>(n), stimulus.dt, stimulus.t0};
    RealWaveform vn{std::vector<double>(n), stimulus.dt, stimulus.t0};
    for (std::size_t i = 0; i < n; ++i) {
        vp.samples[i] = vp_t[i].real() / static_cast<double>(n);
        vn.samples[i] = vn_t[i].real() / static_cast<double>(n);
    }
    return {std::move(vp), std::move(vn)};
}

}  // namespace wavemet
