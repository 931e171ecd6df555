#pragma once

// Circular complex AWGN, deterministic in the seed. SNR is defined against
// the measured mean signal power of the input, not a nominal unit power.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "wavemet/modulation.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

constexpr double kNoNoise = std::numeric_limits<double>::infinity();

// Splits a campaign seed and a record index into an independent stream seed
// (splitmix64 finalizer), so parallel campaigns stay schedule-independent.
inline std::uint64_t derive_seed(std::uint64_t campaign_seed, std::uint64_t index) {
    std::uint64_t z = campaign_seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace detail {

inline void add_awgn_samples(std::vector<cplx>& samples, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0) return;  // no-noise sentinel
    double power = 0.0;
    for (const cplx& v : samples) power += std::norm(v);
    power /= static_cast<double>(samples.size());
    const double sigma2 = power / std::pow(10.0, snr_db / 10.0);
    const double s = std::sqrt(sigma2 / 2.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (cplx& v : samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += cplx(s * re, s * im);
    }
}

}  // namespace detail

inline ComplexWaveform add_awgn(const ComplexWaveform& w, double snr_db, std::uint64_t seed) {
    validate(w, "add_awgn");
    ComplexWaveform out = w;
    detail::add_awgn_samples(out.samples, snr_db, seed);
    return out;
}

inline SymbolFrame add_awgn(const SymbolFrame& frame, double snr_db, std::uint64_t seed) {
    if (frame.symbols.empty()) throw validation_error("add_awgn: empty frame");
    SymbolFrame out = frame;
    detail::add_awgn_samples(out.symbols, snr_db, seed);
    return out;
}

}  // namespace wavemet
