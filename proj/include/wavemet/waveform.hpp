#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "wavemet/errors.hpp"

namespace wavemet {

using cplx = std::complex<double>;

/// Uniformly sampled real-valued time record (volts).
struct RealWaveform {
    std::vector<double> samples;
    double dt = 1.0;  // seconds
    double t0 = 0.0;  // seconds

    std::size_t size() const { return samples.size(); }
    double duration() const { return dt * static_cast<double>(samples.size()); }
};

/// Uniformly sampled complex baseband record (normalized envelope units).
struct ComplexWaveform {
    std::vector<cplx> samples;
    double dt = 1.0;
    double t0 = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration() const { return dt * static_cast<double>(samples.size()); }
};

enum class Sidedness { double_sided, single_sided };

/// Complex frequency-domain record. Forward transforms of real records are
/// stored single-sided (bins 0..N/2); length_meta keeps the originating
/// time-record length N so the round trip is exact.
struct Spectrum {
    std::vector<cplx> bins;
    double df = 1.0;          // Hz
    double f0 = 0.0;          // Hz, frequency of bins[0]
    std::size_t length_meta = 0;  // original time-record length N
    Sidedness sided = Sidedness::double_sided;
    double t0 = 0.0;          // t0 of the originating record, carried through

    std::size_t size() const { return bins.size(); }
    double frequency(std::size_t k) const { return f0 + df * static_cast<double>(k); }
};

inline void validate(const RealWaveform& w, const char* who = "waveform") {
    if (w.samples.empty()) throw validation_error(std::string(who) + ": empty record");
    if (!(w.dt > 0.0)) throw validation_error(std::string(who) + ": dt must be > 0");
    for (double v : w.samples)
        if (!std::isfinite(v)) throw validation_error(std::string(who) + ": non-finite sample");
}

inline void validate(const ComplexWaveform& w, const char* who = "waveform") {
    if (w.samples.empty()) throw validation_error(std::string(who) + ": empty record");
    if (!(w.dt > 0.0)) throw validation_error(std::string(who) + ": dt must be > 0");
    for (const cplx& v : w.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw validation_error(std::string(who) + ": non-finite sample");
}

inline void validate(const Spectrum& s, const char* who = "spectrum") {
    if (s.bins.empty()) throw validation_error(std::string(who) + ": empty spectrum");
    if (!(s.df > 0.0)) throw validation_error(std::string(who) + ": df must be > 0");
    for (const cplx& v : s.bins)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw validation_error(std::string(who) + ": non-finite bin");
}

inline bool same_grid(const Spectrum& a, const Spectrum& b, double rel_tol = 1e-12) {
    if (a.size() != b.size() || a.length_meta != b.length_meta || a.sided != b.sided) return false;
    const double fscale = std::max(std::abs(a.df), std::abs(b.df));
    return std::abs(a.df - b.df) <= rel_tol * fscale &&
           std::abs(a.f0 - b.f0) <= rel_tol * std::max(fscale, std::abs(a.f0));
}

}  // namespace wavemet
