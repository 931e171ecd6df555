#pragma once

// Forward/reverse travelling-wave separation on a lossless known-velocity
// line. Per frequency bin, the voltages measured at positions z_i obey
//   V(z_i, w) = F(w) exp(-j b z_i) + G(w) exp(+j b z_i),   b = w / v,
// solved as an N x 2 complex least-squares problem. Bins whose design matrix
// condition number exceeds the threshold (columns parallel at b*dz = n*pi for
// two positions, and always at DC) are masked, not regularized.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "wavemet/waveform.hpp"

namespace wavemet {

struct LineMeasurement {
    std::vector<double> positions;  // meters, distinct
    std::vector<Spectrum> spectra;  // one per position, common grid
    double velocity = 0.0;          // phase velocity, m/s
};

struct WaveSplitResult {
    Spectrum forward;                       // F(w); masked bins are NaN
    Spectrum reverse;                       // G(w)
    std::vector<double> condition;          // per-bin condition number of the design matrix
    std::vector<std::uint8_t> singular_mask;
    double velocity = 0.0;
};

inline void validate(const LineMeasurement& m) {
    if (m.positions.size() < 2) throw validation_error("wavesplit: need at least 2 positions");
    if (m.positions.size() != m.spectra.size())
        throw validation_error("wavesplit: one spectrum per position required");
    if (!(m.velocity > 0.0)) throw validation_error("wavesplit: velocity must be > 0");
    for (std::size_t i = 0; i < m.positions.size(); ++i)
        for (std::size_t j = i + 1; j < m.positions.size(); ++j)
            if (m.positions[i] == m.positions[j])
                throw validation_error("wavesplit: duplicate measurement positions");
    for (const Spectrum& s : m.spectra) {
        validate(s, "wavesplit spectrum");
        if (!same_grid(s, m.spectra.front()))
            throw validation_error("wavesplit: spectra do not share a frequency grid");
    }
}

inline WaveSplitResult split_waves(const LineMeasurement& m, double cond_threshold = 1e3) {
    validate(m);
    if (!(cond_threshold >= 1.0)) throw validation_error("wavesplit: cond_threshold must be >= 1");

    const Spectrum& grid = m.spectra.front();
    const std::size_t nbins = grid.size();
    const std::size_t npos = m.positions.size();
    const double nn = static_cast<double>(npos);
    const cplx nan_bin(std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN());

    WaveSplitResult res;
    res.forward = grid;
    res.reverse = grid;
    res.velocity = m.velocity;
    res.condition.resize(nbins);
    res.singular_mask.resize(nbins);

    std::size_t n_ok = 0;
    for (std::size_t k = 0; k < nbins; ++k) {
        const double beta = 2.0 * std::numbers::pi * grid.frequency(k) / m.velocity;
        // normal equations of the [exp(-j b z), exp(+j b z)] design matrix
        cplx s(0.0, 0.0), b1(0.0, 0.0), b2(0.0, 0.0);
        for (std::size_t i = 0; i < npos; ++i) {
            const cplx e_plus = std::polar(1.0, beta * m.positions[i]);
            s += e_plus * e_plus;
            b1 += e_plus * m.spectra[i].bins[k];
            b2 += std::conj(e_plus) * m.spectra[i].bins[k];
        }
        const double smag = std::abs(s);
        // singular values^2 of the design matrix are n +- |s|
        const double cond = (nn - smag > 0.0)
                                ? std::sqrt((nn + smag) / (nn - smag))
                                : std::numeric_limits<double>::infinity();
        res.condition[k] = cond;
        if (!(cond <= cond_threshold)) {
            res.singular_mask[k] = 1;
            res.forward.bins[k] = nan_bin;
            res.reverse.bins[k] = nan_bin;
            continue;
        }
        const double det = nn * nn - smag * smag;
        res.forward.bins[k] = (nn * b1 - s * b2) / det;
        res.reverse.bins[k] = (nn * b2 - std::conj(s) * b1) / det;
        res.singular_mask[k] = 0;
        ++n_ok;
    }
    if (n_ok == 0)
        throw numerical_error("wavesplit: every bin is singular; measurement geometry is degenerate");
    return res;
}

// Reconstructs V(z, w) from the separated waves; masked bins stay NaN.
inline Spectrum propagate(const WaveSplitResult& result, double z) {
    Spectrum out = result.forward;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (result.singular_mask[k]) continue;
        const double beta = 2.0 * std::numbers::pi * out.frequency(k) / result.velocity;
        out.bins[k] = result.forward.bins[k] * std::polar(1.0, -beta * z) +
                      result.reverse.bins[k] * std::polar(1.0, beta * z);
    }
    return out;
}

}  // namespace wavemet
