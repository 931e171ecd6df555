#pragma once

// Root-raised-cosine pulse shaping of a periodic symbol pattern. The symbol
// pattern is treated as circular (period L symbols) and the output grid is an
// exact rational number of samples per symbol, so a scope-rate grid like 25/7
// lands on exact time points. All grid bookkeeping is integer arithmetic.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "wavemet/modulation.hpp"
#include "wavemet/rational.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

// RRC impulse response at t/T = u symbol units, truncated to |u| <= span/2.
inline double rrc_impulse(double u, double rolloff, int span_symbols) {
    if (std::abs(u) > span_symbols / 2.0) return 0.0;
    const double b = rolloff;
    const double pi = std::numbers::pi;
    if (u == 0.0) return 1.0 - b + 4.0 * b / pi;
    const double den = 1.0 - 16.0 * b * b * u * u;
    if (std::abs(den) < 1e-12) {
        const double arg = pi / (4.0 * b);
        return (b / std::sqrt(2.0)) *
               ((1.0 + 2.0 / pi) * std::sin(arg) + (1.0 - 2.0 / pi) * std::cos(arg));
    }
    return (std::sin(pi * u * (1.0 - b)) + 4.0 * b * u * std::cos(pi * u * (1.0 + b))) /
           (pi * u * den);
}

// Shapes `frame` (period L = frame.size() symbols) onto a grid of
// samples_per_symbol = a/b samples per symbol, covering `repetitions` pattern
// periods (default: b periods, the smallest count giving an integer sample
// count). Output dt = 1/(sps * f_sym).
inline ComplexWaveform pulse_shape(const SymbolFrame& frame, double rolloff, int span_symbols,
                                   const Rational& samples_per_symbol, const Rational& f_sym,
                                   std::int64_t repetitions = 0) {
    if (frame.symbols.empty()) throw validation_error("pulse_shape: empty frame");
    if (!(rolloff > 0.0 && rolloff <= 1.0))
        throw validation_error("pulse_shape: rolloff must be in (0, 1]");
    if (span_symbols < 4) throw validation_error("pulse_shape: span must be >= 4 symbols");
    if (samples_per_symbol.num == 0 || f_sym.num == 0)
        throw validation_error("pulse_shape: rates must be positive");

    const std::int64_t a = samples_per_symbol.num;
    const std::int64_t b = samples_per_symbol.den;
    const std::int64_t L = static_cast<std::int64_t>(frame.symbols.size());
    if (repetitions == 0) repetitions = b;
    // total samples = L * reps * a / b must be an exact integer
    if ((L * repetitions * a) % b != 0)
        throw validation_error("pulse_shape: pattern length x repetitions not an integer sample count on this grid");
    const std::int64_t n_out = L * repetitions * a / b;

    const std::int64_t half = span_symbols / 2 + 1;
    ComplexWaveform out;
    out.samples.resize(static_cast<std::size_t>(n_out));
    out.dt = (samples_per_symbol * f_sym).inverse().value();
    out.t0 = 0.0;
    for (std::int64_t n = 0; n < n_out; ++n) {
        const std::int64_t tn_num = n * b;  // t_n / T = tn_num / a
        const std::int64_t m_center = tn_num / a;
        cplx acc(0.0, 0.0);
        for (std::int64_t m = m_center - half; m <= m_center + half; ++m) {
            const double u = static_cast<double>(tn_num - m * a) / static_cast<double>(a);
            const double g = rrc_impulse(u, rolloff, span_symbols);
            if (g != 0.0) {
                const std::int64_t idx = ((m % L) + L) % L;
                acc += frame.symbols[static_cast<std::size_t>(idx)] * g;
            }
        }
        out.samples[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

}  // namespace wavemet
