#pragma once

// Constellation metrics: EVM, SNR-from-EVM, analytic Gray-coded BER for
// square QAM, hard decisions and exact bit-error counting with a Wilson
// interval.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wavemet/modulation.hpp"

namespace wavemet {

enum class EvmNormalization { average, peak };
enum class EvmMode { data_aided, decision_directed };

struct EvmResult {
    double evm_rms = 0.0;      // fraction
    double evm_percent = 0.0;  // 100 * evm_rms
    EvmNormalization normalization = EvmNormalization::average;
    EvmMode mode = EvmMode::data_aided;
    std::size_t n_symbols = 0;
};

enum class BerSource { counted, evm_predicted };

struct BerEstimate {
    double ber = 0.0;
    BerSource source = BerSource::counted;
    std::size_t n_bits = 0;       // counted only
    std::size_t n_errors = 0;     // counted only
    double wilson_lo = 0.0;       // counted only, 95% interval
    double wilson_hi = 0.0;
};

/// Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Nearest constellation point; exact ties go to the point with the smaller
// bit value (the table is ordered by bit value, and only strict improvements
// replace the running best).
inline int nearest_point(const cplx& r, const ModulationId& mod) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int v = 0; v < mod.order(); ++v) {
        const double d = std::norm(r - mod.constellation[v]);
        if (d < best_d) { best_d = d; best = v; }
    }
    return best;
}

struct DecisionResult {
    std::vector<cplx> symbols;
    std::vector<std::uint8_t> bits;
};

inline DecisionResult decide_symbols(const SymbolFrame& received) {
    if (received.mod.constellation.empty())
        throw validation_error("decide_symbols: frame has no modulation identity");
    DecisionResult out;
    out.symbols.reserve(received.size());
    out.bits.reserve(received.size() * received.mod.bits_per_symbol);
    for (const cplx& r : received.symbols) {
        const int v = nearest_point(r, received.mod);
        out.symbols.push_back(received.mod.constellation[v]);
        for (int b = received.mod.bits_per_symbol - 1; b >= 0; --b)
            out.bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
    }
    return out;
}

inline EvmResult evm(const SymbolFrame& received, const SymbolFrame* reference,
                     EvmNormalization normalization = EvmNormalization::average,
                     EvmMode mode = EvmMode::data_aided) {
    if (received.symbols.empty()) throw validation_error("evm: empty frame");
    std::vector<cplx> ideal;
    if (mode == EvmMode::data_aided) {
        if (reference == nullptr || reference->symbols.size() != received.symbols.size())
            throw validation_error("evm: data-aided mode needs a reference frame of equal length");
        ideal = reference->symbols;
    } else {
        ideal = decide_symbols(received).symbols;
    }

    double err = 0.0, pwr = 0.0;
    for (std::size_t k = 0; k < received.size(); ++k) {
        err += std::norm(received.symbols[k] - ideal[k]);
        pwr += std::norm(ideal[k]);
    }
    const double n = static_cast<double>(received.size());
    double p_norm = pwr / n;
    if (normalization == EvmNormalization::peak) {
        const ModulationId& mod = (mode == EvmMode::data_aided) ? reference->mod : received.mod;
        if (mod.constellation.empty())
            throw validation_error("evm: peak normalization needs a modulation identity");
        p_norm = mod.peak_power();
    }
    if (!(p_norm > 0.0)) throw validation_error("evm: zero reference power");

    EvmResult out;
    out.evm_rms = std::sqrt(err / n / p_norm);
    out.evm_percent = 100.0 * out.evm_rms;
    out.normalization = normalization;
    out.mode = mode;
    out.n_symbols = received.size();
    return out;
}

struct SnrEstimate {
    double snr_linear = 0.0;  // infinity when evm_rms == 0
    bool bias_warning = false;  // set for decision-directed or peak-normalized input
};

inline SnrEstimate snr_from_evm(const EvmResult& e) {
    SnrEstimate out;
    out.bias_warning =
        (e.mode != EvmMode::data_aided) || (e.normalization != EvmNormalization::average);
    out.snr_linear = (e.evm_rms == 0.0) ? std::numeric_limits<double>::infinity()
                                        : 1.0 / (e.evm_rms * e.evm_rms);
    return out;
}

// Gray-coded nearest-neighbor BER for square M-QAM:
// BER = (4/log2 M)(1 - 1/sqrt(M)) Q(sqrt(3 SNR/(M-1))); M=4 reduces to Q(sqrt(SNR)).
inline BerEstimate ber_from_evm(const EvmResult& e, const ModulationId& mod) {
    const int m = mod.order();
    if (m != 4 && m != 16) throw validation_error("ber_from_evm: unsupported constellation order");
    BerEstimate out;
    out.source = BerSource::evm_predicted;
    if (e.evm_rms == 0.0) { out.ber = 0.0; return out; }
    const double snr = 1.0 / (e.evm_rms * e.evm_rms);
    const double log2m = std::log2(static_cast<double>(m));
    const double sqrtm = std::sqrt(static_cast<double>(m));
    out.ber = (4.0 / log2m) * (1.0 - 1.0 / sqrtm) *
              q_function(std::sqrt(3.0 * snr / (static_cast<double>(m) - 1.0)));
    return out;
}

inline BerEstimate count_bit_errors(const std::vector<std::uint8_t>& decided,
                                    const std::vector<std::uint8_t>& truth) {
    if (decided.size() != truth.size())
        throw validation_error("count_bit_errors: bit streams differ in length (" +
                               std::to_string(decided.size()) + " vs " +
                               std::to_string(truth.size()) + ")");
    if (decided.empty()) throw validation_error("count_bit_errors: empty streams");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < decided.size(); ++i)
        if ((decided[i] & 1) != (truth[i] & 1)) ++errors;

    BerEstimate out;
    out.source = BerSource::counted;
    out.n_bits = decided.size();
    out.n_errors = errors;
    out.ber = static_cast<double>(errors) / static_cast<double>(decided.size());

    // Wilson 95% interval, valid at small error counts
    const double z = 1.959963984540054;
    const double n = static_cast<double>(out.n_bits);
    const double p = out.ber;
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
    out.wilson_lo = std::max(0.0, center - half);
    out.wilson_hi = std::min(1.0, center + half);
    return out;
}

}  // namespace wavemet
