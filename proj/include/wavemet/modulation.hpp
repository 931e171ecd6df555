#pragma once

// Gray-mapped QPSK / 16-QAM constellations, normalized to unit average power.
// QPSK: (b1,b0) -> ((1-2*b1) + j*(1-2*b0))/sqrt(2).
// 16-QAM: bits (b3,b2) select the I level, (b1,b0) the Q level, per-axis Gray
// 00->-3, 01->-1, 11->+1, 10->+3, scaled by 1/sqrt(10).

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "wavemet/errors.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

enum class ModName { qpsk, qam16 };

struct ModulationId {
    ModName name = ModName::qpsk;
    int bits_per_symbol = 2;
    std::vector<cplx> constellation;  // indexed by the symbol's bit value, MSB first

    static ModulationId qpsk() {
        ModulationId m;
        m.name = ModName::qpsk;
        m.bits_per_symbol = 2;
        m.constellation.resize(4);
        const double s = 1.0 / std::sqrt(2.0);
        for (int b = 0; b < 4; ++b) {
            const int b1 = (b >> 1) & 1, b0 = b & 1;
            m.constellation[b] = cplx((1 - 2 * b1) * s, (1 - 2 * b0) * s);
        }
        return m;
    }

    static ModulationId qam16() {
        ModulationId m;
        m.name = ModName::qam16;
        m.bits_per_symbol = 4;
        m.constellation.resize(16);
        const double s = 1.0 / std::sqrt(10.0);
        for (int b = 0; b < 16; ++b)
            m.constellation[b] = cplx(gray_level((b >> 3) & 1, (b >> 2) & 1) * s,
                                      gray_level((b >> 1) & 1, b & 1) * s);
        return m;
    }

    static ModulationId from_name(const std::string& name) {
        if (name == "qpsk") return qpsk();
        if (name == "qam16" || name == "16qam") return qam16();
        throw validation_error("modulation: unknown name '" + name + "'");
    }

    std::string str() const { return name == ModName::qpsk ? "qpsk" : "qam16"; }
    int order() const { return static_cast<int>(constellation.size()); }
    double peak_power() const {
        double p = 0.0;
        for (const cplx& c : constellation) p = std::max(p, std::norm(c));
        return p;
    }

private:
    static int gray_level(int hi, int lo) {
        // 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
        if (hi == 0) return lo == 0 ? -3 : -1;
        return lo == 0 ? 3 : 1;
    }
};

struct SymbolFrame {
    std::vector<cplx> symbols;
    ModulationId mod;
    std::vector<std::uint8_t> source_bits;  // optional; empty if unknown

    std::size_t size() const { return symbols.size(); }
};

inline SymbolFrame map_symbols(const std::vector<std::uint8_t>& bits, const ModulationId& mod) {
    const int bps = mod.bits_per_symbol;
    if (bits.size() % static_cast<std::size_t>(bps) != 0)
        throw validation_error("map_symbols: bit count not divisible by bits per symbol");
    SymbolFrame frame;
    frame.mod = mod;
    frame.source_bits = bits;
    frame.symbols.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) {
        int v = 0;
        for (int b = 0; b < bps; ++b) v = (v << 1) | (bits[i + b] & 1);
        frame.symbols.push_back(mod.constellation[v]);
    }
    return frame;
}

}  // namespace wavemet
