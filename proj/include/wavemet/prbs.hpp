#pragma once

// Maximal-length PRBS generators, Fibonacci (many-to-one) form, MSB-first
// output, tap sets per ITU-T O.150: x^7+x^6+1, x^9+x^5+1, x^15+x^14+1,
// x^23+x^18+1, x^31+x^28+1.

#include <cstdint>
#include <vector>

#include "wavemet/errors.hpp"

namespace wavemet {

struct PrbsSpec {
    int degree = 7;
    std::uint32_t seed = 1;  // nonzero initial register state

    // second feedback tap (the first is always `degree`)
    static int second_tap(int degree) {
        switch (degree) {
            case 7: return 6;
            case 9: return 5;
            case 15: return 14;
            case 23: return 18;
            case 31: return 28;
            default:
                throw validation_error("prbs: degree must be one of {7, 9, 15, 23, 31}");
        }
    }

    std::uint64_t period() const { return (std::uint64_t{1} << degree) - 1; }
};

inline std::vector<std::uint8_t> prbs_generate(const PrbsSpec& spec, std::size_t n) {
    const int tap_b = PrbsSpec::second_tap(spec.degree);
    if (n < 1) throw validation_error("prbs: n must be >= 1");
    const std::uint32_t mask = (spec.degree == 31) ? 0x7FFFFFFFu
                                                   : ((1u << spec.degree) - 1u);
    std::uint32_t state = spec.seed & mask;
    if (state == 0) throw validation_error("prbs: seed state must be nonzero");

    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t out = (state >> (spec.degree - 1)) & 1u;  // MSB first
        const std::uint32_t fb = out ^ ((state >> (tap_b - 1)) & 1u);
        state = ((state << 1) | fb) & mask;
        bits[i] = static_cast<std::uint8_t>(out);
    }
    return bits;
}

}  // namespace wavemet
