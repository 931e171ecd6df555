#pragma once

// Equivalent-time interleaved acquisition. A scope sampling a periodic
// L-symbol pattern at p/q samples per symbol (gcd(p,q)=1) lands its k-th
// sample on fine-grid slot (k*q) mod (p*L); when gcd(q,L)=1 the map is a
// bijection and p*L scope samples over q pattern repetitions fill one dense
// period at p samples per symbol. Reconstruction is a pure permutation, no
// interpolation. Rates enter as exact rationals only.

#include <cstdint>
#include <numeric>
#include <vector>

#include "wavemet/rational.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

class CoprimalityError : public validation_error {
public:
    CoprimalityError(std::int64_t achievable, const std::string& msg)
        : validation_error(msg), achievable_positions(achievable) {}
    std::int64_t achievable_positions;  // distinct slots actually reachable
};

struct RateRatio {
    std::int64_t p = 1;  // scope samples
    std::int64_t q = 1;  // per q symbol periods; gcd(p, q) = 1
};

struct InterleavePlan {
    RateRatio ratio;
    std::int64_t pattern_len = 1;          // L symbols
    Rational f_sym{1, 1};                  // Hz
    Rational out_dt{1, 1};                 // seconds, = 1/(p * f_sym)
    Rational effective_rate{1, 1};         // Hz, = p * f_sym
    std::int64_t required_samples = 1;     // p * L
    std::int64_t covered_repetitions = 1;  // q
    bool degenerate = false;               // q == 1: synchronous, interleaving gains nothing
    std::vector<std::size_t> positions;    // slot of scope sample k

    std::size_t slot(std::size_t k) const {
        return static_cast<std::size_t>(
            (static_cast<std::int64_t>(k) * ratio.q) % required_samples);
    }
};

inline InterleavePlan interleave_plan(const Rational& f_scope, const Rational& f_sym,
                                      std::int64_t pattern_len) {
    if (f_scope.num == 0 || f_sym.num == 0)
        throw validation_error("interleave_plan: rates must be positive");
    if (pattern_len < 1) throw validation_error("interleave_plan: pattern length must be >= 1");

    const Rational ratio = f_scope / f_sym;  // p/q, already gcd-reduced
    InterleavePlan plan;
    plan.ratio = RateRatio{ratio.num, ratio.den};
    plan.pattern_len = pattern_len;
    plan.f_sym = f_sym;
    plan.required_samples = plan.ratio.p * pattern_len;
    plan.covered_repetitions = plan.ratio.q;
    plan.out_dt = (Rational(plan.ratio.p) * f_sym).inverse();
    plan.effective_rate = Rational(plan.ratio.p) * f_sym;
    plan.degenerate = (plan.ratio.q == 1);

    const std::int64_t g = std::gcd(plan.ratio.q, pattern_len);
    if (g != 1)
        throw CoprimalityError(plan.required_samples / g,
                               "interleave_plan: gcd(q=" + std::to_string(plan.ratio.q) +
                                   ", L=" + std::to_string(pattern_len) + ") = " + std::to_string(g) +
                                   "; only " + std::to_string(plan.required_samples / g) +
                                   " of " + std::to_string(plan.required_samples) +
                                   " slots are reachable");

    plan.positions.resize(static_cast<std::size_t>(plan.required_samples));
    for (std::size_t k = 0; k < plan.positions.size(); ++k) plan.positions[k] = plan.slot(k);
    return plan;
}

enum class ReconstructMode { strict, average };

namespace detail {

template <typename T>
std::vector<T> reconstruct_samples(const std::vector<T>& in, const InterleavePlan& plan,
                                   ReconstructMode mode) {
    const std::size_t req = static_cast<std::size_t>(plan.required_samples);
    if (mode == ReconstructMode::strict) {
        if (in.size() != req)
            throw validation_error("interleave_reconstruct: strict mode needs exactly " +
                                   std::to_string(req) + " samples, got " + std::to_string(in.size()));
        std::vector<T> out(req);
        for (std::size_t k = 0; k < req; ++k) out[plan.positions[k]] = in[k];
        return out;
    }
    if (in.size() == 0 || in.size() % req != 0)
        throw validation_error("interleave_reconstruct: average mode needs a positive multiple of " +
                               std::to_string(req) + " samples, got " + std::to_string(in.size()));
    const std::size_t reps = in.size() / req;
    std::vector<T> out(req, T{});
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t k = 0; k < req; ++k) out[plan.positions[k]] += in[r * req + k];
    for (T& v : out) v /= static_cast<double>(reps);
    return out;
}

}  // namespace detail

inline RealWaveform interleave_reconstruct(const std::vector<double>& samples,
                                           const InterleavePlan& plan,
                                           ReconstructMode mode = ReconstructMode::strict) {
    RealWaveform out;
    out.samples = detail::reconstruct_samples(samples, plan, mode);
    out.dt = plan.out_dt.value();
    return out;
}

inline ComplexWaveform interleave_reconstruct(const std::vector<cplx>& samples,
                                              const InterleavePlan& plan,
                                              ReconstructMode mode = ReconstructMode::strict) {
    ComplexWaveform out;
    out.samples = detail::reconstruct_samples(samples, plan, mode);
    out.dt = plan.out_dt.value();
    return out;
}

}  // namespace wavemet
