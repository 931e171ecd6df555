#pragma once

// Trigger-jitter compensation by in-phase/quadrature referencing: each
// acquired record carries a reference sinusoid whose phase locates the
// record's timing offset, modulo the reference period. Offsets are reported
// relative to the ensemble median phase; compensation undoes each offset with
// a fractional delay and averages.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wavemet/transform.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

struct JitterEstimate {
    std::vector<double> per_record_dt;  // seconds, in (-1/(2 f_ref), +1/(2 f_ref)]
    double f_ref = 0.0;                 // Hz
    double ambiguity_range = 0.0;       // +-1/(2 f_ref)
    std::vector<std::uint8_t> near_boundary;  // |dt| beyond 80% of the ambiguity range
};

namespace detail {

inline double wrap_phase(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    phi = std::fmod(phi, two_pi);
    if (phi > std::numbers::pi) phi -= two_pi;
    if (phi <= -std::numbers::pi) phi += two_pi;
    return phi;
}

}  // namespace detail

inline JitterEstimate iq_jitter_estimate(const std::vector<RealWaveform>& ref_records,
                                         double f_ref, double amplitude_threshold = 1e-9) {
    if (ref_records.empty()) throw validation_error("iq_jitter_estimate: no records");
    if (!(f_ref > 0.0)) throw validation_error("iq_jitter_estimate: f_ref must be > 0");

    std::vector<double> phases;
    phases.reserve(ref_records.size());
    for (const RealWaveform& rec : ref_records) {
        validate(rec, "iq_jitter_estimate record");
        const std::size_t n = rec.size();
        const double cycles = f_ref * rec.duration();
        if (cycles < 8.0)
            throw validation_error("iq_jitter_estimate: record spans fewer than 8 reference cycles");
        if (!(f_ref < 0.5 / rec.dt))
            throw validation_error("iq_jitter_estimate: reference above record Nyquist");

        const bool integer_cycles = std::abs(cycles - std::round(cycles)) < 1e-9;
        double i_acc = 0.0, q_acc = 0.0, wsum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double theta = 2.0 * std::numbers::pi * f_ref * static_cast<double>(k) * rec.dt;
            // cosine taper suppresses spectral leakage for non-integer cycle counts
            const double w = integer_cycles
                                 ? 1.0
                                 : 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                                        static_cast<double>(k) / static_cast<double>(n));
            i_acc += w * rec.samples[k] * std::cos(theta);
            q_acc -= w * rec.samples[k] * std::sin(theta);
            wsum += w;
        }
        const double i = 2.0 * i_acc / wsum;
        const double q = 2.0 * q_acc / wsum;
        if (i * i + q * q < amplitude_threshold * amplitude_threshold)
            throw numerical_error("iq_jitter_estimate: reference amplitude below threshold");
        phases.push_back(std::atan2(q, i));
    }

    std::vector<double> sorted = phases;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];

    JitterEstimate est;
    est.f_ref = f_ref;
    est.ambiguity_range = 0.5 / f_ref;
    est.per_record_dt.reserve(phases.size());
    est.near_boundary.reserve(phases.size());
    for (double phi : phases) {
        // atan2(Q, I) of a record delayed by d reads -2*pi*f_ref*d
        const double dt = -detail::wrap_phase(phi - median) / (2.0 * std::numbers::pi * f_ref);
        est.per_record_dt.push_back(dt);
        est.near_boundary.push_back(std::abs(dt) > 0.8 * est.ambiguity_range ? 1 : 0);
    }
    return est;
}

inline RealWaveform iq_jitter_compensate(const std::vector<RealWaveform>& signal_records,
                                         const JitterEstimate& estimate) {
    if (signal_records.empty()) throw validation_error("iq_jitter_compensate: no records");
    if (signal_records.size() != estimate.per_record_dt.size())
        throw validation_error("iq_jitter_compensate: one estimate entry per record required");

    RealWaveform acc;
    for (std::size_t i = 0; i < signal_records.size(); ++i) {
        RealWaveform shifted = fractional_delay(signal_records[i], -estimate.per_record_dt[i]);
        if (i == 0) {
            acc = std::move(shifted);
        } else {
            if (shifted.size() != acc.size())
                throw validation_error("iq_jitter_compensate: records differ in length");
            for (std::size_t k = 0; k < acc.size(); ++k) acc.samples[k] += shifted.samples[k];
        }
    }
    const double inv = 1.0 / static_cast<double>(signal_records.size());
    for (double& v : acc.samples) v *= inv;
    return acc;
}

}  // namespace wavemet
