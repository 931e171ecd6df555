#pragma once

// Scaled, time-shifted common-mode rejection ratio of a balanced
// photodetector:
//
//   cmrr_db(f) = 20*log10( |a*exp(-j*w*tau)*Vp(f) - Vn(f)|
//                        / |a*exp(-j*w*tau)*Vp(f) + Vn(f)| )
//
// tau is the time shift applied to the positive arm (a delayed positive arm
// matches a delayed negative-arm response with tau > 0). The (a, tau) pair is
// found ratiometrically: each band bin contributes its arm ratio
// r_k = Vn_k / Vp_k with unit weight, and J(a,tau) =
// sum_band |a*exp(-j*w*tau) - r_k|^2 is minimized (a closed-form for fixed
// tau, tau by coarse grid + golden section + Newton polish). Because any
// response common to both arms cancels out of r_k before the fit, the
// optimum is invariant under common filtering.
//
// Good matching gives large negative cmrr_db; rejection_db = -cmrr_db is the
// conventional positive figure and is what summaries quote.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "wavemet/transform.hpp"
#include "wavemet/waveform.hpp"

namespace wavemet {

struct Band {
    double f_lo = 0.0;
    double f_hi = 0.0;
};

// Default analysis band excludes DC leakage and the roll-off near Nyquist.
inline Band default_band(double dt) {
    const double f_nyq = 0.5 / dt;
    return Band{0.05 * f_nyq, 0.8 * f_nyq};
}

struct AlignmentParams {
    double alpha = 1.0;     // dimensionless, > 0
    double tau = 0.0;       // seconds
    double residual = 0.0;  // summed squared ratio misfit at the optimum
    bool boundary_warning = false;  // tau search hit the window edge
};

struct CmrrTrace {
    std::vector<double> freqs;         // Hz
    std::vector<double> cmrr_db;       // negative for good matching
    std::vector<double> rejection_db;  // -cmrr_db
    std::vector<std::uint8_t> floor_mask;  // bin clamped at the numerical floor
};

constexpr double kCmrrFloorDb = -300.0;
constexpr double kAlphaFloor = 1e-12;

namespace detail {

inline std::vector<std::size_t> band_indices(const Spectrum& s, const Band& band) {
    if (!(band.f_hi > band.f_lo)) throw validation_error("cmrr: empty band");
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double f = s.frequency(k);
        if (f >= band.f_lo && f <= band.f_hi) idx.push_back(k);
    }
    if (idx.empty()) throw validation_error("cmrr: band contains no spectral bins");
    return idx;
}

struct AlignObjective {
    std::vector<double> omega;
    std::vector<cplx> c;  // arm ratio r_k = Vn_k / Vp_k
    double pp = 0.0;      // number of contributing bins (unit weights)
    double pn = 0.0;      // sum |r_k|^2

    double correlation(double tau) const {  // R(tau) = Re sum c_k exp(j w tau)
        double r = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double ph = omega[i] * tau;
            r += c[i].real() * std::cos(ph) - c[i].imag() * std::sin(ph);
        }
        return r;
    }
    // d/dtau and d2/dtau2 of R, for Newton polish of the stationarity condition
    void derivatives(double tau, double& r1, double& r2) const {
        r1 = 0.0;
        r2 = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double ph = omega[i] * tau;
            const double re = c[i].real() * std::cos(ph) - c[i].imag() * std::sin(ph);
            const double im = c[i].real() * std::sin(ph) + c[i].imag() * std::cos(ph);
            r1 -= omega[i] * im;
            r2 -= omega[i] * omega[i] * re;
        }
    }
    double objective(double tau) const {  // J at the inner-optimal alpha
        const double r = std::max(correlation(tau), 0.0);
        return pn - r * r / pp;
    }
};

// Integer-lag seed from the circular cross-correlation of the two records,
// restricted to the analysis band.
inline double cross_correlation_seed(const Spectrum& vp, const Spectrum& vn,
                                     const std::vector<std::size_t>& idx) {
    const std::size_t n = vp.length_meta;
    if (n < 2) return 0.0;
    std::vector<cplx> r(n, cplx(0.0, 0.0));
    for (std::size_t k : idx) {
        const cplx v = std::conj(vp.bins[k]) * vn.bins[k];
        r[k] = v;
        if (vp.sided == Sidedness::single_sided && k != 0 && k != n - k) r[n - k] = std::conj(v);
    }
    const std::vector<cplx> corr = ifft_unscaled(r);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t l = 0; l < n; ++l) {
        const double m = std::abs(corr[l]);
        if (m > best_mag) { best_mag = m; best = l; }
    }
    const double lag = (best <= n / 2) ? static_cast<double>(best)
                                       : static_cast<double>(best) - static_cast<double>(n);
    const double dt = 1.0 / (static_cast<double>(n) * vp.df);
    return lag * dt;
}

}  // namespace detail

inline AlignmentParams optimize_alignment(const Spectrum& vp, const Spectrum& vn,
                                          const Band& band, double tau_window) {
    validate(vp, "optimize_alignment Vp");
    validate(vn, "optimize_alignment Vn");
    if (!same_grid(vp, vn)) throw validation_error("optimize_alignment: spectral grids differ");
    if (!(tau_window > 0.0)) throw validation_error("optimize_alignment: tau_window must be > 0");
    const std::vector<std::size_t> idx = detail::band_indices(vp, band);

    double vp_max = 0.0;
    for (std::size_t k : idx) vp_max = std::max(vp_max, std::abs(vp.bins[k]));
    if (vp_max <= 0.0) throw validation_error("optimize_alignment: positive arm has zero band power");
    const double vp_min = 1e-9 * vp_max;  // bins with no positive-arm signal carry no ratio

    detail::AlignObjective obj;
    obj.omega.reserve(idx.size());
    obj.c.reserve(idx.size());
    for (std::size_t k : idx) {
        if (std::abs(vp.bins[k]) < vp_min) continue;
        obj.omega.push_back(2.0 * std::numbers::pi * vp.frequency(k));
        obj.c.push_back(vn.bins[k] / vp.bins[k]);
        obj.pp += 1.0;
        obj.pn += std::norm(obj.c.back());
    }

    // coarse grid, seeded by the cross-correlation peak; smallest tau wins ties
    const double step = 1.0 / (8.0 * band.f_hi);
    double best_tau = 0.0;
    double best_j = std::numeric_limits<double>::infinity();
    auto consider = [&](double tau) {
        const double j = obj.objective(tau);
        if (j < best_j) { best_j = j; best_tau = tau; }
    };
    for (double tau = -tau_window; tau <= tau_window + 0.5 * step; tau += step)
        consider(std::min(tau, tau_window));
    const double seed = detail::cross_correlation_seed(vp, vn, idx);
    if (std::abs(seed) <= tau_window) consider(seed);

    // golden-section refinement of J around the coarse minimum
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(best_tau - step, -tau_window);
    double hi = std::min(best_tau + step, tau_window);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = obj.objective(x1), f2 = obj.objective(x2);
    while (hi - lo > 1e-18 + 1e-15 * std::abs(lo)) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = obj.objective(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = obj.objective(x2);
        }
    }
    double tau = 0.5 * (lo + hi);

    // Newton polish on R'(tau) = 0; bail out if it stops improving
    double r1, r2;
    for (int it = 0; it < 12; ++it) {
        obj.derivatives(tau, r1, r2);
        if (r2 >= 0.0) break;  // not a maximum of R here
        const double delta = r1 / r2;
        const double cand = tau - delta;
        if (std::abs(cand) > tau_window) break;
        tau = cand;
        if (std::abs(delta) < 1e-24) break;
    }

    AlignmentParams out;
    out.tau = tau;
    out.alpha = std::max(obj.correlation(tau) / obj.pp, kAlphaFloor);
    out.residual = std::max(obj.pn - 2.0 * out.alpha * obj.correlation(tau) +
                                out.alpha * out.alpha * obj.pp,
                            0.0);
    out.boundary_warning = std::abs(tau) > tau_window - step;
    return out;
}

inline CmrrTrace cmrr_spectrum(const Spectrum& vp, const Spectrum& vn,
                               const AlignmentParams& params, const Band& band) {
    validate(vp, "cmrr_spectrum Vp");
    validate(vn, "cmrr_spectrum Vn");
    if (!same_grid(vp, vn)) throw validation_error("cmrr_spectrum: spectral grids differ");
    const std::vector<std::size_t> idx = detail::band_indices(vp, band);

    std::vector<cplx> num(idx.size()), den(idx.size());
    double den_max = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::size_t k = idx[i];
        const double w = 2.0 * std::numbers::pi * vp.frequency(k);
        const cplx aligned = params.alpha * std::polar(1.0, -w * params.tau) * vp.bins[k];
        num[i] = aligned - vn.bins[k];
        den[i] = aligned + vn.bins[k];
        den_max = std::max(den_max, std::abs(den[i]));
    }
    const double eps_den = 1e-12 * den_max;
    const double floor_ratio = std::pow(10.0, kCmrrFloorDb / 20.0);

    CmrrTrace trace;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double d = std::abs(den[i]);
        if (d < eps_den) continue;  // excluded: denominator numerically zero
        const double ratio = std::abs(num[i]) / d;
        double db;
        bool clamped = false;
        if (ratio < floor_ratio) {
            db = kCmrrFloorDb;
            clamped = true;
        } else {
            db = 20.0 * std::log10(ratio);
        }
        trace.freqs.push_back(vp.frequency(idx[i]));
        trace.cmrr_db.push_back(db);
        trace.rejection_db.push_back(-db);
        trace.floor_mask.push_back(clamped ? 1 : 0);
    }
    if (trace.freqs.empty())
        throw numerical_error("cmrr_spectrum: every band bin excluded by the denominator guard");
    return trace;
}

struct CmrrSummary {
    double min_rejection_db = 0.0;
    double median_rejection_db = 0.0;
    double alpha_dc = 0.0;  // DC photocurrent balance, sum(Vp)/sum(Vn)
};

struct CmrrReport {
    AlignmentParams params;
    CmrrTrace trace;
    CmrrSummary summary;
};

inline CmrrReport cmrr_report(const RealWaveform& vp_t, const RealWaveform& vn_t,
                              const Band& band, double tau_window) {
    validate(vp_t, "cmrr_report Vp");
    validate(vn_t, "cmrr_report Vn");
    if (vp_t.size() != vn_t.size() || std::abs(vp_t.dt - vn_t.dt) > 1e-12 * vp_t.dt)
        throw validation_error("cmrr_report: records must share dt and length");

    const Spectrum vp = forward_transform(vp_t);
    const Spectrum vn = forward_transform(vn_t);
    CmrrReport rep;
    rep.params = optimize_alignment(vp, vn, band, tau_window);
    rep.trace = cmrr_spectrum(vp, vn, rep.params, band);

    std::vector<double> rej = rep.trace.rejection_db;
    std::sort(rej.begin(), rej.end());
    rep.summary.min_rejection_db = rej.front();
    rep.summary.median_rejection_db = rej[rej.size() / 2];
    double sp = 0.0, sn = 0.0;
    for (double v : vp_t.samples) sp += v;
    for (double v : vn_t.samples) sn += v;
    rep.summary.alpha_dc = (sn != 0.0) ? sp / sn : std::numeric_limits<double>::infinity();
    return rep;
}

}  // namespace wavemet
