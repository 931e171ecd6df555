#pragma once

// Thin wrapper over FFTW's complex 1-d transform. Plan creation is not
// thread-safe in FFTW, so it is serialized here; execution is not.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

namespace wavemet::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// sign: FFTW_FORWARD (-1) or FFTW_BACKWARD (+1). Unnormalized either way.
inline void fft_execute(const std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out, int sign) {
    const std::size_t n = in.size();
    out.resize(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
}

inline std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out;
    fft_execute(in, out, FFTW_FORWARD);
    return out;
}

inline std::vector<std::complex<double>> ifft_unscaled(const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out;
    fft_execute(in, out, FFTW_BACKWARD);
    return out;
}

}  // namespace wavemet::detail
