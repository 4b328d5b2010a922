#include "redcsd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "redcsd/error.hpp"

namespace redcsd {

namespace {

// Planner calls are not reentrant in FFTW; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

Periodogram periodogram(std::span<const double> x, std::size_t block_size) {
    const std::size_t n = x.size();
    if (n < 3) {
        throw DomainError("periodogram needs at least three samples");
    }
    if (block_size == 0) {
        throw DomainError("block size must be at least one");
    }
    const std::size_t n_freq = (n - 1) / 2;
    const std::size_t n_out = n / 2 + 1;

    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_out)));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan);

    Periodogram raw;
    raw.frequencies.resize(n_freq);
    raw.power.resize(n_freq);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t l = 1; l <= n_freq; ++l) {
        const double re = out.get()[l][0];
        const double im = out.get()[l][1];
        raw.frequencies[l - 1] = 2.0 * std::numbers::pi * static_cast<double>(l) * inv_n;
        raw.power[l - 1] = (re * re + im * im) * inv_n;
    }
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return block_size == 1 ? raw : smooth(raw, block_size);
}

Periodogram smooth(const Periodogram& raw, std::size_t block_size) {
    if (block_size == 0) {
        throw DomainError("block size must be at least one");
    }
    Periodogram out;
    out.block_size = raw.block_size * block_size;
    for (std::size_t i = 0; i < raw.size(); i += block_size) {
        const std::size_t end = std::min(raw.size(), i + block_size);
        double f = 0.0;
        double p = 0.0;
        for (std::size_t k = i; k < end; ++k) {
            f += raw.frequencies[k];
            p += raw.power[k];
        }
        const auto cnt = static_cast<double>(end - i);
        out.frequencies.push_back(f / cnt);
        out.power.push_back(p / cnt);
    }
    return out;
}

}  // namespace redcsd
