#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace redcsd {

/**
 * Periodogram |N^{-1/2} sum_k e^{-i w k} x_k|^2 on the Fourier frequencies
 * w_l = 2 pi l / N, l = 1 .. floor((N - 1) / 2).  The zero frequency and,
 * for even N, the Nyquist bin are excluded.  With block_size b > 1,
 * consecutive groups of b bins are averaged (frequency and power); a short
 * trailing group is kept.
 */
struct Periodogram {
    std::vector<double> frequencies;
    std::vector<double> power;
    std::size_t block_size = 1;

    std::size_t size() const noexcept { return power.size(); }
};

Periodogram periodogram(std::span<const double> x, std::size_t block_size = 1);

/// Averages consecutive groups of `block_size` bins.
Periodogram smooth(const Periodogram& raw, std::size_t block_size);

}  // namespace redcsd
