#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace polc {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT, forward convention X_m = sum_j x_j e^{-2pi i mj/n}.
// The inverse applies the conjugate kernel and the 1/n factor. Power-of-two
// sizes only — that is all the spectral propagator ever uses, and it keeps the
// implementation small enough to verify against a naive DFT in the tests.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft size must be a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {  // bit-reversal permutation
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // One table of n/2 twiddles, each from std::polar directly (no
    // incremental multiplication, so no accumulated phase drift); smaller
    // stages index it by stride.
    const double sgn = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> tw(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j)
        tw[j] = std::polar(1.0, sgn * 2.0 * std::numbers::pi *
                                     (static_cast<double>(j) / static_cast<double>(n)));

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const std::complex<double> u = a[base + j];
                const std::complex<double> v = a[base + j + half] * tw[j * stride];
                a[base + j] = u + v;
                a[base + j + half] = u - v;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= scale;
    }
}

}  // namespace polc
