#include "srrc/fft.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace srrc {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse
// (inverse here is unscaled; callers apply 1/L).
void fft_pow2(std::vector<cdouble>& a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;

    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble u = a[i + k];
                cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Bluestein chirp-z transform for arbitrary length. Expresses the DFT as a
// linear convolution against the chirp exp(+i*pi*t^2/L), evaluated with a
// zero-padded power-of-two FFT. t^2 is reduced mod 2L in exact integer
// arithmetic to keep the chirp angles accurate for long inputs.
std::vector<cdouble> bluestein(const std::vector<cdouble>& x, int sign) {
    const std::size_t n = x.size();
    const std::size_t m = next_pow2(2 * n - 1);

    std::vector<cdouble> chirp(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::uint64_t t2 = (static_cast<std::uint64_t>(t) * t) %
                                 (2 * static_cast<std::uint64_t>(n));
        const double ang =
            sign * std::numbers::pi * static_cast<double>(t2) / static_cast<double>(n);
        chirp[t] = cdouble(std::cos(ang), std::sin(ang));
    }

    std::vector<cdouble> a(m, cdouble(0.0, 0.0));
    std::vector<cdouble> b(m, cdouble(0.0, 0.0));
    for (std::size_t t = 0; t < n; ++t) a[t] = x[t] * chirp[t];
    b[0] = std::conj(chirp[0]);
    for (std::size_t t = 1; t < n; ++t) b[t] = b[m - t] = std::conj(chirp[t]);

    fft_pow2(a, -1);
    fft_pow2(b, -1);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    fft_pow2(a, +1);

    std::vector<cdouble> out(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t f = 0; f < n; ++f) out[f] = a[f] * chirp[f] * scale;
    return out;
}

std::vector<cdouble> transform(const std::vector<cdouble>& x, int sign) {
    if (x.empty()) throw std::invalid_argument("dft: empty input");
    if (is_pow2(x.size())) {
        std::vector<cdouble> a = x;
        fft_pow2(a, sign);
        return a;
    }
    return bluestein(x, sign);
}

} // namespace

std::vector<cdouble> dft(const std::vector<cdouble>& x) { return transform(x, -1); }

std::vector<cdouble> idft(const std::vector<cdouble>& X) {
    std::vector<cdouble> out = transform(X, +1);
    const double scale = 1.0 / static_cast<double>(X.size());
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace srrc
