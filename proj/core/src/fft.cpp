#include "dvnet/fft.hpp"

#include <algorithm>
#include <cmath>

#include "dvnet/error.hpp"

namespace dvnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey, forward (e^{-i...}) only.
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein chirp-z, forward transform of arbitrary length.
void fft_bluestein(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    const std::size_t m = next_pow2(2 * n - 1);
    // chirp w_k = exp(-i pi k^2 / n); k^2 taken mod 2n keeps angles exact
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double angle = -kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = {std::cos(angle), std::sin(angle)};
    }
    std::vector<std::complex<double>> fa(m), fb(m);
    for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
    fb[0] = {1.0, 0.0};
    for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(chirp[k]);
    fft_radix2(fa);
    fft_radix2(fb);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
    // inverse radix-2 via conjugation
    for (auto& v : fa) v = std::conj(v);
    fft_radix2(fa);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = std::conj(fa[k]) * inv_m * chirp[k];
}

void fft_forward(std::vector<std::complex<double>>& a) {
    if (a.size() <= 1) return;
    if (is_pow2(a.size())) {
        fft_radix2(a);
    } else {
        fft_bluestein(a);
    }
}

}  // namespace

void fft_1d(std::vector<std::complex<double>>& data, bool inverse) {
    if (!inverse) {
        fft_forward(data);
        return;
    }
    for (auto& v : data) v = std::conj(v);
    fft_forward(data);
    const double inv_n = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v = std::conj(v) * inv_n;
}

namespace {

// natural-order <-> DC-centered index mapping (bijective for any extent)
std::size_t shifted_index(std::size_t v, std::size_t u, std::size_t h, std::size_t w) {
    return ((v + h / 2) % h) * w + (u + w / 2) % w;
}

std::vector<std::complex<double>> fft2_rows_cols(std::vector<std::complex<double>> grid,
                                                 std::size_t w, std::size_t h, bool inverse) {
    std::vector<std::complex<double>> line;
    for (std::size_t y = 0; y < h; ++y) {
        line.assign(grid.begin() + static_cast<long>(y * w), grid.begin() + static_cast<long>((y + 1) * w));
        fft_1d(line, inverse);
        std::copy(line.begin(), line.end(), grid.begin() + static_cast<long>(y * w));
    }
    line.resize(h);
    for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t y = 0; y < h; ++y) line[y] = grid[y * w + x];
        fft_1d(line, inverse);
        for (std::size_t y = 0; y < h; ++y) grid[y * w + x] = line[y];
    }
    return grid;
}

}  // namespace

FreqImage fft2_forward(const GrayImage& img) {
    const std::size_t w = img.width, h = img.height;
    std::vector<std::complex<double>> grid(w * h);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = static_cast<double>(img.pixels[i]);
    grid = fft2_rows_cols(std::move(grid), w, h, false);
    FreqImage freq(w, h);
    for (std::size_t v = 0; v < h; ++v) {
        for (std::size_t u = 0; u < w; ++u) {
            freq.coeffs[shifted_index(v, u, h, w)] = grid[v * w + u];
        }
    }
    return freq;
}

std::vector<double> fft2_inverse_real(const FreqImage& freq) {
    const std::size_t w = freq.width, h = freq.height;
    std::vector<std::complex<double>> grid(w * h);
    for (std::size_t v = 0; v < h; ++v) {
        for (std::size_t u = 0; u < w; ++u) {
            grid[v * w + u] = freq.coeffs[shifted_index(v, u, h, w)];
        }
    }
    grid = fft2_rows_cols(std::move(grid), w, h, true);
    std::vector<double> out(w * h);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid[i].real();
    return out;
}

GrayImage fft2_inverse(const FreqImage& freq) {
    const std::vector<double> real = fft2_inverse_real(freq);
    GrayImage img(freq.width, freq.height);
    for (std::size_t i = 0; i < real.size(); ++i) {
        img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(real[i]), 0L, 255L));
    }
    return img;
}

double butterworth_gain(double distance, double cutoff_d0, unsigned order_n) {
    if (cutoff_d0 <= 0.0) throw ParamError("butterworth: cutoff d0 must be > 0");
    if (order_n < 1) throw ParamError("butterworth: order must be >= 1");
    const double ratio = distance / cutoff_d0;
    return 1.0 / (1.0 + std::pow(ratio, 2.0 * static_cast<double>(order_n)));
}

FreqImage butterworth_lowpass(const FreqImage& freq, double cutoff_d0, unsigned order_n) {
    if (cutoff_d0 <= 0.0) throw ParamError("butterworth: cutoff d0 must be > 0");
    if (order_n < 1) throw ParamError("butterworth: order must be >= 1");
    FreqImage out = freq;
    const double cu = static_cast<double>(freq.dc_u());
    const double cv = static_cast<double>(freq.dc_v());
    for (std::size_t v = 0; v < freq.height; ++v) {
        for (std::size_t u = 0; u < freq.width; ++u) {
            const double du = static_cast<double>(u) - cu;
            const double dv = static_cast<double>(v) - cv;
            out.at(v, u) *= butterworth_gain(std::sqrt(du * du + dv * dv), cutoff_d0, order_n);
        }
    }
    return out;
}

}  // namespace dvnet
