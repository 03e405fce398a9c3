#pragma once

#include <complex>
#include <vector>

#include "dvnet/image.hpp"

namespace dvnet {

/// 2-D spectrum of an image, stored DC-centered: bin (height/2, width/2)
/// holds the zero frequency.
struct FreqImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::complex<double>> coeffs;

    FreqImage() = default;
    FreqImage(std::size_t w, std::size_t h) : width(w), height(h), coeffs(w * h) {}

    std::complex<double>& at(std::size_t v, std::size_t u) { return coeffs[v * width + u]; }
    std::complex<double> at(std::size_t v, std::size_t u) const { return coeffs[v * width + u]; }

    std::size_t dc_u() const { return width / 2; }
    std::size_t dc_v() const { return height / 2; }
};

/// In-place 1-D FFT. Radix-2 for power-of-two lengths, Bluestein otherwise,
/// so any extent works. inverse applies the 1/N factor.
void fft_1d(std::vector<std::complex<double>>& data, bool inverse);

/// Unnormalized forward transform (DC bin = pixel sum), DC-centered output.
FreqImage fft2_forward(const GrayImage& img);
/// Inverse with the 1/(H*W) factor; real parts rounded and clamped to 0..255.
GrayImage fft2_inverse(const FreqImage& freq);

/// Real-valued (pre-quantization) inverse, for round-trip error analysis.
std::vector<double> fft2_inverse_real(const FreqImage& freq);

/// Butterworth low-pass gain 1 / (1 + (D/d0)^(2n)).
double butterworth_gain(double distance, double cutoff_d0, unsigned order_n);

/// Multiplies each coefficient by the Butterworth gain at its distance from
/// the centered DC bin.
FreqImage butterworth_lowpass(const FreqImage& freq, double cutoff_d0, unsigned order_n);

}  // namespace dvnet
