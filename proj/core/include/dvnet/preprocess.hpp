#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dvnet/fft.hpp"
#include "dvnet/image.hpp"

namespace dvnet {

/// Window median with clamp-to-edge borders. radius >= 1; window (2r+1)^2.
GrayImage median_filter(const GrayImage& img, int radius);

/// 256-entry lookup table h(v) = round(255 * cdf(v) / N). Monotone
/// nondecreasing; a single-level image maps to 255.
std::array<std::uint8_t, 256> histogram_equalize_lut(const GrayImage& img);
GrayImage histogram_equalize(const GrayImage& img);

/// Grayscale erosion/dilation with a discrete disk of the given radius;
/// offsets outside the image are ignored (equivalent to clamp-to-edge for
/// min/max windows).
GrayImage erode_disk(const GrayImage& img, int radius);
GrayImage dilate_disk(const GrayImage& img, int radius);

/// Opening (erode, dilate) then closing (dilate, erode). Idempotent.
GrayImage morph_open_close(const GrayImage& img, int radius);
BinaryMask morph_open_close(const BinaryMask& mask, int radius);

/// Threshold maximizing between-class variance; ties resolved to the lowest
/// threshold. A single-level histogram yields 255 (everything background).
int otsu_threshold(const GrayImage& img);
/// pixels > threshold -> 1.
BinaryMask binarize_otsu(const GrayImage& img);

struct PipelineParams {
    int median_radius = 1;
    double butterworth_d0_frac = 0.25;  // d0 = frac * min(H, W)
    unsigned butterworth_order = 2;
    int disk_radius = 1;
};

struct PipelineResult {
    GrayImage enhanced;  // image as it entered binarization
    BinaryMask shape;    // oriented so 1 = lesion
};

/// The ROI enhancement chain: median filter, histogram equalization,
/// frequency-domain Butterworth low-pass, morphological open/close,
/// Otsu binarization. The raw Otsu mask marks the brighter side; when the
/// image-border majority comes out foreground the mask is inverted so that
/// 1 = the interior (lesion) region.
PipelineResult roi_pipeline(const GrayImage& img, const PipelineParams& params);

}  // namespace dvnet
