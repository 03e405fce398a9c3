#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dvnet/tensor.hpp"

namespace dvnet {

/// Row-major 8-bit grayscale image.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(w * h, fill) {}

    std::uint8_t& at(std::size_t y, std::size_t x) { return pixels[y * width + x]; }
    std::uint8_t at(std::size_t y, std::size_t x) const { return pixels[y * width + x]; }

    /// Clamp-to-edge lookup; the border policy used by every window op.
    std::uint8_t at_clamped(long y, long x) const;

    bool operator==(const GrayImage& other) const = default;
};

/// Bit mask with the extents of its source image. 0 background, 1 lesion.
struct BinaryMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(std::size_t w, std::size_t h) : width(w), height(h), bits(w * h, 0) {}

    std::uint8_t& at(std::size_t y, std::size_t x) { return bits[y * width + x]; }
    std::uint8_t at(std::size_t y, std::size_t x) const { return bits[y * width + x]; }

    std::size_t foreground_count() const;

    bool operator==(const BinaryMask& other) const = default;
};

/// Binary PGM (P5, maxval 255), bit-exact round trip.
void write_pgm(const GrayImage& img, const std::string& path);
GrayImage read_pgm(const std::string& path);
std::string encode_pgm(const GrayImage& img);
GrayImage decode_pgm(const std::string& bytes);

/// Masks are written as PGM with {0, 255}.
void write_mask_pgm(const BinaryMask& mask, const std::string& path);
BinaryMask decode_mask_pgm(const std::string& bytes);

/// [1,H,W] tensor with intensities scaled to [0,1]; the network ingestion
/// format.
Tensor image_to_tensor(const GrayImage& img);

GrayImage center_crop(const GrayImage& img, std::size_t out_w, std::size_t out_h);
GrayImage resize_bilinear(const GrayImage& img, std::size_t out_w, std::size_t out_h);

}  // namespace dvnet
