#include "dvnet/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dvnet/error.hpp"

namespace dvnet {

std::uint8_t GrayImage::at_clamped(long y, long x) const {
    const long yy = std::clamp<long>(y, 0, static_cast<long>(height) - 1);
    const long xx = std::clamp<long>(x, 0, static_cast<long>(width) - 1);
    return pixels[static_cast<std::size_t>(yy) * width + static_cast<std::size_t>(xx)];
}

std::size_t BinaryMask::foreground_count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
}

std::string encode_pgm(const GrayImage& img) {
    std::ostringstream os;
    os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    return os.str();
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const std::string bytes = encode_pgm(img);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

// Skips PGM whitespace and '#' comments, returning the next integer.
std::size_t pgm_int(const std::string& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        throw ParseError("expected integer in PGM header", pos);
    }
    std::size_t value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
        ++pos;
    }
    return value;
}

}  // namespace

GrayImage decode_pgm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw ParseError("not a binary PGM (P5)", 0);
    }
    std::size_t pos = 2;
    const std::size_t w = pgm_int(bytes, pos);
    const std::size_t h = pgm_int(bytes, pos);
    const std::size_t maxval = pgm_int(bytes, pos);
    if (maxval != 255) throw ParseError("unsupported PGM maxval " + std::to_string(maxval), pos);
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw ParseError("missing whitespace after PGM header", pos);
    }
    ++pos;
    if (bytes.size() - pos < w * h) throw ParseError("truncated PGM payload", bytes.size());
    GrayImage img(w, h);
    std::copy_n(reinterpret_cast<const std::uint8_t*>(bytes.data()) + pos, w * h,
                img.pixels.begin());
    return img;
}

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode_pgm(buf.str());
}

void write_mask_pgm(const BinaryMask& mask, const std::string& path) {
    GrayImage img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    write_pgm(img, path);
}

BinaryMask decode_mask_pgm(const std::string& bytes) {
    const GrayImage img = decode_pgm(bytes);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] >= 128 ? 1 : 0;
    return mask;
}

Tensor image_to_tensor(const GrayImage& img) {
    Tensor t({1, img.height, img.width});
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        t[i] = static_cast<double>(img.pixels[i]) / 255.0;
    }
    return t;
}

GrayImage center_crop(const GrayImage& img, std::size_t out_w, std::size_t out_h) {
    if (out_w > img.width || out_h > img.height) {
        throw ShapeError("center_crop: target " + std::to_string(out_w) + "x" +
                         std::to_string(out_h) + " exceeds source " + std::to_string(img.width) +
                         "x" + std::to_string(img.height));
    }
    const std::size_t x0 = (img.width - out_w) / 2;
    const std::size_t y0 = (img.height - out_h) / 2;
    GrayImage out(out_w, out_h);
    for (std::size_t y = 0; y < out_h; ++y) {
        for (std::size_t x = 0; x < out_w; ++x) {
            out.at(y, x) = img.at(y0 + y, x0 + x);
        }
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, std::size_t out_w, std::size_t out_h) {
    if (img.width == 0 || img.height == 0) throw ParamError("resize_bilinear: empty source");
    GrayImage out(out_w, out_h);
    const double sx = static_cast<double>(img.width) / static_cast<double>(out_w);
    const double sy = static_cast<double>(img.height) / static_cast<double>(out_h);
    for (std::size_t y = 0; y < out_h; ++y) {
        const double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
        const long y0 = static_cast<long>(std::floor(fy));
        const double wy = fy - static_cast<double>(y0);
        for (std::size_t x = 0; x < out_w; ++x) {
            const double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
            const long x0 = static_cast<long>(std::floor(fx));
            const double wx = fx - static_cast<double>(x0);
            const double v00 = img.at_clamped(y0, x0);
            const double v01 = img.at_clamped(y0, x0 + 1);
            const double v10 = img.at_clamped(y0 + 1, x0);
            const double v11 = img.at_clamped(y0 + 1, x0 + 1);
            const double v = (1.0 - wy) * ((1.0 - wx) * v00 + wx * v01) +
                             wy * ((1.0 - wx) * v10 + wx * v11);
            out.at(y, x) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return out;
}

}  // namespace dvnet
