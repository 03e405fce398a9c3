#include "dvnet/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dvnet/error.hpp"

namespace dvnet {

GrayImage median_filter(const GrayImage& img, int radius) {
    if (radius < 1) throw ParamError("median_filter: radius must be >= 1");
    GrayImage out(img.width, img.height);
    std::vector<std::uint8_t> window;
    window.reserve(static_cast<std::size_t>(2 * radius + 1) * static_cast<std::size_t>(2 * radius + 1));
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            window.clear();
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    window.push_back(img.at_clamped(static_cast<long>(y) + dy,
                                                    static_cast<long>(x) + dx));
                }
            }
            auto mid = window.begin() + static_cast<long>(window.size() / 2);
            std::nth_element(window.begin(), mid, window.end());
            out.at(y, x) = *mid;
        }
    }
    return out;
}

std::array<std::uint8_t, 256> histogram_equalize_lut(const GrayImage& img) {
    std::array<std::size_t, 256> hist{};
    for (std::uint8_t v : img.pixels) ++hist[v];
    const double n = static_cast<double>(img.pixels.size());
    std::array<std::uint8_t, 256> lut{};
    std::size_t cdf = 0;
    for (int v = 0; v < 256; ++v) {
        cdf += hist[static_cast<std::size_t>(v)];
        lut[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
            std::clamp(std::lround(255.0 * static_cast<double>(cdf) / n), 0L, 255L));
    }
    return lut;
}

GrayImage histogram_equalize(const GrayImage& img) {
    const auto lut = histogram_equalize_lut(img);
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.pixels[i] = lut[img.pixels[i]];
    return out;
}

namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    if (radius < 1) throw ParamError("morphology: disk radius must be >= 1");
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dy * dy + dx * dx <= radius * radius) offsets.emplace_back(dy, dx);
        }
    }
    return offsets;
}

template <bool kMax>
GrayImage morph_extremum(const GrayImage& img, const std::vector<std::pair<int, int>>& offsets) {
    GrayImage out(img.width, img.height);
    const long h = static_cast<long>(img.height), w = static_cast<long>(img.width);
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            std::uint8_t best = kMax ? 0 : 255;
            for (const auto& [dy, dx] : offsets) {
                const long yy = y + dy, xx = x + dx;
                if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                const std::uint8_t v = img.at(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
                if (kMax ? v > best : v < best) best = v;
            }
            out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = best;
        }
    }
    return out;
}

}  // namespace

GrayImage erode_disk(const GrayImage& img, int radius) {
    return morph_extremum<false>(img, disk_offsets(radius));
}

GrayImage dilate_disk(const GrayImage& img, int radius) {
    return morph_extremum<true>(img, disk_offsets(radius));
}

GrayImage morph_open_close(const GrayImage& img, int radius) {
    const auto offsets = disk_offsets(radius);
    GrayImage t = morph_extremum<false>(img, offsets);   // erode
    t = morph_extremum<true>(t, offsets);                // dilate -> opened
    t = morph_extremum<true>(t, offsets);                // dilate
    t = morph_extremum<false>(t, offsets);               // erode  -> closed
    return t;
}

BinaryMask morph_open_close(const BinaryMask& mask, int radius) {
    GrayImage img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    img = morph_open_close(img, radius);
    BinaryMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < out.bits.size(); ++i) out.bits[i] = img.pixels[i] >= 128 ? 1 : 0;
    return out;
}

int otsu_threshold(const GrayImage& img) {
    std::array<double, 256> hist{};
    for (std::uint8_t v : img.pixels) hist[v] += 1.0;
    const double total = static_cast<double>(img.pixels.size());
    double sum_all = 0.0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[static_cast<std::size_t>(v)];

    // classes {v < t} vs {v >= t}; ties resolved to the lowest t, and a
    // degenerate (single-level) histogram leaves everything background
    int best_t = 255;
    double best_var = 0.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 1; t < 256; ++t) {
        w0 += hist[static_cast<std::size_t>(t - 1)];
        sum0 += static_cast<double>(t - 1) * hist[static_cast<std::size_t>(t - 1)];
        const double w1 = total - w0;
        if (w0 <= 0.0 || w1 <= 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    return best_t;
}

BinaryMask binarize_otsu(const GrayImage& img) {
    const int t = otsu_threshold(img);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        mask.bits[i] = static_cast<int>(img.pixels[i]) > t ? 1 : 0;
    }
    return mask;
}

namespace {

template <typename Fn>
auto pipeline_stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error("roi_pipeline stage '" + std::string(name) + "': " + e.what());
    }
}

}  // namespace

PipelineResult roi_pipeline(const GrayImage& img, const PipelineParams& params) {
    GrayImage work = pipeline_stage("median", [&] { return median_filter(img, params.median_radius); });
    work = pipeline_stage("equalize", [&] { return histogram_equalize(work); });
    work = pipeline_stage("butterworth", [&] {
        const double d0 = params.butterworth_d0_frac *
                          static_cast<double>(std::min(work.width, work.height));
        FreqImage freq = fft2_forward(work);
        freq = butterworth_lowpass(freq, d0, params.butterworth_order);
        return fft2_inverse(freq);
    });
    work = pipeline_stage("morphology", [&] { return morph_open_close(work, params.disk_radius); });
    BinaryMask mask = pipeline_stage("binarize", [&] { return binarize_otsu(work); });

    // Lesions are hypoechoic (dark on a bright background), so the raw
    // ">threshold" mask usually marks the background; orient by border vote.
    std::size_t ring = 0, ring_fg = 0;
    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x) {
            if (y == 0 || y + 1 == mask.height || x == 0 || x + 1 == mask.width) {
                ++ring;
                ring_fg += mask.at(y, x);
            }
        }
    }
    if (2 * ring_fg > ring) {
        for (auto& b : mask.bits) b = b ? 0 : 1;
    }
    return {std::move(work), std::move(mask)};
}

}  // namespace dvnet
