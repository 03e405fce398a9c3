#include "dvnet/features.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dvnet/error.hpp"

namespace dvnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Gradients {
    std::vector<double> gx, gy;
};

Gradients central_gradients(const GrayImage& img) {
    Gradients g{std::vector<double>(img.pixels.size()), std::vector<double>(img.pixels.size())};
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const long ly = static_cast<long>(y), lx = static_cast<long>(x);
            g.gx[y * img.width + x] = static_cast<double>(img.at_clamped(ly, lx + 1)) -
                                      static_cast<double>(img.at_clamped(ly, lx - 1));
            g.gy[y * img.width + x] = static_cast<double>(img.at_clamped(ly + 1, lx)) -
                                      static_cast<double>(img.at_clamped(ly - 1, lx));
        }
    }
    return g;
}

}  // namespace

const char* descriptor_name(DescriptorId id) {
    switch (id) {
        case DescriptorId::HGD: return "HGD";
        case DescriptorId::HOG: return "HOG";
        case DescriptorId::GLCM: return "GLCM";
        case DescriptorId::CNN1: return "CNN1";
        case DescriptorId::CNN2: return "CNN2";
        case DescriptorId::FUSED: return "FUSED";
    }
    return "?";
}

FeatureVector hog_descriptor(const GrayImage& img, const HogParams& params) {
    if (params.cell == 0 || params.bins == 0 || params.block == 0) {
        throw ParamError("hog_descriptor: cell, bins and block must be positive");
    }
    if (img.width % params.cell != 0 || img.height % params.cell != 0) {
        throw ParamError("hog_descriptor: image " + std::to_string(img.width) + "x" +
                         std::to_string(img.height) + " not divisible by cell " +
                         std::to_string(params.cell));
    }
    const std::size_t cells_x = img.width / params.cell;
    const std::size_t cells_y = img.height / params.cell;
    if (cells_x < params.block || cells_y < params.block) {
        throw ParamError("hog_descriptor: too few cells for block size");
    }

    const Gradients g = central_gradients(img);
    std::vector<double> cell_hist(cells_x * cells_y * params.bins, 0.0);
    const double bin_width = kPi / static_cast<double>(params.bins);
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < img.width; ++x) {
            const double gx = g.gx[y * img.width + x];
            const double gy = g.gy[y * img.width + x];
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += kPi;        // unsigned orientation
            if (theta >= kPi) theta -= kPi;
            // linear interpolation between the two nearest bin centers
            const double pos = theta / bin_width - 0.5;
            double lower = std::floor(pos);
            const double frac = pos - lower;
            const std::size_t nb = params.bins;
            const std::size_t b0 = static_cast<std::size_t>((static_cast<long>(lower) % static_cast<long>(nb) + static_cast<long>(nb))) % nb;
            const std::size_t b1 = (b0 + 1) % nb;
            const std::size_t cell_idx = (y / params.cell) * cells_x + (x / params.cell);
            cell_hist[cell_idx * nb + b0] += mag * (1.0 - frac);
            cell_hist[cell_idx * nb + b1] += mag * frac;
        }
    }

    const std::size_t blocks_x = cells_x - params.block + 1;
    const std::size_t blocks_y = cells_y - params.block + 1;
    const std::size_t block_len = params.block * params.block * params.bins;
    FeatureVector out;
    out.descriptor_id = DescriptorId::HOG;
    out.values.reserve(blocks_x * blocks_y * block_len);
    std::vector<double> block(block_len);
    for (std::size_t by = 0; by < blocks_y; ++by) {
        for (std::size_t bx = 0; bx < blocks_x; ++bx) {
            std::size_t k = 0;
            double sq = 0.0;
            for (std::size_t cy = 0; cy < params.block; ++cy) {
                for (std::size_t cx = 0; cx < params.block; ++cx) {
                    const std::size_t cell_idx = (by + cy) * cells_x + (bx + cx);
                    for (std::size_t b = 0; b < params.bins; ++b, ++k) {
                        block[k] = cell_hist[cell_idx * params.bins + b];
                        sq += block[k] * block[k];
                    }
                }
            }
            const double inv_norm = 1.0 / std::sqrt(sq + 1e-6 * 1e-6);
            for (double v : block) out.values.push_back(v * inv_norm);
        }
    }
    return out;
}

std::vector<double> glcm_matrix(const GrayImage& img, std::size_t levels, int dr, int dc) {
    if (levels < 2 || levels > 256) throw ParamError("glcm_matrix: levels must be in [2,256]");
    const long h = static_cast<long>(img.height), w = static_cast<long>(img.width);
    std::vector<double> matrix(levels * levels, 0.0);
    double total = 0.0;
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            const long yy = y + dr, xx = x + dc;
            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
            const std::size_t a =
                static_cast<std::size_t>(img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x))) * levels / 256;
            const std::size_t b =
                static_cast<std::size_t>(img.at(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx))) * levels / 256;
            matrix[a * levels + b] += 1.0;
            matrix[b * levels + a] += 1.0;  // symmetric
            total += 2.0;
        }
    }
    if (total > 0.0) {
        for (double& v : matrix) v /= total;
    }
    return matrix;
}

FeatureVector glcm_features(const GrayImage& img, std::size_t levels) {
    static constexpr int kOffsets[4][2] = {{0, 1}, {1, 1}, {1, 0}, {1, -1}};
    FeatureVector out;
    out.descriptor_id = DescriptorId::GLCM;
    for (const auto& offset : kOffsets) {
        const std::vector<double> matrix = glcm_matrix(img, levels, offset[0], offset[1]);
        double contrast = 0.0, energy = 0.0, homogeneity = 0.0;
        double mean = 0.0;
        for (std::size_t i = 0; i < levels; ++i) {
            for (std::size_t j = 0; j < levels; ++j) {
                const double p = matrix[i * levels + j];
                const double d = static_cast<double>(i) - static_cast<double>(j);
                contrast += d * d * p;
                energy += p * p;
                homogeneity += p / (1.0 + std::abs(d));
                mean += static_cast<double>(i) * p;
            }
        }
        double var = 0.0;
        for (std::size_t i = 0; i < levels; ++i) {
            for (std::size_t j = 0; j < levels; ++j) {
                const double p = matrix[i * levels + j];
                var += (static_cast<double>(i) - mean) * (static_cast<double>(i) - mean) * p;
            }
        }
        double correlation = 0.0;
        if (var > 1e-12) {
            for (std::size_t i = 0; i < levels; ++i) {
                for (std::size_t j = 0; j < levels; ++j) {
                    correlation += (static_cast<double>(i) - mean) * (static_cast<double>(j) - mean) *
                                   matrix[i * levels + j];
                }
            }
            correlation /= var;  // symmetric matrix: sigma_i == sigma_j
        }
        out.values.push_back(contrast);
        out.values.push_back(correlation);
        out.values.push_back(energy);
        out.values.push_back(homogeneity);
    }
    return out;
}

FeatureVector hgd_descriptor(const GrayImage& img, std::size_t bins) {
    if (bins < 1) throw ParamError("hgd_descriptor: bins must be >= 1");
    const Gradients g = central_gradients(img);
    FeatureVector out;
    out.descriptor_id = DescriptorId::HGD;
    out.values.assign(bins, 0.0);
    const double bin_width = 2.0 * kPi / static_cast<double>(bins);
    double total = 0.0;
    for (std::size_t i = 0; i < g.gx.size(); ++i) {
        const double mag = std::sqrt(g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i]);
        if (mag == 0.0) continue;
        double theta = std::atan2(g.gy[i], g.gx[i]);  // signed, (-pi, pi]
        if (theta < 0.0) theta += 2.0 * kPi;
        std::size_t bin = static_cast<std::size_t>(theta / bin_width);
        if (bin >= bins) bin = bins - 1;
        out.values[bin] += mag;
        total += mag;
    }
    if (total > 0.0) {
        for (double& v : out.values) v /= total;
    }
    return out;
}

FeatureVector cnn_penultimate_features(const Network& net, const GrayImage& img) {
    if (net.n_inputs() != 1) {
        throw ShapeError("cnn_penultimate_features: network must be single-branch");
    }
    const auto& in = net.arch().input;
    if (img.height != in[1] || img.width != in[2]) {
        throw ShapeError("cnn_penultimate_features: image " + std::to_string(img.width) + "x" +
                         std::to_string(img.height) + " does not match network input " +
                         std::to_string(in[2]) + "x" + std::to_string(in[1]));
    }
    FeatureVector out;
    out.descriptor_id = net.arch().id == "CNN2" ? DescriptorId::CNN2 : DescriptorId::CNN1;
    out.values = net.infer_penultimate({image_to_tensor(img)}).values();
    return out;
}

std::string feature_csv_string(const std::vector<FeatureVector>& features,
                               const std::vector<int>& labels) {
    if (features.size() != labels.size()) {
        throw ShapeError("feature_csv: features/labels size mismatch");
    }
    if (features.empty()) throw DataError("feature_csv: no rows");
    std::ostringstream os;
    const char* name = descriptor_name(features.front().descriptor_id);
    for (std::size_t i = 0; i < features.front().length(); ++i) {
        os << name << '_' << i << ',';
    }
    os << "label\r\n";
    os.precision(17);
    for (std::size_t r = 0; r < features.size(); ++r) {
        if (features[r].length() != features.front().length()) {
            throw ShapeError("feature_csv: ragged feature lengths");
        }
        for (double v : features[r].values) os << v << ',';
        os << labels[r] << "\r\n";
    }
    return os.str();
}

void write_feature_csv(const std::string& path, const std::vector<FeatureVector>& features,
                       const std::vector<int>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const std::string bytes = feature_csv_string(features, labels);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace dvnet
