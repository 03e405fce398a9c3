#pragma once

#include <string>
#include <vector>

#include "dvnet/image.hpp"
#include "dvnet/network.hpp"

namespace dvnet {

enum class DescriptorId { HGD, HOG, GLCM, CNN1, CNN2, FUSED };

const char* descriptor_name(DescriptorId id);

struct FeatureVector {
    std::vector<double> values;
    DescriptorId descriptor_id = DescriptorId::HOG;

    std::size_t length() const { return values.size(); }
};

struct HogParams {
    std::size_t cell = 8;
    std::size_t bins = 9;
    std::size_t block = 2;  // block x block cells, stride one cell
};

/// Central-difference gradients, unsigned orientations (0-180 deg) with
/// linear bin interpolation, L2 block normalization (eps 1e-6), concatenated
/// blocks. 64x64/cell 8/block 2/9 bins -> length 1764.
FeatureVector hog_descriptor(const GrayImage& img, const HogParams& params = {});

/// Symmetric normalized co-occurrence matrix (levels x levels, row-major)
/// for one (dr, dc) offset.
std::vector<double> glcm_matrix(const GrayImage& img, std::size_t levels, int dr, int dc);

/// 16-level symmetric normalized co-occurrence matrices at offsets
/// (0,1),(1,1),(1,0),(1,-1); per offset {contrast, correlation, energy,
/// homogeneity} -> length 16. A zero-variance matrix reports correlation 0.
FeatureVector glcm_features(const GrayImage& img, std::size_t levels = 16);

/// Global histogram of gradient directions: signed orientations (0-360 deg),
/// magnitude-weighted, L1-normalized. Unlike HOG there are no cells or
/// blocks, so it captures only the global direction profile.
FeatureVector hgd_descriptor(const GrayImage& img, std::size_t bins = 32);

/// Activations feeding the network's final classification layer, tagged
/// CNN1/CNN2 by the source architecture id. Single-branch networks only.
FeatureVector cnn_penultimate_features(const Network& net, const GrayImage& img);

/// One row per sample: descriptor values then the label. Header columns are
/// "<descriptor>_<index>" and "label".
void write_feature_csv(const std::string& path, const std::vector<FeatureVector>& features,
                       const std::vector<int>& labels);
std::string feature_csv_string(const std::vector<FeatureVector>& features,
                               const std::vector<int>& labels);

}  // namespace dvnet
