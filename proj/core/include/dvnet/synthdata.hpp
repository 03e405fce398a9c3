#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dvnet/image.hpp"

namespace dvnet {

enum class LesionClass { benign, malignant };
enum class Difficulty { easy, standard };

const char* difficulty_name(Difficulty d);
Difficulty difficulty_from_name(const std::string& name);

/// Geometry and texture of one synthetic lesion. The two views render the
/// same ellipsoid (radii x/y/z) from orthogonal axes: coronal sees x-y,
/// transverse sees x-z plus the posterior band (shadow for malignant,
/// mild enhancement for benign).
struct LesionParams {
    LesionClass lesion_class = LesionClass::benign;
    double center_x = 32.0, center_y = 32.0, center_z = 32.0;
    double radius_x = 12.0, radius_y = 10.0, radius_z = 11.0;
    int spicule_count = 0;        // malignant >= 4, benign 0
    double spicule_length = 0.0;  // pixels
    double boundary_roughness = 0.0;
    double posterior_factor = 1.0;  // <1 shadow, >1 enhancement
    int interior_intensity = 80;
    int background_intensity = 155;
    double speckle_scale = 0.1;
    std::uint64_t seed = 0;

    /// Frame fit with a >= 4 pixel margin; class/spicule consistency.
    void validate() const;
};

struct DualViewSample {
    GrayImage coronal;
    GrayImage transverse;
    int label = 0;  // 0 benign, 1 malignant
};

struct SynthDataset {
    std::vector<DualViewSample> samples;
    std::vector<LesionParams> params;  // aligned with samples
    Difficulty difficulty = Difficulty::standard;
    std::uint64_t seed = 0;
    std::size_t benign_count = 0;
    std::size_t malignant_count = 0;
};

constexpr std::size_t kFrameSize = 64;

/// Deterministic render of both 64x64 views; multiplicative Rayleigh speckle
/// normalized to mean 1, pixel <- clamp(pixel * (1 + scale*(r-1))).
DualViewSample render_lesion(const LesionParams& params);

/// Class- and difficulty-conditioned parameter draw for one sample.
LesionParams sample_lesion_params(LesionClass cls, Difficulty difficulty, std::uint64_t seed);

/// Per-sample seeds derive as seed ^ index; the assembled set is shuffled
/// deterministically. Default counts (71, 74) follow the reference cohort.
SynthDataset generate_dataset(std::size_t n_benign, std::size_t n_malignant,
                              Difficulty difficulty, std::uint64_t seed);

struct SplitResult {
    SynthDataset train;
    SynthDataset test;
    std::vector<std::size_t> train_indices;  // into the source dataset
    std::vector<std::size_t> test_indices;
    std::string split_id;
};

/// Class-balanced test split of floor(test_fraction*n/2) per class, fixed
/// for a given (dataset, test_fraction, seed) no matter the ratio; the
/// training pool is then subsampled to ratio_pos_per_neg positives per
/// negative, negatives setting the scale: n_neg = min(avail_neg,
/// floor(avail_pos/ratio)), n_pos = floor(ratio*n_neg).
SplitResult split_with_ratio(const SynthDataset& dataset, double test_fraction,
                             double ratio_pos_per_neg, std::uint64_t seed);

/// Plain stratified split: round(test_fraction * n_c) of each class go to
/// test, the rest to train. The default 70/30 protocol.
SplitResult stratified_split(const SynthDataset& dataset, double test_fraction,
                             std::uint64_t seed);

/// Directory layout {split}/{label}/{index}_{view}.pgm plus manifest.json
/// (seed, difficulty, counts, per-sample params).
void export_dataset(const SynthDataset& dataset, const std::string& dir,
                    const std::string& split_name = "all");

/// Reads a directory written by export_dataset.
SynthDataset load_dataset(const std::string& dir);

}  // namespace dvnet
