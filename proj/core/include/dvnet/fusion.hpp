#pragma once

#include <string>
#include <vector>

#include "dvnet/classifiers.hpp"
#include "dvnet/features.hpp"
#include "dvnet/network.hpp"
#include "dvnet/synthdata.hpp"

namespace dvnet {

/// Reference convolutional stack: three [conv 3x3, relu, maxpool] stages of
/// 16/32/64 maps. Valid convolutions and strict 2x2 pooling admit no 64x64
/// input (64 -> 62 -> 31 leaves an odd extent), so the net ingests the
/// center 62x62 crop of the ROI: 62 -> 60/30 -> 28/14 -> 12/6, flat width
/// 64*6*6 = 2304, then dense 128 -> relu -> dense 2.
ArchitectureSpec single_net_spec();
/// SingleNet stack under the CNN1 id (the first pretrained feature network).
ArchitectureSpec cnn1_spec();
/// The differently-structured second network: 5x5 first-stage kernels let it
/// run on the native 64x64 ROI (64 -> 60/30 -> 28/14 -> 12/6), dense 256.
ArchitectureSpec cnn2_spec();
/// Two independent (non-weight-shared) SingleNet conv branches, flattened
/// and concatenated (2*2304 = 4608), then dense 512 -> relu -> dense 256 ->
/// relu -> dense 2.
ArchitectureSpec two_views_net_spec();

Network build_single_net(std::uint64_t seed);
Network build_cnn2(std::uint64_t seed);
Network build_two_views_net(std::uint64_t seed);

/// Arithmetic mean of the two per-view probabilities.
double probability_fusion(double p_coronal, double p_transverse);

/// Crops the ROI to the architecture's input extent and scales to [0,1].
Tensor net_input(const GrayImage& roi, const ArchitectureSpec& arch);

/// CNN1 + CNN2 pretrained on the coronal view, penultimate features
/// concatenated (128 + 256 = 384), default SVM downstream. The SVM
/// standardizes features internally from the training split.
struct FusionModel {
    Network cnn1;
    Network cnn2;
    TrainedClassifier classifier;
};

FusionModel train_fusion_pipeline(const std::vector<DualViewSample>& train,
                                  const TrainConfig& config, const SvmParams& svm = {});

std::vector<double> fused_features(const FusionModel& model, const GrayImage& roi);
double fusion_predict(const FusionModel& model, const GrayImage& roi);

/// EvalReport computed directly from scores (for models that are not
/// TrainedClassifiers). AUC from raw scores, confusion at the threshold.
EvalReport evaluate_scores(const std::vector<double>& scores, const std::vector<int>& labels,
                           double threshold = 0.5);

struct NamedReport {
    std::string name;
    bool ok = true;
    std::string error;
    EvalReport report;
};

struct ViewComparisonResult {
    std::vector<NamedReport> reports;  // Single-Net-Coronal, Single-Net-Transverse,
                                       // Probability fusion, 2Views-Net
    bool complete = true;
};

/// The four-way view comparison on one train/test split: per-view SingleNets,
/// their probability fusion on test predictions, and the end-to-end
/// dual-branch net. Per-model failures are recorded and the rest continue.
ViewComparisonResult run_view_comparison(const SynthDataset& train, const SynthDataset& test,
                                         const TrainConfig& config);

}  // namespace dvnet
