#include "dvnet/fusion.hpp"

#include "dvnet/error.hpp"
#include "dvnet/rng.hpp"

namespace dvnet {

namespace {

ArchitectureSpec conv_stack_spec(const std::string& id, std::size_t input_hw,
                                 std::size_t first_kernel) {
    ArchitectureSpec spec;
    spec.id = id;
    spec.n_branches = 1;
    spec.input = {1, input_hw, input_hw};
    spec.branch = {
        LayerSpecEntry::conv(16, first_kernel, first_kernel),
        LayerSpecEntry::activation(ActKind::relu),
        LayerSpecEntry::maxpool(),
        LayerSpecEntry::conv(32, 3, 3),
        LayerSpecEntry::activation(ActKind::relu),
        LayerSpecEntry::maxpool(),
        LayerSpecEntry::conv(64, 3, 3),
        LayerSpecEntry::activation(ActKind::relu),
        LayerSpecEntry::maxpool(),
    };
    return spec;
}

}  // namespace

ArchitectureSpec single_net_spec() {
    ArchitectureSpec spec = conv_stack_spec("SingleNet", 62, 3);
    spec.trunk = {
        LayerSpecEntry::dense(128),
        LayerSpecEntry::activation(ActKind::relu),
        LayerSpecEntry::dense(2),
    };
    return spec;
}

ArchitectureSpec cnn1_spec() {
    ArchitectureSpec spec = single_net_spec();
    spec.id = "CNN1";
    return spec;
}

ArchitectureSpec cnn2_spec() {
    ArchitectureSpec spec = conv_stack_spec("CNN2", 64, 5);
    spec.trunk = {
        LayerSpecEntry::dense(256),
        LayerSpecEntry::activation(ActKind::relu),
        LayerSpecEntry::dense(2),
    };
    return spec;
}

ArchitectureSpec two_views_net_spec() {
    ArchitectureSpec spec = conv_stack_spec("TwoViewsNet", 62, 3);
    spec.n_branches = 2;
    spec.trunk = {
        LayerSpecEntry::dense(512),
        LayerSpecEntry::activation(ActKind::relu),
        LayerSpecEntry::dense(256),
        LayerSpecEntry::activation(ActKind::relu),
        LayerSpecEntry::dense(2),
    };
    return spec;
}

Network build_single_net(std::uint64_t seed) { return Network(single_net_spec(), seed); }
Network build_cnn2(std::uint64_t seed) { return Network(cnn2_spec(), seed); }
Network build_two_views_net(std::uint64_t seed) { return Network(two_views_net_spec(), seed); }

double probability_fusion(double p_coronal, double p_transverse) {
    if (p_coronal < 0.0 || p_coronal > 1.0 || p_transverse < 0.0 || p_transverse > 1.0) {
        throw ParamError("probability_fusion: probabilities must lie in [0,1]");
    }
    return 0.5 * (p_coronal + p_transverse);
}

Tensor net_input(const GrayImage& roi, const ArchitectureSpec& arch) {
    const std::size_t h = arch.input[1], w = arch.input[2];
    if (roi.height == h && roi.width == w) return image_to_tensor(roi);
    return image_to_tensor(center_crop(roi, w, h));
}

namespace {

std::vector<TrainSample> single_view_samples(const std::vector<DualViewSample>& data,
                                             const ArchitectureSpec& arch, bool transverse) {
    std::vector<TrainSample> out;
    out.reserve(data.size());
    for (const DualViewSample& s : data) {
        out.push_back({{net_input(transverse ? s.transverse : s.coronal, arch)}, s.label});
    }
    return out;
}

void require_both_classes(const std::vector<DualViewSample>& data, const char* who) {
    bool saw0 = false, saw1 = false;
    for (const DualViewSample& s : data) (s.label == 1 ? saw1 : saw0) = true;
    if (data.empty() || !saw0 || !saw1) {
        throw DataError(std::string(who) + ": training set must contain both classes");
    }
}

}  // namespace

FusionModel train_fusion_pipeline(const std::vector<DualViewSample>& train,
                                  const TrainConfig& config, const SvmParams& svm) {
    require_both_classes(train, "train_fusion_pipeline");

    Network cnn1(cnn1_spec(), derive_seed(config.seed, 0xC1));
    Network cnn2(cnn2_spec(), derive_seed(config.seed, 0xC2));

    TrainConfig cfg1 = config;
    cfg1.seed = derive_seed(config.seed, 0x7E1);
    train_network(cnn1, single_view_samples(train, cnn1.arch(), false), cfg1);
    TrainConfig cfg2 = config;
    cfg2.seed = derive_seed(config.seed, 0x7E2);
    train_network(cnn2, single_view_samples(train, cnn2.arch(), false), cfg2);

    FusionModel model{std::move(cnn1), std::move(cnn2), {}};

    LabeledSet fused;
    fused.seed = config.seed;
    for (const DualViewSample& s : train) {
        fused.features.push_back(fused_features(model, s.coronal));
        fused.labels.push_back(s.label);
    }
    model.classifier = train_svm(fused, svm);
    return model;
}

std::vector<double> fused_features(const FusionModel& model, const GrayImage& roi) {
    const Tensor f1 = model.cnn1.infer_penultimate({net_input(roi, model.cnn1.arch())});
    const Tensor f2 = model.cnn2.infer_penultimate({net_input(roi, model.cnn2.arch())});
    std::vector<double> out;
    out.reserve(f1.size() + f2.size());
    out.insert(out.end(), f1.values().begin(), f1.values().end());
    out.insert(out.end(), f2.values().begin(), f2.values().end());
    return out;
}

double fusion_predict(const FusionModel& model, const GrayImage& roi) {
    return model.classifier.predict_score(fused_features(model, roi));
}

EvalReport evaluate_scores(const std::vector<double>& scores, const std::vector<int>& labels,
                           double threshold) {
    if (scores.size() != labels.size()) throw DataError("evaluate_scores: size mismatch");
    EvalReport report;
    report.auc = compute_auc(scores, labels);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int pred = scores[i] > threshold ? 1 : 0;
        if (labels[i] == 1) {
            (pred == 1 ? report.tp : report.fn) += 1;
        } else {
            (pred == 1 ? report.fp : report.tn) += 1;
        }
    }
    report.accuracy =
        static_cast<double>(report.tp + report.tn) / static_cast<double>(scores.size());
    return report;
}

ViewComparisonResult run_view_comparison(const SynthDataset& train, const SynthDataset& test,
                                         const TrainConfig& config) {
    ViewComparisonResult result;
    std::vector<int> test_labels;
    for (const DualViewSample& s : test.samples) test_labels.push_back(s.label);

    std::vector<double> coronal_probs, transverse_probs;

    auto run_model = [&](const std::string& name, auto&& body) {
        NamedReport named;
        named.name = name;
        try {
            named.report = body();
            named.report.seed = config.seed;
        } catch (const Error& e) {
            named.ok = false;
            named.error = e.what();
            result.complete = false;
        }
        result.reports.push_back(std::move(named));
    };

    run_model("Single-Net-Coronal", [&] {
        Network net(single_net_spec(), derive_seed(config.seed, 0x51));
        TrainConfig cfg = config;
        cfg.seed = derive_seed(config.seed, 0x151);
        train_network(net, single_view_samples(train.samples, net.arch(), false), cfg);
        coronal_probs.clear();
        for (const DualViewSample& s : test.samples) {
            coronal_probs.push_back(net.predict_prob({net_input(s.coronal, net.arch())}));
        }
        return evaluate_scores(coronal_probs, test_labels);
    });

    run_model("Single-Net-Transverse", [&] {
        Network net(single_net_spec(), derive_seed(config.seed, 0x52));
        TrainConfig cfg = config;
        cfg.seed = derive_seed(config.seed, 0x152);
        train_network(net, single_view_samples(train.samples, net.arch(), true), cfg);
        transverse_probs.clear();
        for (const DualViewSample& s : test.samples) {
            transverse_probs.push_back(net.predict_prob({net_input(s.transverse, net.arch())}));
        }
        return evaluate_scores(transverse_probs, test_labels);
    });

    run_model("Probability fusion", [&]() -> EvalReport {
        if (coronal_probs.size() != test_labels.size() ||
            transverse_probs.size() != test_labels.size()) {
            throw DataError("probability fusion requires both single-view models");
        }
        std::vector<double> fused(test_labels.size());
        for (std::size_t i = 0; i < fused.size(); ++i) {
            fused[i] = probability_fusion(coronal_probs[i], transverse_probs[i]);
        }
        return evaluate_scores(fused, test_labels);
    });

    run_model("2Views-Net", [&] {
        Network net(two_views_net_spec(), derive_seed(config.seed, 0x53));
        std::vector<TrainSample> samples;
        samples.reserve(train.samples.size());
        for (const DualViewSample& s : train.samples) {
            samples.push_back({{net_input(s.coronal, net.arch()), net_input(s.transverse, net.arch())},
                               s.label});
        }
        TrainConfig cfg = config;
        cfg.seed = derive_seed(config.seed, 0x153);
        train_network(net, samples, cfg);
        std::vector<double> probs;
        probs.reserve(test.samples.size());
        for (const DualViewSample& s : test.samples) {
            probs.push_back(net.predict_prob(
                {net_input(s.coronal, net.arch()), net_input(s.transverse, net.arch())}));
        }
        return evaluate_scores(probs, test_labels);
    });

    return result;
}

}  // namespace dvnet
